"""Solvability of forms on a finite-dimensional Gelfand triplet.

The triplet is modeled by a Hermitian positive-definite Gram matrix G:
the small space carries the norm |G^(1/2) xi|, the dual norm of a
functional vector is |G^(-1/2) Lambda|, and a perturbed form acts between
them literally as its matrix. Solvability then reduces to the extreme
singular values of the G-normalized matrix, and the scalar case is
controlled by the numerical range via its support function.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import IncompatibleNorm, NotSolvable, TheoremViolation, ValidationError
from .forms import Form, PositiveForm, identity_form
from .numerics import DEFAULT_RANK_TOL, as_matrix, hermitize, min_eig_herm

DEFAULT_HULL_GRID = 720

# Hull margins closer to the boundary than this (relative to the hull scale)
# are reported inconclusive rather than guessed.
BOUNDARY_RTOL = 1e-4


@dataclass(frozen=True, eq=False)
class NormGram:
    """Gram matrix of the Hilbert norm put on the domain."""

    gram: np.ndarray

    def __post_init__(self):
        g = as_matrix(self.gram)
        if np.linalg.norm(g - g.conj().T) > 1e-10 * max(np.linalg.norm(g), 1e-300):
            raise ValidationError("norm Gram matrix must be Hermitian")
        g = hermitize(g)
        w = np.linalg.eigvalsh(g) if g.size else np.zeros(0)
        if g.size and w[0] <= 0:
            raise ValidationError(
                f"norm Gram matrix must be positive definite: min eigenvalue {w[0]:.6e}"
            )
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def _inv_root(self) -> np.ndarray:
        w, v = np.linalg.eigh(self.gram)
        return (v * (1.0 / np.sqrt(w))) @ v.conj().T

    def normalized(self, a: np.ndarray) -> np.ndarray:
        """G^(-1/2) a G^(-1/2): the operator the triplet actually inverts."""
        r = self._inv_root
        return r @ a @ r


def validate_compatible_norm(
    gram: NormGram, theta: PositiveForm, rtol: float = DEFAULT_RANK_TOL
) -> bool:
    """Check theta <= the norm form (condition on the quadratic ordering).

    The separate closability condition is vacuous here: a positive-definite
    Gram already makes the domain complete.
    """
    diff = gram.gram - theta.matrix
    scale = max(np.linalg.norm(gram.gram, 2), np.linalg.norm(theta.matrix, 2), 1.0)
    return min_eig_herm(diff) >= -rtol * scale


@dataclass(frozen=True, eq=False)
class NumericalRangeHull:
    """Support-function description of the numerical range.

    ``support[k]`` is the largest eigenvalue of Re(e^(-i angle_k) M);
    ``points[k]`` is the attaining boundary value of the quadratic form.
    """

    angles: np.ndarray
    support: np.ndarray
    points: np.ndarray

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.support))) if self.support.size else 0.0)

    def signed_margin(self, z: complex) -> float:
        """Max over grid directions of Re(e^(-i t) z) - h(t); positive means
        outside the hull by at least that distance, negative means inside."""
        return float(np.max(np.real(np.exp(-1j * self.angles) * z) - self.support))

    def distance(self, z: complex) -> float:
        return max(0.0, self.signed_margin(z))

    def area(self) -> float:
        """Shoelace area of the polygon of boundary points."""
        x, y = self.points.real, self.points.imag
        return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2)


def numerical_range_hull(omega: Form, m: int = DEFAULT_HULL_GRID) -> NumericalRangeHull:
    """Rotation-method hull of {omega(xi, xi) : |xi| = 1}.

    For each grid angle the support value is the top eigenvalue of the
    rotated Hermitian part, and the boundary point is the quadratic value at
    the corresponding eigenvector.
    """
    if m < 16:
        raise ValueError("hull grid must have at least 16 angles")
    mat = omega.matrix
    n = mat.shape[0]
    angles = 2 * np.pi * np.arange(m) / m
    phases = np.exp(-1j * angles)
    rotated = phases[:, None, None] * mat[None, :, :]
    stack = (rotated + rotated.conj().transpose(0, 2, 1)) / 2
    values, vectors = np.linalg.eigh(stack)
    support = values[:, -1]
    top = vectors[:, :, -1]
    points = np.einsum("ki,ij,kj->k", top.conj(), mat, top)
    return NumericalRangeHull(angles=angles, support=support, points=points)


def numerical_radius(mat: np.ndarray, m: int = DEFAULT_HULL_GRID) -> float:
    """Max modulus over the numerical range; exact for Hermitian input."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape[0] == 0:
        return 0.0
    if np.linalg.norm(mat - mat.conj().T) <= 1e-12 * max(np.linalg.norm(mat), 1e-300):
        return float(np.max(np.abs(np.linalg.eigvalsh(hermitize(mat)))))
    hull = numerical_range_hull(Form(mat), m)
    return float(np.max(hull.support))


@dataclass(frozen=True, eq=False)
class SolvabilityReport:
    """Outcome of perturbing a form into an invertible triplet map."""

    upsilon: Form
    system: np.ndarray          # matrix of the perturbed form
    c1: float                   # smallest singular value, G-normalized
    c2: float                   # largest singular value, G-normalized
    c1_adjoint: float           # adjoint-side constants; equal by symmetry
    c2_adjoint: float
    solvable: bool
    operator: np.ndarray        # representing operator T
    lam: Optional[complex] = None
    resolvent_norm: Optional[float] = None


def solvability_with(
    omega: Form,
    gram: NormGram,
    upsilon: Form,
    rtol: float = DEFAULT_RANK_TOL,
) -> SolvabilityReport:
    """Inf-sup constants of omega + upsilon in the G-triplet.

    The perturbation is accepted iff the smallest G-normalized singular
    value exceeds ``rtol`` times the largest. Adjoint-side constants equal
    the direct ones because conjugate transposition preserves singular
    values.
    """
    if not validate_compatible_norm(gram, identity_form(gram.dim)):
        raise IncompatibleNorm("Gram matrix does not dominate the inner product")
    a = omega.matrix + upsilon.matrix
    normalized = gram.normalized(a)
    sing = np.linalg.svd(normalized, compute_uv=False) if a.size else np.zeros(0)
    c2 = float(sing[0]) if sing.size else 0.0
    c1 = float(sing[-1]) if sing.size else 0.0
    solvable = c1 > rtol * c2 if c2 > 0 else False
    return SolvabilityReport(
        upsilon=upsilon,
        system=a,
        c1=c1,
        c2=c2,
        c1_adjoint=c1,
        c2_adjoint=c2,
        solvable=solvable,
        operator=omega.matrix,
    )


def _scalar_shift(upsilon: Form) -> Optional[complex]:
    """Detect upsilon = -lam * identity exactly; return lam or None."""
    m = upsilon.matrix
    if m.shape[0] == 0:
        return None
    lam = -m[0, 0]
    if np.array_equal(m, -lam * np.eye(m.shape[0], dtype=complex)):
        return complex(lam)
    return None


def represent_operator(
    omega: Form,
    gram: NormGram,
    upsilon: Form,
    rtol: float = DEFAULT_RANK_TOL,
) -> SolvabilityReport:
    """Representing operator for a solvable perturbed form.

    At finite dimension the operator is the representing matrix itself and
    is defined on the whole space. When the perturbation is a scalar shift
    -lam * inner product, lam belongs to the resolvent set and the report
    carries the resolvent norm.

    Raises:
        NotSolvable: if the perturbation fails the inf-sup test.
    """
    report = solvability_with(omega, gram, upsilon, rtol)
    if not report.solvable:
        raise NotSolvable(
            f"inf-sup constant {report.c1:.3e} is not positive relative to {report.c2:.3e}"
        )
    lam = _scalar_shift(upsilon)
    resolvent_norm = None
    if lam is not None:
        shifted = omega.matrix - lam * np.eye(omega.dim, dtype=complex)
        sing = np.linalg.svd(shifted, compute_uv=False)
        if sing[-1] <= rtol * sing[0]:
            raise NotSolvable(f"{lam} is not in the resolvent set")
        resolvent_norm = float(1.0 / sing[-1])
    return SolvabilityReport(
        upsilon=report.upsilon,
        system=report.system,
        c1=report.c1,
        c2=report.c2,
        c1_adjoint=report.c1_adjoint,
        c2_adjoint=report.c2_adjoint,
        solvable=True,
        operator=omega.matrix,
        lam=lam,
        resolvent_norm=resolvent_norm,
    )


@dataclass(frozen=True, eq=False)
class ScalarSolvability:
    solvable: bool
    distance: float
    status: str                 # "outside", "inside", or "boundary-inconclusive"
    report: SolvabilityReport


def scalar_solvability(
    omega: Form,
    gram: NormGram,
    lam: complex,
    hull: Optional[NumericalRangeHull] = None,
    m: int = DEFAULT_HULL_GRID,
    rtol: float = DEFAULT_RANK_TOL,
) -> ScalarSolvability:
    """Decide solvability of the scalar perturbation -lam via the hull.

    If lam sits strictly outside the numerical range the perturbation must
    be solvable; that implication is asserted and its failure raises
    TheoremViolation. Within the boundary band (relative width
    ``BOUNDARY_RTOL``) the hull is inconclusive and the direct inf-sup check
    decides, as it also does inside.
    """
    if not validate_compatible_norm(gram, identity_form(gram.dim)):
        raise IncompatibleNorm("Gram matrix does not dominate the inner product")
    if hull is None:
        hull = numerical_range_hull(omega, m)
    margin = hull.signed_margin(lam)
    band = BOUNDARY_RTOL * hull.scale
    shift = Form(-complex(lam) * np.eye(omega.dim, dtype=complex))
    report = solvability_with(omega, gram, shift, rtol)
    if margin > band:
        if not report.solvable:
            raise TheoremViolation(
                f"point at distance {margin:.3e} outside the hull was reported unsolvable"
            )
        status = "outside"
    elif margin < -band:
        status = "inside"
    else:
        status = "boundary-inconclusive"
    return ScalarSolvability(
        solvable=bool(report.solvable),
        distance=max(0.0, margin),
        status=status,
        report=report,
    )
