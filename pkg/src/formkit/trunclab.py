"""Instance generators for the worked example families, plus
dimension-growth diagnostics.

The diagnostics are descriptive truncation data (spectral minima, sector
grid verdicts, hull geometry, resolvent norms); none of them claims to
certify a property of the untruncated object.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import NotSectorial, ValidationError
from .forms import Form, PositiveForm, identity_form
from .numerics import DEFAULT_RANK_TOL, as_matrix, hermitize, psd_sqrt
from .regularity import in_class_M, sectorial_parameters
from .solvable import NormGram, numerical_range_hull, represent_operator


@dataclass(frozen=True, eq=False)
class Instance:
    """A ready-to-analyze triple (omega, theta, psi) with provenance.

    Family generators always produce a majorizing psi and keep the check
    on; user-supplied matrices may carry a non-majorizing psi, which the
    analysis commands then refuse individually.
    """

    omega: Form
    theta: PositiveForm
    psi: PositiveForm
    provenance: str
    extras: dict = field(default_factory=dict)
    check_membership: InitVar[bool] = True

    def __post_init__(self, check_membership):
        if not check_membership:
            return
        member, _ = in_class_M(self.omega, self.psi)
        if not member:
            raise ValidationError(
                f"instance '{self.provenance}': psi does not majorize omega"
            )

    @property
    def dim(self) -> int:
        return self.omega.dim


def diag_family(values, provenance: str = "diag") -> Instance:
    """Diagonal form from a finite complex sequence.

    The reference form is the inner product, the suggested majorant is the
    absolute-value diagonal, and the closed-form witnesses are the diagonal
    square-root scale and the unimodular phase factor (phase fixed to 1
    where the entry vanishes).
    """
    lam = np.asarray(values, dtype=complex).ravel()
    if lam.size < 1:
        raise ValidationError("the diagonal family needs at least one entry")
    n = lam.size
    omega = Form(np.diag(lam))
    theta = identity_form(n)
    psi = PositiveForm(np.diag(np.abs(lam)))
    phases = np.where(lam == 0, 1.0 + 0j, np.exp(1j * np.angle(lam)))
    extras = {
        "H": np.diag(np.sqrt(np.abs(lam))),
        "Y": np.diag(phases),
        "T": np.diag(lam),
    }
    return Instance(omega=omega, theta=theta, psi=psi, provenance=provenance, extras=extras)


def measure_family(theta_weights, omega_weights, provenance: str = "measure") -> Instance:
    """Discrete measure pair on m atoms.

    The domain is spanned by the indicator of each atom; the reference form
    integrates against the nonnegative weights, the form against the complex
    weights, and the majorant against their moduli. When every complex atom
    sits inside the support of the reference weights, the extras carry the
    density and phase realizing the multiplication-operator witnesses.
    """
    th = np.asarray(theta_weights, dtype=float).ravel()
    om = np.asarray(omega_weights, dtype=complex).ravel()
    if th.size != om.size or th.size < 1:
        raise ValidationError("weight vectors must share a positive length")
    if np.any(th < 0):
        raise ValidationError("reference weights must be nonnegative")
    theta = PositiveForm(np.diag(th).astype(complex))
    omega = Form(np.diag(om))
    psi = PositiveForm(np.diag(np.abs(om)))
    support_theta = th > 0
    support_omega = np.abs(om) > 0
    ac = bool(np.all(support_theta | ~support_omega))
    extras: dict = {"absolutely_continuous": ac}
    if ac:
        density = np.zeros(th.size)
        density[support_theta] = np.abs(om[support_theta]) / th[support_theta]
        extras["density"] = density
        extras["phase"] = np.where(om == 0, 1.0 + 0j, np.exp(1j * np.angle(om)))
    return Instance(omega=omega, theta=theta, psi=psi, provenance=provenance, extras=extras)


def operator_pair_family(s_mat, t_mat, provenance: str = "operator_pair") -> Instance:
    """Form <s xi, t eta> of an operator pair, with the graph-type majorant."""
    s = as_matrix(s_mat)
    t = as_matrix(t_mat)
    if s.shape != t.shape:
        raise ValidationError("the two operators must have the same shape")
    n = s.shape[0]
    omega = Form(t.conj().T @ s)
    gram = np.eye(n, dtype=complex) + s.conj().T @ s + t.conj().T @ t
    psi = PositiveForm(hermitize(gram))
    extras = {"H": psd_sqrt(psi.matrix)}
    return Instance(
        omega=omega,
        theta=identity_form(n),
        psi=psi,
        provenance=provenance,
        extras=extras,
    )


def _lambda_values(expression, size: int) -> np.ndarray:
    """Evaluate a sequence specification: a literal list or an expression in
    the index variable n (1-based), e.g. ``"n*exp(i*n)"``."""
    if isinstance(expression, str):
        import cmath

        namespace = {
            "exp": cmath.exp,
            "cos": cmath.cos,
            "sin": cmath.sin,
            "sqrt": cmath.sqrt,
            "log": cmath.log,
            "abs": abs,
            "pi": cmath.pi,
            "e": cmath.e,
            "i": 1j,
            "j": 1j,
        }
        code = compile(expression, "<lambda-spec>", "eval")
        for name in code.co_names:
            if name not in namespace and name != "n":
                raise ValidationError(f"unknown name {name!r} in sequence expression")
        out = []
        for n in range(1, size + 1):
            local = dict(namespace, n=n)
            out.append(complex(eval(code, {"__builtins__": {}}, local)))
        return np.asarray(out)
    values = np.asarray(expression, dtype=complex).ravel()
    if values.size < size:
        raise ValidationError(
            f"sequence literal has {values.size} entries, need {size}"
        )
    return values[:size]


def convergence_report(
    family: str,
    params: dict,
    sizes: list[int],
    hull_grid: int = 360,
    rtol: float = DEFAULT_RANK_TOL,
) -> list[dict]:
    """Truncation diagnostics per size for the diagonal family.

    For each size: the spectral minimum of the real part (semiboundedness
    proxy), the sector-grid verdict, hull extent and area, the distance from
    a deterministic probe point placed outside the hull, the resolvent norm
    there, and the condition number of the normalized system under the
    natural majorant-augmented Gram.
    """
    if sorted(sizes) != list(sizes) or len(sizes) == 0:
        raise ValidationError("sizes must be a nonempty ascending list")
    if family != "diag":
        raise ValidationError("size sweeps are defined for the diagonal family")
    spec = params.get("lambda")
    if spec is None:
        raise ValidationError("diagonal family needs a 'lambda' entry")
    rows = []
    for size in sizes:
        inst = diag_family(_lambda_values(spec, size), provenance=f"diag[N={size}]")
        re_min = float(np.min(inst.omega.matrix.diagonal().real))
        try:
            cert = sectorial_parameters(inst.omega, inst.theta)
            verdict = {"sectorial": True, "delta": cert.delta, "gamma": cert.gamma}
        except NotSectorial:
            verdict = {"sectorial": False}
        hull = numerical_range_hull(inst.omega, hull_grid)
        direction = int(np.argmin(hull.support))
        angle = float(hull.angles[direction])
        gap = 1.0 + 0.1 * hull.scale
        # beyond the least supporting half-plane: outside by at least the gap
        probe = complex((hull.support[direction] + gap) * np.exp(1j * angle))
        distance = hull.distance(probe)
        gram = NormGram(np.eye(size, dtype=complex) + inst.psi.matrix)
        shift = Form(-probe * np.eye(size, dtype=complex))
        report = represent_operator(inst.omega, gram, shift, rtol)
        normalized = gram.normalized(report.system)
        sing = np.linalg.svd(normalized, compute_uv=False)
        rows.append(
            {
                "size": size,
                "re_spectrum_min": re_min,
                "sectorial": verdict,
                "hull_radius": float(np.max(np.abs(hull.points))),
                "hull_re_extent": [
                    float(np.min(hull.points.real)),
                    float(np.max(hull.points.real)),
                ],
                "hull_im_extent": [
                    float(np.min(hull.points.imag)),
                    float(np.max(hull.points.imag)),
                ],
                "hull_area": hull.area(),
                "probe": probe,
                "probe_distance": distance,
                "resolvent_norm": report.resolvent_norm,
                "normalized_condition": float(sing[0] / sing[-1]),
            }
        )
    return rows
