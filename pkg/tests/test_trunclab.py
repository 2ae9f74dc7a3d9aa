import numpy as np
import pytest

import formkit as fk
from formkit.numerics import frob
from formkit.trunclab import _lambda_values

from conftest import complex_randn


def rotating_diagonal(size):
    n = np.arange(1, size + 1)
    return n * np.exp(1j * n)


class TestDiagFamily:
    def test_rotating_sequence_witnesses(self):
        inst = fk.diag_family(rotating_diagonal(8))
        h, y = inst.extras["H"], inst.extras["Y"]
        assert frob(h @ h @ y - inst.omega.matrix) <= 1e-12 * frob(inst.omega.matrix)
        assert np.array_equal(inst.extras["T"], inst.omega.matrix)

    def test_constant_one(self):
        inst = fk.diag_family(np.ones(4))
        assert np.array_equal(inst.omega.matrix, np.eye(4, dtype=complex))
        assert np.array_equal(inst.psi.matrix, np.eye(4, dtype=complex))

    def test_alternating_signs(self):
        inst = fk.diag_family([(-1.0) ** n for n in range(1, 6)])
        assert np.allclose(inst.extras["H"], np.eye(5))
        assert np.allclose(np.abs(inst.extras["Y"].diagonal()), np.ones(5))
        assert np.allclose(inst.extras["Y"].diagonal().real, [-1, 1, -1, 1, -1])

    def test_zero_entry_phase_fixed(self):
        inst = fk.diag_family([0.0, 2.0])
        assert inst.extras["Y"][0, 0] == 1.0
        assert inst.extras["H"][0, 0] == 0.0

    def test_regular_for_every_size(self):
        for size in (2, 5, 9):
            inst = fk.diag_family(rotating_diagonal(size))
            split = fk.lebesgue_decompose(inst.omega, inst.theta, inst.psi)
            assert frob(split.singular.matrix) <= 1e-10 * frob(inst.omega.matrix)
            assert frob(split.regular.matrix - inst.omega.matrix) <= 1e-10 * frob(
                inst.omega.matrix
            )


class TestMeasureFamily:
    def test_density_and_phase(self):
        inst = fk.measure_family([1.0, 1.0], [1j, -2.0])
        assert inst.extras["absolutely_continuous"]
        assert np.allclose(inst.extras["density"], [1.0, 2.0])
        phase = inst.extras["phase"]
        assert abs(phase[0] - np.exp(1j * np.pi / 2)) <= 1e-15
        assert abs(phase[1] - np.exp(1j * np.pi)) <= 1e-15
        # multiplication witnesses reproduce the form against the weights
        recon = np.diag(np.array([1.0, 1.0]) * inst.extras["density"] * phase)
        assert np.allclose(recon, inst.omega.matrix, atol=1e-14)

    def test_disjoint_support_splits_all_singular(self):
        inst = fk.measure_family([0.0, 1.0], [3.0, 0.0])
        assert not inst.extras["absolutely_continuous"]
        ac, sing = fk.positive_lebesgue(inst.psi, inst.theta)
        assert np.array_equal(ac.matrix, np.zeros((2, 2)))
        assert np.array_equal(sing.matrix, inst.psi.matrix)

    def test_zero_weights(self):
        inst = fk.measure_family([1.0, 2.0], [0.0, 0.0])
        ac, sing = fk.positive_lebesgue(inst.psi, inst.theta)
        assert frob(ac.matrix) == 0.0 and frob(sing.matrix) == 0.0

    def test_validation(self):
        with pytest.raises(fk.ValidationError):
            fk.measure_family([1.0], [1.0, 2.0])
        with pytest.raises(fk.ValidationError):
            fk.measure_family([-1.0], [1.0])


class TestOperatorPairFamily:
    def test_identity_pair(self):
        inst = fk.operator_pair_family(np.eye(2), np.eye(2))
        assert np.array_equal(inst.omega.matrix, np.eye(2, dtype=complex))
        assert np.allclose(inst.psi.matrix, 3 * np.eye(2))
        assert np.allclose(inst.extras["H"], np.sqrt(3) * np.eye(2))

    def test_diagonal_pair(self):
        inst = fk.operator_pair_family(np.diag([1.0, 2.0]), np.eye(2))
        assert np.array_equal(inst.omega.matrix, np.diag([1.0 + 0j, 2.0]))
        member, margin = fk.in_class_M(inst.omega, inst.psi)
        assert member and margin > 0

    def test_random_pairs_member(self):
        rng = np.random.default_rng(60)
        for _ in range(10):
            s = complex_randn(rng, 4, 4)
            t = complex_randn(rng, 4, 4)
            inst = fk.operator_pair_family(s, t)
            member, _ = fk.in_class_M(inst.omega, inst.psi)
            assert member


class TestHullNesting:
    def test_support_monotone_in_size(self):
        small = fk.numerical_range_hull(fk.diag_family(rotating_diagonal(8)).omega, 180)
        large = fk.numerical_range_hull(fk.diag_family(rotating_diagonal(16)).omega, 180)
        assert np.all(small.support <= large.support + 1e-9)


class TestLambdaValues:
    def test_expression(self):
        values = _lambda_values("n*exp(i*n)", 4)
        expected = np.array([n * np.exp(1j * n) for n in range(1, 5)])
        assert np.allclose(values, expected, atol=1e-14)

    def test_literal_list(self):
        values = _lambda_values([1.0, 2.0, 3.0], 2)
        assert np.array_equal(values, [1.0, 2.0])

    def test_rejects_unknown_names(self):
        with pytest.raises(fk.ValidationError):
            _lambda_values("__import__('os')", 2)
        with pytest.raises(fk.ValidationError):
            _lambda_values("open('x')", 2)


class TestConvergenceReport:
    def test_constant_family_constant_diagnostics(self):
        rows = fk.convergence_report("diag", {"lambda": "1"}, [2, 4, 8], hull_grid=90)
        for key in ("re_spectrum_min", "hull_radius", "resolvent_norm"):
            vals = [row[key] for row in rows]
            assert max(vals) - min(vals) <= 1e-9

    def test_rotating_family_semibound_decays(self):
        rows = fk.convergence_report(
            "diag", {"lambda": "n*exp(i*n)"}, [8, 16, 32], hull_grid=90
        )
        mins = [row["re_spectrum_min"] for row in rows]
        assert all(b <= a + 1e-12 for a, b in zip(mins, mins[1:]))
        for row in rows:
            assert row["probe_distance"] > 0
            assert row["resolvent_norm"] is not None

    def test_validation(self):
        with pytest.raises(fk.ValidationError):
            fk.convergence_report("diag", {"lambda": "1"}, [8, 4])
        with pytest.raises(fk.ValidationError):
            fk.convergence_report("measure", {}, [2, 3])
