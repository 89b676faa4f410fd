import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dipolar_entanglement import analytic as A
from dipolar_entanglement.entanglement import concurrence
from dipolar_entanglement.errors import DomainError, NoRootInBracket
from dipolar_entanglement.spin_model import pair_hamiltonian
from dipolar_entanglement.thermal import gibbs, magnetization

mp.mp.dps = 50


def mp_a_pm(b, d, sinh_arg_div):
    """Radical terms written out literally at 50 digits; ``sinh_arg_div`` is 2 as printed, 4 corrected."""
    b, d = mp.mpf(b), mp.mpf(d)
    q = 16 * b**2 + 9 * d**2
    sq = mp.sqrt(q)
    cross = 6 * d * mp.sinh(sq / sinh_arg_div) * mp.sqrt(16 * b**2 + 9 * d**2 * mp.cosh(sq / 4) ** 2)
    base = 16 * b**2 + 9 * d**2 * mp.cosh(sq / 2)
    return [mp.sqrt((base + s * cross) / q) / 2 for s in (1, -1)]


def num_state(b, d):
    return gibbs(pair_hamiltonian(b, d)).rho


class TestAPlusMinus:
    def test_unit_point_against_high_precision(self):
        ap, am = A.a_plus_minus(1.0, 1.0)
        ref_p, ref_m = mp_a_pm(1, 1, 4)
        assert ap == pytest.approx(float(ref_p), rel=1e-14)
        assert am == pytest.approx(float(ref_m), rel=1e-14)

    def test_printed_unit_point_against_high_precision(self):
        ap, am = A.a_plus_minus(1.0, 1.0, "printed")
        ref_p, ref_m = mp_a_pm(1, 1, 2)
        assert ap == pytest.approx(float(ref_p), rel=1e-14)
        # the printed A- radicand is negative here: mpmath gives a complex value
        assert isinstance(ref_m, mp.mpc) and ref_m.imag != 0
        assert math.isnan(am)

    def test_zero_field_substitution(self):
        d = 2.0
        ap, am = A.a_plus_minus(0.0, d)
        s = 3 * d / 4
        # beta = 0: q = 9 d^2 and the radicand reduces to cosh(3d/2) +- 2 sinh(3d/4) cosh(3d/4)... / 1
        k = math.sinh(s)
        assert ap == pytest.approx(0.5 * (math.sqrt(1 + k * k) + k), rel=1e-13)
        assert am == pytest.approx(0.5 * (math.sqrt(1 + k * k) - k), rel=1e-13)

    def test_large_arguments_finite(self):
        ap, am = A.a_plus_minus(40.0, 40.0)
        assert math.isfinite(ap) and math.isfinite(am)
        # product identity A+ A- = 1/4 holds for the corrected form
        assert ap * am == pytest.approx(0.25, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            A.a_plus_minus(0.0, 0.0)
        with pytest.raises(ValueError):
            A.a_plus_minus(1.0, 1.0, "other")


class TestConcurrenceClosed:
    def test_high_temperature_separable(self):
        for b, d in [(0.1, 0.1), (0.5, 0.2), (0.01, 1.0)]:
            assert A.concurrence_closed(b, d) == 0.0

    def test_straddles_reported_boundary_at_d1(self):
        assert A.concurrence_closed(2.25, 1.0) == 0.0
        assert A.concurrence_closed(2.30, 1.0) > 0.0

    def test_matches_numeric(self):
        for b, d in [(5, 3), (2, 3), (10, 10), (3, 1), (0.5, 10)]:
            assert A.concurrence_closed(b, d) == pytest.approx(concurrence(num_state(b, d)).concurrence, abs=1e-12)

    def test_printed_variant_is_undefined_on_grid(self):
        assert math.isnan(A.concurrence_closed(5.0, 3.0, "printed"))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
    def test_bounded(self, b, d):
        if b == 0 and d == 0:
            return
        assert 0.0 <= A.concurrence_closed(b, d) <= 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            A.concurrence_closed(0.0, 0.0)
        with pytest.raises(DomainError):
            A.concurrence_closed(-1.0, 1.0)


class TestSmallD:
    @pytest.mark.parametrize("b", [0.0, 1.0, 10.0, 1000.0])
    def test_always_zero(self, b):
        assert A.concurrence_small_d(b) == 0.0

    def test_continuity(self):
        for b in (0.5, 2.0, 5.0):
            assert A.concurrence_closed(b, 1e-6) == 0.0


class TestMagnetizationClosed:
    def test_zero_field(self):
        for v in A.VARIANTS:
            assert A.magnetization_closed(0.0, 2.0, v) == 0.0

    def test_saturation(self):
        # far beyond the d-dependent correction, which decays like 9 d^2 / (32 beta^2)
        assert A.magnetization_closed(1e4, 3.0) == pytest.approx(-1.0, abs=1e-6)
        assert abs(A.magnetization_closed(1e4, 3.0, "printed")) < 1e-3
        m_num = magnetization(num_state(50.0, 3.0), 2)
        assert A.magnetization_closed(50.0, 3.0) == pytest.approx(m_num, abs=1e-12)

    def test_matches_numeric_at_2_3(self):
        m_num = magnetization(num_state(2.0, 3.0), 2)
        assert A.magnetization_closed(2.0, 3.0) == pytest.approx(m_num, abs=1e-10)
        assert abs(A.magnetization_closed(2.0, 3.0, "printed") - m_num) > 0.1

    def test_domain(self):
        with pytest.raises(DomainError):
            A.magnetization_closed(1.0, 0.0)


class TestBoundary:
    def test_d1(self):
        p = A.boundary_beta_analytic(1.0)
        assert 2.21 <= p.beta_c <= 2.31
        assert abs(p.residual) <= 1e-10
        assert abs(A.boundary_residual(p.beta_c, 1.0)) <= 1e-10

    def test_diverges_as_d_vanishes(self):
        b = [A.boundary_beta_analytic(d).beta_c for d in (0.01, 0.1, 1.0)]
        assert b[0] > b[1] > b[2]

    def test_sign_consistency(self):
        for d in (0.5, 1.0, 3.0, 8.0):
            bc = A.boundary_beta_analytic(d).beta_c
            assert A.concurrence_closed(bc - 1e-9, d) == 0.0
            assert A.concurrence_closed(bc + 1e-9, d) > 0.0

    def test_numeric_d1(self):
        p = A.boundary_beta_numeric(1.0)
        assert 2.21 <= p.beta_c <= 2.31

    def test_numeric_and_analytic_agree(self):
        for d in (0.5, 1.0, 2.0, 5.0, 10.0):
            a, n = A.boundary_beta_analytic(d), A.boundary_beta_numeric(d)
            assert abs(a.beta_c - n.beta_c) <= 1e-6

    def test_monotone_decreasing(self):
        ds = np.linspace(0.5, 10.0, 20)
        bc = [A.boundary_beta_analytic(d).beta_c for d in ds]
        assert all(y < x for x, y in zip(bc, bc[1:]))

    def test_ray_crossing_lies_on_boundary(self):
        for ratio in (0.25, 3.0):
            p = A.boundary_beta_on_ray(ratio)
            assert p.d == pytest.approx(ratio * p.beta_c)
            assert A.boundary_beta_analytic(p.d).beta_c == pytest.approx(p.beta_c, abs=1e-8)
            assert A.boundary_beta_on_ray(ratio, "numeric").beta_c == pytest.approx(p.beta_c, abs=1e-8)

    def test_errors(self):
        with pytest.raises(DomainError):
            A.boundary_beta_analytic(0.0)
        with pytest.raises(NoRootInBracket):
            A._bisect(lambda x: x + 1.0, 0.0, 1.0, 1e-10)


class TestValidation:
    def test_selection_matches_frozen_constants(self):
        rep = A.validate_closed_forms()
        assert rep.selected_concurrence == A.SELECTED_CONCURRENCE_VARIANT
        assert rep.selected_magnetization == A.SELECTED_MAGNETIZATION_VARIANT
        assert rep.consistent
        assert rep.concurrence_nan_count["printed"] == 400
        assert rep.notes  # printed-form discrepancies are documented

    def test_report_dict(self):
        d = A.validate_closed_forms([1.0, 5.0], [1.0, 3.0]).as_dict()
        assert d["grid_points"] == 4
        assert d["selected_concurrence_variant"] == "corrected"
