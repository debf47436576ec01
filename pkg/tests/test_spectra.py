import math

import numpy as np
import pytest

from krein_spectra import linalg
from krein_spectra.basis import BasisSpec, Box, CellUnion, Interval, build_basis
from krein_spectra.bounds import BoundParams, krein_bound
from krein_spectra.errors import BracketingFailure, ValidationError
from krein_spectra.forms import assemble_forms
from krein_spectra.spectra import (
    bisect,
    bound_params,
    buckling_characteristic,
    counting_curve,
    default_lambda_grid,
    friedrichs_spectrum,
    krein_bc_check,
    krein_positive_spectrum,
    l2_project,
    oracle_1d_friedrichs,
    oracle_1d_krein,
    oracle_count_below,
)

# k^4 for the first three roots of the clamped 8x8 determinant of u'''''''' = k^4 u'''' on (0, 1),
# computed once with mpmath at 50 digits from the unreduced determinant
M2_KREIN = [12319.415731870428696, 29090.686781004904635, 83794.48211092892995]


def forms_for(dom, **kw):
    return assemble_forms(build_basis(dom, BasisSpec(**kw)))


@pytest.fixture(scope="module")
def unit_m1():
    return assemble_forms(build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64)))


@pytest.fixture(scope="module")
def unit_m1_spectrum(unit_m1):
    return krein_positive_spectrum(unit_m1)


class TestOracle:
    def test_first_values(self):
        vals = oracle_1d_krein((0.0, 1.0), 5)
        assert vals[0] == pytest.approx(4 * math.pi ** 2, rel=1e-14)
        assert vals[1] == pytest.approx(80.7629, abs=1e-4)
        assert math.sqrt(vals[1]) == pytest.approx(8.98682, abs=1e-5)
        assert vals[2] == pytest.approx(16 * math.pi ** 2, rel=1e-14)
        assert np.all(np.diff(vals) > 0)

    def test_roots_are_roots(self):
        for lam in oracle_1d_krein((0.0, 1.0), 12):
            z = math.sqrt(lam)
            assert abs(buckling_characteristic(z)) < 1e-12 * max(1.0, z)

    def test_second_family(self):
        vals = oracle_1d_krein((0.0, 1.0), 10)
        for lam in vals[1::2]:
            k = math.sqrt(lam)
            assert abs(math.tan(k / 2) - k / 2) < 1e-10 * k
        for j, lam in enumerate(vals[0::2], start=1):
            assert math.sqrt(lam) == pytest.approx(2 * math.pi * j, rel=1e-14)

    def test_scaling(self):
        np.testing.assert_allclose(oracle_1d_krein((0.0, 2.0), 8), oracle_1d_krein((0.0, 1.0), 8) / 4,
                                   rtol=1e-14)
        np.testing.assert_allclose(oracle_1d_krein(Interval(3.0, 4.0), 4), oracle_1d_krein((0.0, 1.0), 4),
                                   rtol=1e-14)

    def test_upper_cutoff(self):
        vals = oracle_1d_krein((0.0, 1.0), upper=1000.0)
        assert np.all(vals < 1000.0)
        assert len(vals) == oracle_count_below((0.0, 1.0), 1000.0)
        assert oracle_1d_krein((0.0, 1.0), len(vals) + 1)[-1] >= 1000.0

    def test_arguments(self):
        with pytest.raises(ValueError):
            oracle_1d_krein((0.0, 1.0))
        with pytest.raises(ValueError):
            oracle_1d_krein((1.0, 0.0), 3)
        with pytest.raises(ValueError):
            oracle_1d_krein((0.0, 1.0), 3, m=3)

    def test_bisect(self):
        assert bisect(math.cos, 1.0, 2.0) == pytest.approx(math.pi / 2, rel=1e-15)
        with pytest.raises(BracketingFailure):
            bisect(math.cos, 2.0, 3.0)

    def test_m2_determinant(self):
        vals = oracle_1d_krein((0.0, 1.0), 3, m=2)
        np.testing.assert_allclose(vals, M2_KREIN, rtol=1e-12)
        np.testing.assert_allclose(oracle_1d_krein((0.0, 2.0), 3, m=2), np.array(M2_KREIN) / 16, rtol=1e-12)

    def test_friedrichs_oracles(self):
        np.testing.assert_allclose(oracle_1d_friedrichs((0.0, 1.0), 3), [math.pi ** 2, 4 * math.pi ** 2,
                                                                        9 * math.pi ** 2])
        for lam in oracle_1d_friedrichs((0.0, 1.0), 4, m=2):
            k = lam ** 0.25
            assert abs(math.cos(k) * math.cosh(k) - 1) < 1e-9 * math.cosh(k)
        assert oracle_1d_friedrichs((0.0, 1.0), 1, m=2)[0] == pytest.approx(500.5639, abs=1e-4)


class TestKreinSpectrum:
    def test_against_oracle(self, unit_m1_spectrum):
        disc = unit_m1_spectrum.eigenvalues[:5]
        rel = disc / oracle_1d_krein((0.0, 1.0), 5) - 1
        assert np.all(rel >= 0)
        assert np.all(rel <= 1e-6)

    def test_positive_and_sized(self, unit_m1, unit_m1_spectrum):
        assert np.all(unit_m1_spectrum.eigenvalues > 0)
        assert len(unit_m1_spectrum) == unit_m1.size
        assert unit_m1_spectrum.max_residual < 1e-10

    def test_b_orthonormal(self, unit_m1, unit_m1_spectrum):
        V = unit_m1_spectrum.vectors
        assert np.max(np.abs(V.T @ unit_m1.B @ V - np.eye(unit_m1.size))) < 1e-8

    def test_refinement_decreases(self):
        prev = None
        for cells in (8, 16, 32):
            vals = krein_positive_spectrum(forms_for(Interval(0.0, 1.0), m=1, degree=3, cells=cells)).eigenvalues[:4]
            if prev is not None:
                assert np.all(vals <= prev * (1 + 1e-12))
            prev = vals
        assert np.all(prev >= oracle_1d_krein((0.0, 1.0), 4))

    def test_m2_from_above(self):
        exact = np.array(M2_KREIN)
        prev = None
        for cells in (16, 32, 64):
            vals = krein_positive_spectrum(forms_for(Interval(0.0, 1.0), m=2, degree=5, cells=cells)).eigenvalues[:3]
            assert np.all(vals >= exact)
            if prev is not None:
                assert np.all(vals < prev)
            prev = vals
        assert prev[0] / exact[0] - 1 < 2e-6

    def test_m2_high_degree(self):
        vals = krein_positive_spectrum(forms_for(Interval(0.0, 1.0), m=2, degree=7, cells=48)).eigenvalues[:3]
        np.testing.assert_allclose(vals, M2_KREIN, rtol=1e-8)

    def test_non_conforming_space_rejected(self):
        f = forms_for(Interval(0.0, 1.0), m=1, cells=16, vanish_order=1)
        with pytest.raises(ValidationError):
            krein_positive_spectrum(f)

    def test_square_first_eigenvalue(self):
        # clamped plate buckling on the unit square: 52.3447... (shared with the literature to 4 digits)
        f = forms_for(Box((0, 0), (1, 1)), m=1, degree=5, cells=10)
        assert krein_positive_spectrum(f).eigenvalues[0] == pytest.approx(52.345, rel=2e-4)

    def test_lapack_route(self, unit_m1, unit_m1_spectrum):
        alt = krein_positive_spectrum(unit_m1, method="lapack")
        np.testing.assert_allclose(alt.eigenvalues[:10], unit_m1_spectrum.eigenvalues[:10], rtol=1e-10)


class TestFriedrichs:
    def test_dirichlet_laplacian(self):
        f = forms_for(Interval(0.0, 1.0), m=1, degree=5, cells=64, vanish_order=1)
        vals = friedrichs_spectrum(f).eigenvalues[:3]
        np.testing.assert_allclose(vals, [9.8696044, 39.4784176, 88.8264396], rtol=1e-6)
        # discretization error is below round-off here, so "from above" holds to round-off only
        assert np.all(vals >= oracle_1d_friedrichs((0.0, 1.0), 3) * (1 - 1e-11))

    def test_clamped_beam(self):
        f = forms_for(Interval(0.0, 1.0), m=2, degree=5, cells=64, vanish_order=2)
        vals = friedrichs_spectrum(f).eigenvalues[:3]
        np.testing.assert_allclose(vals, oracle_1d_friedrichs((0.0, 1.0), 3, m=2), rtol=1e-6)

    @pytest.mark.parametrize("dom,kw", [
        (Interval(0.0, 1.0), dict(m=1, cells=24)),
        (Interval(0.0, 1.0), dict(m=2, cells=24)),
        (Box((0, 0), (1, 1)), dict(m=1, degree=3, cells=8)),
        (CellUnion.l_shape(), dict(m=1, degree=3, refine=4)),
    ])
    def test_ordering_on_shared_space(self, dom, kw):
        f = forms_for(dom, **kw)
        k = krein_positive_spectrum(f).eigenvalues
        mu = friedrichs_spectrum(f).eigenvalues
        assert np.all(mu <= k * (1 + 1e-12))


class TestCountingCurve:
    def test_lambda_100(self, unit_m1):
        curve = counting_curve(unit_m1, [100.0])
        assert curve.counts[0] == 2
        assert curve.bound_values[0] == pytest.approx(4.1094, abs=1e-4)
        assert curve.weyl_values[0] == pytest.approx(10 / math.pi)

    def test_below_first(self, unit_m1):
        assert counting_curve(unit_m1, [1.0, 39.0]).counts.tolist() == [0, 0]

    def test_inertia_matches_full_solve(self, unit_m1, unit_m1_spectrum):
        grid = default_lambda_grid(unit_m1_spectrum.eigenvalues)
        curve = counting_curve(unit_m1, grid)
        fried = friedrichs_spectrum(unit_m1)
        for lam, c, fc, on in zip(grid, curve.counts, curve.friedrichs_counts, curve.on_eigenvalue):
            assert not on
            assert c == unit_m1_spectrum.count_below(lam)
            assert fc == fried.count_below(lam)
        assert np.all(np.diff(curve.counts) >= 0)
        assert np.all(curve.counts <= unit_m1.size)
        assert np.all(curve.friedrichs_counts >= curve.counts)
        assert curve.bound_violations().size == 0

    def test_on_eigenvalue_flag(self):
        f = forms_for(Interval(0.0, 1.0), m=1, degree=3, cells=8)
        lam = krein_positive_spectrum(f).eigenvalues[1]
        curve = counting_curve(f, [lam], friedrichs=False)
        assert curve.on_eigenvalue[0]
        assert curve.counts[0] in (1, 2)

    def test_grid(self, unit_m1_spectrum):
        ev = unit_m1_spectrum.eigenvalues
        grid = default_lambda_grid(ev, 1.2)
        assert grid[0] == pytest.approx(ev[0] / 2)
        assert grid[-1] <= ev[len(ev) // 2 - 1]
        np.testing.assert_allclose(grid[1:] / grid[:-1], 1.2)
        with pytest.raises(ValueError):
            default_lambda_grid(ev, 1.0)

    def test_invalid_grid(self, unit_m1):
        for bad in ([], [2.0, 1.0], [-1.0, 3.0]):
            with pytest.raises(ValueError):
                counting_curve(unit_m1, bad)

    def test_refinement_counts_grow(self):
        grid = np.geomspace(20.0, 2000.0, 25)
        coarse = counting_curve(forms_for(Interval(0.0, 1.0), m=1, degree=3, cells=12), grid).counts
        fine = counting_curve(forms_for(Interval(0.0, 1.0), m=1, degree=3, cells=24), grid).counts
        exact = np.array([oracle_count_below((0.0, 1.0), lam) for lam in grid])
        assert np.all(coarse <= fine)
        assert np.all(fine <= exact)

    def test_bound_params(self, unit_m1):
        assert bound_params(unit_m1) == BoundParams(1, 1, 1.0)
        lshape = forms_for(CellUnion.l_shape(), m=1, degree=3, refine=4)
        assert bound_params(lshape).volume == pytest.approx(8 / 9)
        assert krein_bound(bound_params(lshape), 100.0) > 0


class TestBoundaryCondition:
    def test_first_eigenpair(self, unit_m1, unit_m1_spectrum):
        lam, u = unit_m1_spectrum.eigenvalues[0], unit_m1_spectrum.vectors[:, 0]
        res = krein_bc_check(unit_m1, lam, u)
        assert res <= 1e-4
        assert krein_bc_check(unit_m1, lam, -37.5 * u) == pytest.approx(res, rel=1e-9)

    def test_second_family_pair(self, unit_m1, unit_m1_spectrum):
        lam, u = unit_m1_spectrum.eigenvalues[1], unit_m1_spectrum.vectors[:, 1]
        assert krein_bc_check(unit_m1, lam, u) <= 1e-3

    def test_converges_under_refinement(self):
        res = []
        for cells in (16, 32, 64):
            f = forms_for(Interval(0.0, 1.0), m=1, degree=5, cells=cells)
            s = krein_positive_spectrum(f)
            res.append(krein_bc_check(f, s.eigenvalues[0], s.vectors[:, 0]))
        assert res[0] > res[1] > res[2]

    def test_sine_negative_control(self):
        full = build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64, boundary="none"))
        coeffs = l2_project(full, lambda x: np.sin(np.pi * x))
        assert krein_bc_check(full, math.pi ** 2, coeffs) > 0.1

    def test_exact_profile(self):
        # u = 1 - cos(2 pi x) is the first buckling mode; its projection passes the check
        full = build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64, boundary="none"))
        coeffs = l2_project(full, lambda x: 1 - np.cos(2 * np.pi * x))
        assert krein_bc_check(full, 4 * math.pi ** 2, coeffs) <= 1e-4

    def test_requires_interval(self):
        f = forms_for(Box((0, 0), (1, 1)), m=1, degree=3, cells=6)
        with pytest.raises(ValueError):
            krein_bc_check(f, 1.0, np.ones(f.size))


def test_inertia_agrees_with_linalg(unit_m1, unit_m1_spectrum):
    ev = unit_m1_spectrum.eigenvalues
    for lam in 0.5 * (ev[:10] + ev[1:11]):
        assert linalg.pencil_count_below(unit_m1.A, unit_m1.B, lam) == unit_m1_spectrum.count_below(lam)
