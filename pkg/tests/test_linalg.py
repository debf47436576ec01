import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krein_spectra import linalg
from krein_spectra.errors import NoConvergence, NotPositiveDefinite, OnEigenvalue


def random_spd(rng, n, shift=1.0):
    R = rng.standard_normal((n, n))
    return R.T @ R + shift * np.eye(n)


def random_sym(rng, n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


def sturm_count(diag, off, x):
    """Eigenvalues of a symmetric tridiagonal matrix below ``x`` (Sturm sequence)."""
    count, q = 0, 1.0
    for i, d in enumerate(diag):
        q = d - x - (off[i - 1] ** 2 / q if i else 0.0)
        if q == 0.0:
            q = 1e-300
        count += q < 0
    return count


def sturm_eigenvalues(diag, off):
    radius = max(abs(d) for d in diag) + 2 * max(abs(e) for e in off)
    out = []
    for k in range(len(diag)):
        lo, hi = -radius, radius
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if sturm_count(diag, off, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


class TestCholesky:
    def test_identity(self, backend):
        np.testing.assert_array_equal(linalg.cholesky(np.eye(3)), np.eye(3))

    def test_two_by_two(self, backend):
        L = linalg.cholesky([[4.0, 2.0], [2.0, 5.0]])
        np.testing.assert_allclose(L, [[2.0, 0.0], [1.0, 2.0]], atol=1e-15)

    def test_random_reconstruction(self, backend, rng):
        M = random_spd(rng, 8)
        L = linalg.cholesky(M)
        assert np.allclose(L, np.tril(L))
        assert np.max(np.abs(L @ L.T - M)) < 1e-10
        assert np.max(np.abs(L @ L.T - M)) <= 1e-12 * np.max(np.abs(M)) * 10

    def test_indefinite_raises(self, backend):
        with pytest.raises(NotPositiveDefinite) as info:
            linalg.cholesky(np.diag([1.0, -1.0, 2.0]))
        assert info.value.index == 1

    def test_rejects_nonsymmetric(self, backend):
        with pytest.raises(ValueError):
            linalg.cholesky([[1.0, 2.0], [0.0, 1.0]])


class TestInertia:
    def test_diagonal(self, backend):
        assert linalg.ldlt_inertia(np.diag([2.0, -1.0, 0.0]), 1e-12) == linalg.Inertia(1, 1, 1)

    def test_shifted_diagonal(self, backend):
        assert linalg.ldlt_inertia(np.diag([2.0, 5.0]) - 3 * np.eye(2)) == linalg.Inertia(1, 0, 1)

    def test_needs_two_by_two_pivot(self, backend):
        assert linalg.ldlt_inertia([[0.0, 1.0], [1.0, 0.0]]) == linalg.Inertia(1, 0, 1)

    def test_matches_eigensolve(self, backend, rng):
        for _ in range(20):
            M = random_sym(rng, 10)
            w = np.linalg.eigvalsh(M)
            got = linalg.ldlt_inertia(M)
            assert got.n_minus == np.sum(w < 0)
            assert got.order == 10

    def test_singular_rank_deficient(self, backend, rng):
        R = rng.standard_normal((6, 3))
        got = linalg.ldlt_inertia(R @ R.T - 0.0)
        assert got == linalg.Inertia(0, 3, 3)

    def test_negative_tolerance(self, backend):
        with pytest.raises(ValueError):
            linalg.ldlt_inertia(np.eye(2), -1.0)

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
    def test_congruence_invariance(self, seed, n):
        rng = np.random.default_rng(seed)
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        d = rng.choice([-1.0, 1.0], n) * rng.uniform(0.1, 2.0, n)
        M = q @ np.diag(d) @ q.T
        C = rng.standard_normal((n, n)) + 3 * np.eye(n)
        for backend in linalg.available_backends():
            with linalg.use_backend(backend):
                a = linalg.ldlt_inertia(0.5 * (M + M.T))
                b = linalg.ldlt_inertia(0.5 * (C.T @ M @ C + (C.T @ M @ C).T))
            assert a == b == linalg.Inertia(int(np.sum(d < 0)), 0, int(np.sum(d > 0)))


class TestSymEig:
    def test_identity(self, backend):
        np.testing.assert_allclose(linalg.sym_eig(np.eye(4)).values, np.ones(4))

    def test_reflection(self, backend):
        np.testing.assert_allclose(linalg.sym_eig([[0.0, 1.0], [1.0, 0.0]]).values, [-1.0, 1.0], atol=1e-15)

    def test_wilkinson_against_sturm(self, backend):
        diag = [abs(i - 3) for i in range(7)]
        off = [1.0] * 6
        W = np.diag(diag).astype(float) + np.diag(off, 1) + np.diag(off, -1)
        expected = sturm_eigenvalues(diag, off)
        np.testing.assert_allclose(linalg.sym_eig(W).values, expected, atol=1e-10, rtol=0)

    def test_orthonormal_and_residual(self, backend, rng):
        M = random_sym(rng, 15)
        dec = linalg.sym_eig(M)
        assert np.all(np.diff(dec.values) >= 0)
        assert np.max(np.abs(dec.vectors.T @ dec.vectors - np.eye(15))) < 1e-10
        assert np.max(np.abs(M @ dec.vectors - dec.vectors * dec.values)) < 1e-10 * np.max(np.abs(M)) * 15

    def test_trace(self, backend, rng):
        for n in (1, 5, 20):
            M = random_sym(rng, n)
            assert abs(np.sum(linalg.sym_eig(M).values) - np.trace(M)) <= 1e-10 * n * np.max(np.abs(M))

    def test_sweep_budget(self, backend, rng):
        with pytest.raises(NoConvergence):
            linalg.sym_eig(random_sym(rng, 12), max_sweeps=1)

    def test_lapack_route_agrees(self, rng):
        M = random_sym(rng, 20)
        np.testing.assert_allclose(linalg.sym_eig(M, method="lapack").values, linalg.sym_eig(M).values,
                                   atol=1e-12)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            linalg.sym_eig(np.eye(2), method="qr")


class TestGenEig:
    def test_identity_b_matches_sym_eig(self, backend, rng):
        A = random_sym(rng, 9)
        np.testing.assert_allclose(linalg.gen_eig(A, np.eye(9)).values, linalg.sym_eig(A).values, atol=1e-12)

    def test_proportional_pencil(self, backend, rng):
        B = random_spd(rng, 7)
        np.testing.assert_allclose(linalg.gen_eig(2 * B, B).values, 2.0, rtol=1e-10)

    def test_b_orthonormal_and_residual(self, backend, rng):
        A, B = random_sym(rng, 12), random_spd(rng, 12)
        dec = linalg.gen_eig(A, B)
        assert np.max(np.abs(dec.vectors.T @ B @ dec.vectors - np.eye(12))) < 1e-10
        scale = np.max(np.abs(A)) + np.max(np.abs(dec.values)) * np.max(np.abs(B))
        assert np.max(linalg.residuals(A, B, dec)) <= 1e-8 * scale

    def test_indefinite_b(self, backend):
        with pytest.raises(NotPositiveDefinite):
            linalg.gen_eig(np.eye(2), np.diag([1.0, -1.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            linalg.gen_eig(np.eye(2), np.eye(3))


class TestPencilCount:
    def test_diagonal(self, backend):
        assert linalg.pencil_count_below(np.diag([1.0, 4.0, 9.0]), np.eye(3), 5.0) == 2

    def test_nonpositive_shift(self, backend, rng):
        A, B = random_spd(rng, 6), random_spd(rng, 6)
        assert linalg.pencil_count_below(A, B, 0.0) == 0
        assert linalg.pencil_count_below(A, B, -3.0) == 0

    def test_median(self, backend, rng):
        A, B = random_spd(rng, 12), random_spd(rng, 12)
        vals = linalg.gen_eig(A, B).values
        lam = 0.5 * (vals[5] + vals[6])
        assert linalg.pencil_count_below(A, B, lam) == 6

    def test_on_eigenvalue(self, backend):
        with pytest.raises(OnEigenvalue) as info:
            linalg.pencil_count_below(np.diag([1.0, 4.0, 9.0]), np.eye(3), 4.0)
        assert (info.value.count, info.value.n_zero) == (1, 1)
        assert linalg.pencil_count_below(np.diag([1.0, 4.0, 9.0]), np.eye(3), 4.0, strict=False) == 1

    def test_counts_match_eigensolve(self, backend, rng):
        for n in (2, 17, 60):
            A, B = random_sym(rng, n), random_spd(rng, n, shift=n)
            vals = linalg.gen_eig(A, B).values
            for lam in 0.5 * (vals[:-1] + vals[1:]):
                assert linalg.pencil_count_below(A, B, lam) == np.sum(vals < lam)


def test_backends_agree(rng):
    names = linalg.available_backends()
    M, B = random_sym(rng, 25), random_spd(rng, 25)
    results = []
    for name in names:
        with linalg.use_backend(name):
            results.append((linalg.gen_eig(M, B).values, linalg.ldlt_inertia(M), linalg.cholesky(B)))
    for vals, inertia, L in results[1:]:
        np.testing.assert_allclose(vals, results[0][0], rtol=1e-12, atol=1e-12)
        assert inertia == results[0][1]
        np.testing.assert_allclose(L, results[0][2], atol=1e-13)


def test_compiled_backend_is_default():
    if "cython" in linalg.available_backends():
        assert linalg.backend_name() == "cython"
    with pytest.raises(ValueError):
        linalg.set_backend("fortran")


def test_fallback_when_extension_missing():
    import subprocess
    import sys

    code = (
        "import sys; sys.modules['krein_spectra.linalg._kernels'] = None\n"
        "from krein_spectra import linalg\n"
        "assert linalg.backend_name() == 'python', linalg.backend_name()\n"
        "assert linalg.available_backends() == ['python']\n"
        "print(linalg.gen_eig([[2.0, 0.0], [0.0, 8.0]], [[1.0, 0.0], [0.0, 2.0]]).values)\n"
    )
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "[2. 4.]" in proc.stdout
