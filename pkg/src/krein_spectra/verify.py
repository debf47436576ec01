"""Invariant suite behind ``krein-spectra verify``.

Problem checks run on the configured domain; reference checks use fixed
problems with closed-form answers. Every check records the statement it
certifies.
"""
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import bounds, linalg
from .basis import BasisSpec, Box, CellUnion, Interval, build_basis
from .errors import NumericalError
from .forms import assemble_forms, multinomial_weights
from .spectra import (
    counting_curve,
    default_lambda_grid,
    friedrichs_spectrum,
    krein_bc_check,
    krein_positive_spectrum,
    l2_project,
    oracle_1d_krein,
    oracle_count_below,
)

# refinement check is skipped above this trial-space size
MAX_REFINED_SIZE = 1500


@dataclass
class Check:
    name: str
    certifies: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def as_dict(self):
        return asdict(self)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        check = fn(*args, **kwargs)
        check.seconds = time.perf_counter() - t0
        return check

    wrapper.__name__ = fn.__name__
    return wrapper


def refined_spec(spec, domain):
    if isinstance(domain, CellUnion):
        return BasisSpec(m=spec.m, degree=spec.degree, refine=2 * spec.refine, boundary=spec.boundary)
    return BasisSpec(m=spec.m, degree=spec.degree, cells=2 * spec.cells, boundary=spec.boundary,
                     vanish_order=spec.vanish_order)


@dataclass
class Problem:
    forms: object
    krein: object
    friedrichs: object
    grid: np.ndarray
    curve: object


def solve_problem(domain, spec, lambdas=None, ratio=1.2, method="jacobi"):
    forms = assemble_forms(build_basis(domain, spec))
    krein = krein_positive_spectrum(forms, method)
    fried = friedrichs_spectrum(forms, method)
    grid = default_lambda_grid(krein.eigenvalues, ratio) if lambdas is None else np.asarray(lambdas, float)
    return Problem(forms, krein, fried, grid, counting_curve(forms, grid))


# -- checks on the configured problem ----------------------------------------


@_timed
def check_bound(prob):
    c = prob.curve
    bad = c.bound_violations()
    worst = float(np.max(c.counts - c.bound_values))
    return Check("krein_count_bound",
                 "N_h(lambda) <= (2pi)^-n v_n |Omega| (1 + 2m/(2m+n))^(n/2m) lambda^(n/2m)",
                 bad.size == 0, f"{c.lambdas.size} grid points, max(count - bound) = {worst:.6g}")


@_timed
def check_ordering(prob):
    k, f = prob.krein.eigenvalues, prob.friedrichs.eigenvalues
    values_ok = bool(np.all(f <= k * (1 + 1e-12)))
    counts_ok = bool(np.all(prob.curve.friedrichs_counts >= prob.curve.counts))
    return Check("friedrichs_krein_ordering",
                 "mu_F,j <= lambda_K,j and N(lambda, Friedrichs) >= N(lambda, Krein)",
                 values_ok and counts_ok, f"eigenvalue ordering {values_ok}, count ordering {counts_ok}")


@_timed
def check_inertia_counts(prob):
    c = prob.curve
    off = ~c.on_eigenvalue
    expected = np.array([prob.krein.count_below(lam) for lam in c.lambdas])
    fexpected = np.array([prob.friedrichs.count_below(lam) for lam in c.lambdas])
    ok = bool(np.all(expected[off] == c.counts[off]) and np.all(fexpected[off] == c.friedrichs_counts[off]))
    return Check("inertia_matches_eigensolve",
                 "n_-(A - lambda B) = #{pencil eigenvalues < lambda} (Sylvester inertia)",
                 ok, f"{int(off.sum())} off-spectrum grid points compared")


@_timed
def check_positive_forms(prob):
    f = prob.forms
    diag_ok = all(np.all(np.diag(mat) > 0) for mat in (f.A, f.B, f.M))
    try:
        for mat in (f.A, f.B, f.M):
            linalg.cholesky(mat)
        pd = True
    except NumericalError:
        pd = False
    return Check("forms_positive_definite",
                 "(-Delta)^m is strictly positive on the conforming trial space",
                 pd and diag_ok, f"size {f.size}, Cholesky of A, B, M {'ok' if pd else 'failed'}")


@_timed
def check_cauchy_schwarz(prob, rng, trials=500):
    f = prob.forms
    U = rng.standard_normal((f.size, trials))
    a = np.einsum("ij,ij->j", U, f.A @ U)
    b = np.einsum("ij,ij->j", U, f.B @ U)
    m = np.einsum("ij,ij->j", U, f.M @ U)
    ratio = float(np.max(b * b / (m * a)))
    return Check("cauchy_schwarz_chain", "(u^T B u)^2 <= (u^T M u)(u^T A u)",
                 ratio <= 1 + 1e-10, f"max ratio {ratio:.12g} over {trials} vectors")


@_timed
def check_residuals(prob):
    worst = max(prob.krein.max_residual, prob.friedrichs.max_residual)
    return Check("eigen_residuals", "|A v - lambda B v| <= 1e-8 (|A| + |lambda| |B|)",
                 worst <= 1e-8, f"max normalized residual {worst:.3g}")


@_timed
def check_refinement(prob, domain, spec):
    fine_spec = refined_spec(spec, domain)
    fine_basis = build_basis(domain, fine_spec)
    if len(fine_basis) > MAX_REFINED_SIZE:
        return Check("refinement_monotonicity", "counts do not decrease on nested refinement", True,
                     f"skipped: refined size {len(fine_basis)} > {MAX_REFINED_SIZE}")
    fine = counting_curve(assemble_forms(fine_basis), prob.grid, friedrichs=False)
    ok = bool(np.all(fine.counts >= prob.curve.counts))
    return Check("refinement_monotonicity", "counts do not decrease on nested refinement", ok,
                 f"sizes {prob.forms.size} -> {len(fine_basis)}")


def problem_checks(domain, spec, rng, lambdas=None, ratio=1.2, method="jacobi"):
    prob = solve_problem(domain, spec, lambdas, ratio, method)
    checks = [
        check_positive_forms(prob),
        check_cauchy_schwarz(prob, rng),
        check_residuals(prob),
        check_bound(prob),
        check_ordering(prob),
        check_inertia_counts(prob),
        check_refinement(prob, domain, spec),
    ]
    return prob, checks


# -- reference checks ---------------------------------------------------------


@_timed
def check_oracle_agreement(count=5, tol=1e-6):
    forms = assemble_forms(build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64)))
    disc = krein_positive_spectrum(forms).eigenvalues[:count]
    exact = oracle_1d_krein((0.0, 1.0), count)
    rel = disc / exact - 1.0
    ok = bool(np.all(rel >= -1e-12) and np.all(rel <= tol))
    return Check("oracle_agreement_1d",
                 "discrete buckling eigenvalues on (0,1) match roots of 2(1 - cos k) - k sin k from above",
                 ok, f"max relative error {np.max(np.abs(rel)):.3g} over {count} eigenvalues")


@_timed
def check_boundary_condition():
    forms = assemble_forms(build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64)))
    spec = krein_positive_spectrum(forms)
    res = krein_bc_check(forms, spec.eigenvalues[0], spec.vectors[:, 0])
    full = build_basis(Interval(0.0, 1.0), BasisSpec(m=1, degree=5, cells=64, boundary="none"))
    control = krein_bc_check(full, math.pi ** 2, l2_project(full, lambda x: np.sin(np.pi * x)))
    return Check("krein_boundary_condition",
                 "v = -u''/lambda satisfies v'(a) = v'(b) = (v(b) - v(a))/(b - a)",
                 res <= 1e-4 and control > 0.1, f"residual {res:.3g}, sin(pi x) control {control:.3g}")


@_timed
def check_constant_identity(tol=1e-6):
    worst = 0.0
    for n in (1, 2, 3):
        for m in (1, 2, 3):
            worst = max(worst, bounds.minimize_constant(n, m).rel_error)
    spot = bounds.bound_constant_numeric(1, 1)
    ok = worst <= tol and abs(spot - 2.58199) <= 1e-5
    return Check("constant_identity",
                 "min_alpha alpha^-1 int [alpha - |xi|^4m + |xi|^2m]_+ = v_n (1 + 2m/(2m+n))^(n/2m)",
                 ok, f"max relative error {worst:.3g} on n, m in 1..3; n = m = 1 gives {spot:.8f}")


@_timed
def check_superiority(top=5):
    ok = True
    for n in range(1, top + 1):
        for m in range(1, top + 1):
            # equal exponents n/(2m): comparing the bases exactly suffices
            ok &= 1 + Fraction(2 * m, 2 * m + n) < 1 + Fraction(2 * m, n)
            ok &= bounds.krein_factor(n, m) < bounds.laptev_factor(n, m)
    return Check("superiority", "(1 + 2m/(2m+n))^(n/2m) < (1 + 2m/n)^(n/2m)", bool(ok),
                 f"n, m in 1..{top}")


@_timed
def check_sandwich(rng):
    ok = True
    for n in (1, 2, 3):
        for m in (1, 2, 3):
            params = bounds.BoundParams(n, m, 1.0)
            for lam in 10.0 ** rng.uniform(-3, 6, size=20):
                w = bounds.weyl_leading(params, lam)
                k = bounds.krein_bound(params, lam)
                f = bounds.laptev_friedrichs_bound(params, lam)
                ok &= w < k < f
    return Check("bound_sandwich", "Weyl term < Krein bound < Friedrichs bound", bool(ok),
                 "n, m in 1..3, 20 random lambda each")


@_timed
def check_constant_monotone():
    ok = True
    for m in (1, 2, 3):
        vals = [(2 * math.pi) ** -n * bounds.krein_constant(n, m) for n in range(1, 9)]
        ok &= all(b < a for a, b in zip(vals, vals[1:]))
    return Check("constant_monotone_in_n", "(2pi)^-n v_n (1 + 2m/(2m+n))^(n/2m) decreases in n",
                 bool(ok), "n in 1..8, m in 1..3")


@_timed
def check_weyl(lam=1e6):
    count = oracle_count_below((0.0, 1.0), lam)
    ratio = count * math.pi / math.sqrt(lam)
    return Check("weyl_consistency", "N(lambda) ~ (2pi)^-n v_n |Omega| lambda^(n/2m) on (0,1)",
                 abs(ratio - 1) < 0.01, f"N({lam:g}) = {count}, ratio {ratio:.6f}")


def _laplacian_energy(basis, coeffs):
    """Quadrature of (Delta u)^2 and of the weighted second derivatives from point values."""
    nodes, weights = zip(*(ax.quadrature() for ax in basis.axes))
    w = np.multiply.outer(weights[0], weights[1])
    uxx = basis.grid_values(coeffs, nodes, (2, 0))
    uyy = basis.grid_values(coeffs, nodes, (0, 2))
    uxy = basis.grid_values(coeffs, nodes, (1, 1))
    lap = np.sum(w * (uxx + uyy) ** 2)
    parts = np.sum(w * uxx ** 2) + 2 * np.sum(w * uxy ** 2) + np.sum(w * uyy ** 2)
    return lap, parts


@_timed
def check_multinomial_identity(rng, trials=100):
    ok = all(sum(multinomial_weights(k, n).values()) == n ** k for k in range(1, 6) for n in range(1, 5))
    basis = build_basis(Box((0.0, 0.0), (1.0, 1.0)), BasisSpec(m=1, degree=3, cells=8))
    forms = assemble_forms(basis)
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(len(basis))
        lap, parts = _laplacian_energy(basis, u)
        quad = u @ forms.A @ u
        worst = max(worst, abs(lap / parts - 1), abs(quad / lap - 1))
    return Check("multinomial_identity",
                 "int (Delta u)^2 = int u_xx^2 + 2 u_xy^2 + u_yy^2 = u^T A u",
                 ok and worst <= 1e-6, f"max relative gap {worst:.3g} over {trials} vectors")


@_timed
def check_congruence(rng, trials=100):
    ok = True
    for _ in range(trials):
        n = int(rng.integers(1, 11))
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        d = rng.choice([-1.0, 1.0], n) * rng.uniform(0.1, 2.0, n)
        M = q @ np.diag(d) @ q.T
        M = 0.5 * (M + M.T)
        C = rng.standard_normal((n, n)) + 2 * np.eye(n)
        expected = (int(np.sum(d < 0)), 0, int(np.sum(d > 0)))
        for mat in (M, C.T @ M @ C):
            got = linalg.ldlt_inertia(0.5 * (mat + mat.T))
            ok &= (got.n_minus, got.n_zero, got.n_plus) == expected
    return Check("sylvester_congruence", "inertia(C^T M C) = inertia(M)", bool(ok),
                 f"{trials} random congruences, orders 1..10")


@_timed
def check_pencil_counts(rng, trials=20):
    ok = True
    for _ in range(trials):
        n = int(rng.integers(2, 61))
        R = rng.standard_normal((n, n))
        A = R @ R.T + np.eye(n)
        R = rng.standard_normal((n, n))
        B = R @ R.T + n * np.eye(n)
        vals = linalg.gen_eig(A, B).values
        for lam in 0.5 * (vals[:-1] + vals[1:]):
            ok &= linalg.pencil_count_below(A, B, lam) == int(np.sum(vals < lam))
    return Check("pencil_counting", "pencil_count_below agrees with gen_eig on random pencils",
                 bool(ok), f"{trials} pencils of order <= 60")


def reference_checks(rng):
    return [
        check_oracle_agreement(),
        check_boundary_condition(),
        check_constant_identity(),
        check_superiority(),
        check_sandwich(rng),
        check_constant_monotone(),
        check_weyl(),
        check_multinomial_identity(rng),
        check_congruence(rng),
        check_pencil_counts(rng),
    ]


def run_verify(domain, spec, seed=42, lambdas=None, ratio=1.2, method="jacobi"):
    rng = np.random.default_rng(seed)
    prob, checks = problem_checks(domain, spec, rng, lambdas, ratio, method)
    return prob, checks + reference_checks(rng)
