"""Closed-form counting bounds and the numeric minimization behind the Krein constant.

All bounds share the power law ``lambda^{n/(2m)}`` and the prefactor
``(2 pi)^-n v_n |Omega|``; they differ only in the dimensionless factor

    Krein (buckling)   (1 + 2m/(2m + n))^{n/(2m)}
    Friedrichs         (1 + 2m/n)^{n/(2m)}
    Weyl leading term  1
"""
import math
from dataclasses import dataclass

from .errors import MinimizationAtBoundary

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def log_gamma(x):
    """``log Gamma(x)`` for ``x > 0`` (Lanczos, g=7, 9 terms)."""
    if x <= 0:
        raise ValueError("log_gamma needs x > 0")
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def unit_ball_volume(n):
    """``pi^{n/2} / Gamma(n/2 + 1)``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(0.5 * n * math.log(math.pi) - log_gamma(0.5 * n + 1.0))


@dataclass(frozen=True)
class BoundParams:
    n: int
    m: int
    volume: float

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n, m >= 1, got n={self.n}, m={self.m}")
        if not (self.volume > 0 and math.isfinite(self.volume)):
            raise ValueError(f"volume must be positive and finite, got {self.volume}")

    @property
    def v_n(self):
        return unit_ball_volume(self.n)

    @property
    def exponent(self):
        return self.n / (2 * self.m)

    def prefactor(self):
        return (2 * math.pi) ** (-self.n) * self.v_n * self.volume


def krein_factor(n, m):
    return (1.0 + 2.0 * m / (2.0 * m + n)) ** (n / (2.0 * m))


def laptev_factor(n, m):
    return (1.0 + 2.0 * m / n) ** (n / (2.0 * m))


def krein_constant(n, m):
    """Closed-form value ``v_n (1 + 2m/(2m+n))^{n/(2m)}`` of the alpha-minimum."""
    return unit_ball_volume(n) * krein_factor(n, m)


def _power(params, lam):
    if lam < 0:
        raise ValueError("lambda must be positive")
    return lam ** params.exponent


def krein_bound(params, lam):
    """Upper bound for the number of positive Krein eigenvalues below ``lam``."""
    return params.prefactor() * krein_factor(params.n, params.m) * _power(params, lam)


def laptev_friedrichs_bound(params, lam):
    """Upper bound for the number of Friedrichs eigenvalues below ``lam``."""
    return params.prefactor() * laptev_factor(params.n, params.m) * _power(params, lam)


def weyl_leading(params, lam):
    return params.prefactor() * _power(params, lam)


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=60):
    """Adaptive Simpson quadrature with Richardson correction, absolute tolerance ``tol``."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
    return total


def golden_section(f, lo, hi, tol=1e-8):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _positive_root(alpha, m):
    """Upper root of ``r^{4m} - r^{2m} = alpha``."""
    return ((1.0 + math.sqrt(1.0 + 4.0 * alpha)) / 2.0) ** (1.0 / (2 * m))


def alpha_objective(alpha, n, m, tol=1e-10):
    """``alpha^-1 int_{R^n} [alpha - |xi|^{4m} + |xi|^{2m}]_+ d xi`` via the radial integral."""
    r_max = _positive_root(alpha, m)

    def bracket(r):
        return alpha - r ** (4 * m) + r ** (2 * m)

    # positivity set must be exactly (0, r_max): no inner band, sign flips once
    for k in range(1, 64):
        r = r_max * k / 64.0
        if not bracket(r) > 0.0:
            raise AssertionError(f"bracket not positive at r={r} for alpha={alpha}")
    if not bracket(r_max * 1.01) < 0.0:
        raise AssertionError(f"bracket still positive past r_max for alpha={alpha}")
    radial = adaptive_simpson(lambda r: bracket(r) * r ** (n - 1), 0.0, r_max, tol)
    return n * unit_ball_volume(n) * radial / alpha


@dataclass(frozen=True)
class ConstantResult:
    value: float
    alpha_star: float
    closed_form: float

    @property
    def rel_error(self):
        return abs(self.value / self.closed_form - 1.0)


def minimize_constant(n, m, alpha_range=(1e-4, 1e4), tol=1e-8):
    """Golden-section search on ``log alpha`` for the minimum of :func:`alpha_objective`."""
    lo, hi = math.log(alpha_range[0]), math.log(alpha_range[1])
    x, value = golden_section(lambda s: alpha_objective(math.exp(s), n, m), lo, hi, tol)
    if x - lo < 1e3 * tol or hi - x < 1e3 * tol:
        raise MinimizationAtBoundary(f"minimizer log(alpha)={x:.6g} hit the bracket edge")
    return ConstantResult(value, math.exp(x), krein_constant(n, m))


def bound_constant_numeric(n, m):
    """Numerically minimized constant; equals :func:`krein_constant` analytically."""
    return minimize_constant(n, m).value
