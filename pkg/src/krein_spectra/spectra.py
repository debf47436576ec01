"""Discrete Krein (buckling) and Friedrichs spectra, counting curves, 1D oracles.

The strictly positive Krein eigenvalues are the eigenvalues of the buckling
pencil ``A x = lambda B x``; the Friedrichs eigenvalues come from
``B x = mu M x``. On a conforming trial space every discrete eigenvalue is an
upper bound for its continuous counterpart, so every discrete count is a lower
bound for the true counting function.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .basis import Interval
from .bounds import BoundParams, krein_bound, weyl_leading
from .errors import BracketingFailure, NumericalError, ValidationError
from .forms import assemble_mass

KREIN = "krein-buckling"
FRIEDRICHS = "friedrichs"


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    kind: str
    eigenvalues: np.ndarray
    vectors: np.ndarray
    size: int
    max_residual: float = 0.0

    def __len__(self):
        return len(self.eigenvalues)

    def count_below(self, lam):
        return int(np.count_nonzero(self.eigenvalues < lam))


@dataclass(frozen=True, eq=False)
class CountingCurve:
    lambdas: np.ndarray
    counts: np.ndarray
    bound_values: np.ndarray
    weyl_values: np.ndarray
    friedrichs_counts: np.ndarray | None = None
    on_eigenvalue: np.ndarray = field(default=None)
    size: int = 0

    def bound_violations(self):
        """Grid indices where the discrete count exceeds the Krein bound."""
        return np.nonzero(self.counts > self.bound_values)[0]


def bound_params(forms):
    dom = forms.basis.domain
    return BoundParams(dom.dim, forms.m, dom.volume())


def _solve(kind, A, B, size, method):
    dec = linalg.gen_eig(A, B, method=method)
    scale = np.max(np.abs(A)) + np.max(np.abs(dec.values)) * np.max(np.abs(B))
    res = float(np.max(linalg.residuals(A, B, dec)) / scale)
    return SpectrumResult(kind, dec.values, dec.vectors, size, res)


def krein_positive_spectrum(forms, method="jacobi"):
    """Eigenvalues of the buckling pencil ``(A, B)``: the positive Krein spectrum."""
    basis = forms.basis
    if basis.conforming_order < 2 * forms.m:
        raise ValidationError(
            f"trial space only vanishes to order {basis.conforming_order}; the buckling pencil needs {2 * forms.m}"
        )
    result = _solve(KREIN, forms.A, forms.B, forms.size, method)
    if not np.all(result.eigenvalues > 0):
        raise NumericalError("buckling pencil produced a non-positive eigenvalue")
    return result


def friedrichs_spectrum(forms, method="jacobi"):
    """Eigenvalues of ``(B, M)``: upper bounds for the Friedrichs eigenvalues."""
    if forms.basis.conforming_order < forms.m:
        raise ValidationError("trial space is not contained in the Friedrichs form domain")
    return _solve(FRIEDRICHS, forms.B, forms.M, forms.size, method)


def default_lambda_grid(eigenvalues, ratio=1.2):
    """Geometric grid from ``lambda_1 / 2`` up to the ``N/2``-th discrete eigenvalue."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    if ratio <= 1:
        raise ValueError("grid ratio must exceed 1")
    top = ev[max(len(ev) // 2 - 1, 0)]
    lo = ev[0] / 2.0
    if top <= lo:
        return np.array([lo])
    count = int(math.floor(math.log(top / lo) / math.log(ratio))) + 1
    return lo * ratio ** np.arange(count)


def _count(A, B, lam):
    S = A - lam * B
    inertia = linalg.ldlt_inertia(S)
    return inertia.n_minus, inertia.n_zero > 0


def counting_curve(forms, lambdas, params=None, friedrichs=True):
    """Counts of discrete Krein (and Friedrichs) eigenvalues below each grid value.

    Counts come from the inertia of ``A - lambda B`` (and ``B - lambda M``);
    no eigensolve is involved. Grid points lying on a discrete eigenvalue are
    flagged in ``on_eigenvalue`` and still reported with the strict count.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ValueError("lambda grid must be a non-empty 1D sequence")
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambda grid must be positive and strictly ascending")
    params = bound_params(forms) if params is None else params
    counts = np.empty(lambdas.size, dtype=int)
    flags = np.zeros(lambdas.size, dtype=bool)
    fcounts = np.empty(lambdas.size, dtype=int) if friedrichs else None
    for i, lam in enumerate(lambdas):
        counts[i], flags[i] = _count(forms.A, forms.B, lam)
        if friedrichs:
            fcounts[i], fflag = _count(forms.B, forms.M, lam)
            flags[i] |= fflag
    bound = np.array([krein_bound(params, lam) for lam in lambdas])
    weyl = np.array([weyl_leading(params, lam) for lam in lambdas])
    return CountingCurve(lambdas, counts, bound, weyl, fcounts, flags, forms.size)


# -- one-dimensional oracles -------------------------------------------------


def bisect(f, lo, hi, flo=None, fhi=None, max_iter=200):
    """Root of ``f`` in ``[lo, hi]`` given a sign change, to full double precision."""
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketingFailure(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(f, width, start, how_many=None, z_max=None):
    """Roots of ``f`` from sign changes on consecutive brackets of ``width``."""
    roots = []
    a = start
    fa = f(a)
    while True:
        if how_many is not None and len(roots) >= how_many:
            break
        b = a + width
        if z_max is not None and b >= z_max:
            b = z_max
        fb = f(b)
        if (fa > 0) != (fb > 0) or fb == 0.0:
            roots.append(bisect(f, a, b, fa, fb))
        if z_max is not None and b >= z_max:
            break
        a, fa = b, fb
    return roots


def buckling_characteristic(z):
    """``2 (1 - cos z) - z sin z`` with ``z = k L``; zero at clamped-buckling modes."""
    return 2.0 * (1.0 - math.cos(z)) - z * math.sin(z)


def _is_even_family(z):
    # z = 2 pi j  <=>  sin(z/2) = 0
    return abs(math.sin(0.5 * z)) < 1e-6


def _interleaved(roots):
    fam = [_is_even_family(z) for z in roots]
    return all(f == (i % 2 == 0) for i, f in enumerate(fam))


def _krein_m1_roots(how_many=None, z_max=None):
    width = math.pi / 2.0
    for attempt in range(2):
        # offset start keeps z = 2 pi j strictly inside a bracket
        roots = _scan_roots(buckling_characteristic, width, width / 2.0, how_many, z_max)
        if _interleaved(roots):
            return roots
        width /= 2.0
    raise BracketingFailure("root families of the buckling equation do not interleave")


def _determinant_oracle(det, how_many=None, z_max=None, start=0.5, width=math.pi / 8.0):
    return _scan_roots(det, width, start, how_many, z_max)


def _m2_even_det(z):
    e = math.exp(-z)
    ch, sh = 0.5 * (1.0 + e * e), 0.5 * (1.0 - e * e)
    c, s = math.cos(z), math.sin(z)
    mat = np.array([
        [1.0, 1.0, ch, c],
        [0.0, 2.0, z * sh, -z * s],
        [0.0, 2.0, z ** 2 * ch, -(z ** 2) * c],
        [0.0, 0.0, z ** 3 * sh, z ** 3 * s],
    ])
    scale = max(z, 1.0) ** np.arange(4)
    return float(np.linalg.det(mat / scale[:, None]))


def _m2_odd_det(z):
    e = math.exp(-z)
    ch, sh = 0.5 * (1.0 + e * e), 0.5 * (1.0 - e * e)
    c, s = math.cos(z), math.sin(z)
    mat = np.array([
        [1.0, 1.0, sh, s],
        [1.0, 3.0, z * ch, z * c],
        [0.0, 6.0, z ** 2 * sh, -(z ** 2) * s],
        [0.0, 6.0, z ** 3 * ch, -(z ** 3) * c],
    ])
    scale = max(z, 1.0) ** np.arange(4)
    return float(np.linalg.det(mat / scale[:, None]))


def _interval_length(interval):
    if isinstance(interval, Interval):
        return interval.volume()
    a, b = interval
    if not b > a:
        raise ValueError("interval needs a < b")
    return float(b - a)


def oracle_1d_krein(interval, how_many=None, *, m=1, upper=None):
    """Positive Krein eigenvalues of ``(-d^2/dx^2)^m`` on an interval, ascending.

    ``m = 1``: ``lambda = k^2`` with ``k`` the positive roots of
    ``2 (1 - cos kL) - kL sin kL``; the families ``kL = 2 pi j`` and
    ``tan(kL/2) = kL/2`` interleave and this is checked.

    ``m = 2``: ``lambda = k^4`` from the clamped boundary determinant of
    ``u^(8) = lambda u^(4)``, split into even and odd modes about the midpoint.

    Give either ``how_many`` or ``upper`` (all eigenvalues strictly below it).
    """
    L = _interval_length(interval)
    if (how_many is None) == (upper is None):
        raise ValueError("give exactly one of how_many or upper")
    if m == 1:
        z_max = None if upper is None else math.sqrt(upper) * L
        roots = _krein_m1_roots(how_many, z_max)
        return np.array([(z / L) ** 2 for z in roots if upper is None or (z / L) ** 2 < upper])
    if m == 2:
        half = L / 2.0
        z_max = None if upper is None else upper ** 0.25 * half
        roots = sorted(_determinant_oracle(_m2_even_det, how_many, z_max)
                       + _determinant_oracle(_m2_odd_det, how_many, z_max))
        if how_many is not None:
            roots = roots[:how_many]
        vals = np.array([(z / half) ** 4 for z in roots])
        return vals if upper is None else vals[vals < upper]
    raise ValueError("closed-form Krein oracle only for m in {1, 2}")


def oracle_count_below(interval, lam, m=1):
    """Number of positive Krein eigenvalues strictly below ``lam`` on an interval."""
    return len(oracle_1d_krein(interval, upper=lam, m=m))


def _clamped_beam(z):
    return math.cos(z) - 1.0 / math.cosh(z)


def oracle_1d_friedrichs(interval, how_many, m=1):
    """Friedrichs eigenvalues on an interval: ``(j pi / L)^2`` or clamped-beam ``k^4``."""
    L = _interval_length(interval)
    if m == 1:
        return np.array([(j * math.pi / L) ** 2 for j in range(1, how_many + 1)])
    if m == 2:
        roots = _scan_roots(_clamped_beam, math.pi / 4.0, 1.0, how_many)
        return np.array([(z / L) ** 4 for z in roots])
    raise ValueError("Friedrichs oracle only for m in {1, 2}")


# -- boundary condition reconstruction ---------------------------------------


def krein_bc_check(forms, lam, coeffs):
    """Residual of the Krein boundary condition for ``v = -u''/lam``.

    For ``m = n = 1`` on ``(a, b)`` the Krein extension requires
    ``v'(a) = v'(b) = (v(b) - v(a)) / (b - a)``. Traces are one-sided values at
    ``a + delta`` and ``a + 2 delta`` (likewise at ``b``), linearly extrapolated,
    with ``delta = h / 100``. The residual is divided by ``max |v|`` on a sample
    grid, so it does not depend on the scaling of ``u``.

    ``forms`` may be an :class:`AssembledForms` or a bare basis.
    """
    basis = getattr(forms, "basis", forms)
    if basis.dim != 1:
        raise ValueError("boundary-condition check is one-dimensional")
    (a,), (b,) = basis.domain.bounds()
    delta = basis.mesh_width / 100.0

    def v(x, d):
        return -basis.grid_values(coeffs, [np.atleast_1d(x)], d + 2) / lam

    def trace(x0, step, d):
        vals = v(np.array([x0 + step, x0 + 2 * step]), d)
        return 2.0 * vals[0] - vals[1]

    va, vb = trace(a, delta, 0), trace(b, -delta, 0)
    dva, dvb = trace(a, delta, 1), trace(b, -delta, 1)
    slope = (vb - va) / (b - a)
    sample = np.linspace(a + delta, b - delta, 2001)
    vmax = float(np.max(np.abs(v(sample, 0))))
    if vmax == 0.0:
        raise ValueError("reconstructed v vanishes identically")
    return float(max(abs(dva - slope), abs(dvb - slope)) / vmax)


def l2_project(basis, func):
    """Coefficients of the L2 projection of ``func`` (vectorized, one array per axis)."""
    nodes, weights = zip(*(ax.quadrature() for ax in basis.axes))
    grids = np.meshgrid(*nodes, indexing="ij")
    fvals = func(*grids)
    w = weights[0]
    for wk in weights[1:]:
        w = np.multiply.outer(w, wk)
    load = fvals * w
    # contract against per-axis tables, then pick out the basis functions
    full = load
    for k, ax in enumerate(basis.axes):
        table = ax.values(nodes[k], 0)
        full = np.tensordot(table, full, axes=([1], [k]))
        full = np.moveaxis(full, 0, k)
    rhs = full[tuple(basis.index.T)]
    L = linalg.cholesky(assemble_mass(basis))
    k = linalg.kernels()
    return k.solve_lower_t(L, k.solve_lower(L, rhs))
