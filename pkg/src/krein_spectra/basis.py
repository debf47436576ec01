"""Conforming tensor-product B-spline trial spaces.

A trial space for order ``m`` must lie in the closure of compactly supported
smooth functions in the ``W^{2m}`` norm, i.e. every function and its
derivatives up to order ``2m - 1`` vanish on the boundary. Two constructions
are provided:

``clamped``
    Open (repeated end) knot vectors on an interval or box; the first and last
    ``2m`` splines per axis are dropped. Full approximation order.
``interior``
    Uniform knots extended past the domain; only splines whose support lies
    inside the domain are kept. Works for arbitrary cell unions.

``none`` keeps every spline touching the domain and is a diagnostic mode only
(partition of unity, projections); it is not conforming.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DerivativeTooHigh, EmptyBasis, ValidationError

BOUNDARY_MODES = ("clamped", "interior", "none")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValidationError(f"interval needs finite a < b, got ({self.a}, {self.b})")

    @property
    def dim(self):
        return 1

    def volume(self):
        return self.b - self.a

    def bounds(self):
        return (self.a,), (self.b,)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValidationError("box corners must have the same positive length")
        if not all(math.isfinite(l) and math.isfinite(h) and l < h for l, h in zip(lo, hi)):
            raise ValidationError(f"box needs lo < hi componentwise, got {lo}, {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def volume(self):
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    def bounds(self):
        return self.lo, self.hi


@dataclass(frozen=True)
class CellUnion:
    """Union of closed grid cells ``[c h, (c + 1) h]`` for integer tuples ``c``."""

    h: float
    cells: frozenset

    def __init__(self, h, cells):
        cells = [tuple(int(v) for v in c) for c in cells]
        if not cells:
            raise ValidationError("cell union is empty")
        if len(set(cells)) != len(cells):
            raise ValidationError("cell union contains duplicate cells")
        if len({len(c) for c in cells}) != 1:
            raise ValidationError("cells have mixed dimensions")
        if not (h > 0 and math.isfinite(h)):
            raise ValidationError(f"cell width must be positive, got {h}")
        object.__setattr__(self, "h", float(h))
        object.__setattr__(self, "cells", frozenset(cells))

    @classmethod
    def l_shape(cls, k=3, h=None):
        """``k x k`` grid of cells with the top-right corner cell removed."""
        h = 1.0 / k if h is None else h
        cells = [(i, j) for i in range(k) for j in range(k) if (i, j) != (k - 1, k - 1)]
        return cls(h, cells)

    @property
    def dim(self):
        return len(next(iter(self.cells)))

    def volume(self):
        return len(self.cells) * self.h ** self.dim

    def index_bounds(self):
        arr = np.array(sorted(self.cells))
        return arr.min(axis=0), arr.max(axis=0)

    def bounds(self):
        lo, hi = self.index_bounds()
        return tuple(float(v) * self.h for v in lo), tuple(float(v + 1) * self.h for v in hi)


@dataclass(frozen=True)
class BasisSpec:
    """Discretization parameters.

    ``cells`` is the number of knot spans per axis for intervals and boxes;
    ``refine`` splits every cell of a :class:`CellUnion` into ``refine`` spans
    per axis. ``vanish_order`` is the number of boundary derivatives (orders
    ``0 .. vanish_order - 1``) forced to zero in clamped mode; the default
    ``2m`` makes the space conforming for the order-``m`` operator.
    """

    m: int = 1
    degree: int | None = None
    cells: int = 32
    refine: int = 1
    boundary: str | None = None
    vanish_order: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError(f"order m must be >= 1, got {self.m}")
        if self.degree is None:
            object.__setattr__(self, "degree", 2 * self.m + 1)
        if self.degree < 2 * self.m:
            raise ValidationError(f"degree < 2m (degree={self.degree}, m={self.m})")
        if self.vanish_order is None:
            object.__setattr__(self, "vanish_order", 2 * self.m)
        if not 1 <= self.vanish_order <= self.degree:
            raise ValidationError(f"vanish_order must lie in [1, degree], got {self.vanish_order}")
        if self.cells < 1 or self.refine < 1:
            raise ValidationError("cells and refine must be positive")
        if self.boundary is not None and self.boundary not in BOUNDARY_MODES:
            raise ValidationError(f"boundary must be one of {BOUNDARY_MODES}")


def bspline_values(knots, degree, x, deriv=0):
    """Values of the ``deriv``-th derivative of all B-splines on ``knots`` at ``x``.

    Cox-de Boor recursion up to degree ``degree - deriv`` followed by
    ``deriv`` applications of the derivative formula. Returns an array of
    shape ``(len(knots) - degree - 1, len(x))``; points outside the knot range
    give zeros.
    """
    if deriv > degree:
        raise DerivativeTooHigh(f"derivative order {deriv} exceeds degree {degree}")
    if deriv < 0:
        raise ValueError("derivative order must be nonnegative")
    t = np.asarray(knots, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nk = len(t)
    # degree-0 indicators on half-open spans; the right end joins the last real span
    span = np.searchsorted(t, x, side="right") - 1
    last = np.nonzero(t[1:] > t[:-1])[0][-1]
    span = np.where(x == t[-1], last, span)
    inside = (x >= t[0]) & (x <= t[-1])
    vals = np.zeros((nk - 1, len(x)))
    cols = np.nonzero(inside)[0]
    vals[span[cols], cols] = 1.0

    def ratio(num, den):
        out = np.zeros_like(num)
        np.divide(num, den, out=out, where=den != 0.0)
        return out

    for k in range(1, degree - deriv + 1):
        nf = nk - k - 1
        left = ratio(x[None, :] - t[:nf, None], (t[k:k + nf] - t[:nf])[:, None])
        right = ratio(t[k + 1:k + 1 + nf, None] - x[None, :], (t[k + 1:k + 1 + nf] - t[1:1 + nf])[:, None])
        vals = left * vals[:nf] + right * vals[1:nf + 1]
    for k in range(degree - deriv + 1, degree + 1):
        nf = nk - k - 1
        a = ratio(np.full((nf, 1), float(k)), (t[k:k + nf] - t[:nf])[:, None])
        b = ratio(np.full((nf, 1), float(k)), (t[k + 1:k + 1 + nf] - t[1:1 + nf])[:, None])
        vals = a * vals[:nf] - b * vals[1:nf + 1]
    return vals


class Axis:
    """Knot vector of one coordinate direction plus exact Gram tables."""

    def __init__(self, knots, degree, lo, hi):
        self.knots = np.asarray(knots, dtype=float)
        self.knots.setflags(write=False)
        self.degree = degree
        self.lo = float(lo)
        self.hi = float(hi)
        self._gram = {}
        self._quad = None

    @property
    def nfun(self):
        return len(self.knots) - self.degree - 1

    def values(self, x, deriv=0):
        return bspline_values(self.knots, self.degree, x, deriv)

    def support(self, i):
        return self.knots[i], self.knots[i + self.degree + 1]

    def quadrature(self):
        """Gauss-Legendre nodes/weights, ``degree + 1`` points per span in [lo, hi]."""
        if self._quad is None:
            brk = np.unique(self.knots[(self.knots >= self.lo) & (self.knots <= self.hi)])
            npts = math.ceil((2 * self.degree + 1) / 2)
            xg, wg = np.polynomial.legendre.leggauss(npts)
            a, b = brk[:-1, None], brk[1:, None]
            nodes = 0.5 * (a + b) + 0.5 * (b - a) * xg[None, :]
            weights = 0.5 * (b - a) * wg[None, :]
            self._quad = (nodes.ravel(), weights.ravel())
        return self._quad

    def gram(self, d1, d2):
        """Matrix of ``int b_i^(d1) b_j^(d2)`` over [lo, hi] for all splines of the axis."""
        key = (d1, d2)
        if key not in self._gram:
            if (d2, d1) in self._gram:
                self._gram[key] = self._gram[(d2, d1)].T
            else:
                x, w = self.quadrature()
                self._gram[key] = (self.values(x, d1) * w) @ self.values(x, d2).T
        return self._gram[key]


@dataclass(frozen=True, eq=False)
class Basis:
    """Tensor B-spline trial space.

    ``index`` has one row per basis function giving the spline index along
    every axis.
    """

    domain: object
    spec: BasisSpec
    axes: tuple
    index: np.ndarray
    boundary: str

    @property
    def dim(self):
        return len(self.axes)

    @property
    def degree(self):
        return self.spec.degree

    @property
    def m(self):
        return self.spec.m

    def __len__(self):
        return self.index.shape[0]

    @property
    def size(self):
        return len(self)

    @property
    def conforming_order(self):
        """Number of boundary derivatives guaranteed to vanish."""
        if self.boundary == "interior":
            return self.degree + 1
        if self.boundary == "clamped":
            return self.spec.vanish_order
        return 0

    @property
    def mesh_width(self):
        return max(float(np.diff(np.unique(ax.knots)).max()) for ax in self.axes)

    def support(self, i):
        """Axis-aligned support box ``(lo, hi)`` of basis function ``i``."""
        pairs = [ax.support(k) for ax, k in zip(self.axes, self.index[i])]
        return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)

    def coefficient_grid(self, coeffs):
        """Scatter coefficients into the full per-axis spline index grid."""
        coeffs = np.asarray(coeffs, dtype=float)
        full = np.zeros(tuple(ax.nfun for ax in self.axes) + coeffs.shape[1:])
        full[tuple(self.index.T)] = coeffs
        return full

    def grid_values(self, coeffs, grids, deriv=None):
        """Derivative ``deriv`` of ``sum_i coeffs[i] b_i`` on the tensor grid ``grids``."""
        deriv = (0,) * self.dim if deriv is None else _multi(deriv, self.dim)
        out = self.coefficient_grid(coeffs)
        for ax, g, d in zip(self.axes, grids, deriv):
            table = ax.values(np.asarray(g, dtype=float), d)
            out = np.tensordot(out, table, axes=([0], [0]))
        # result axes: coefficient batch axes first, then one axis per grid
        return out


def _multi(d, n):
    if np.isscalar(d):
        if n != 1:
            raise ValueError(f"scalar derivative order given for dimension {n}")
        return (int(d),)
    d = tuple(int(v) for v in d)
    if len(d) != n:
        raise ValueError(f"derivative multi-index {d} does not match dimension {n}")
    return d


def _clamped_axis(lo, hi, cells, p):
    knots = np.concatenate([[lo] * p, np.linspace(lo, hi, cells + 1), [hi] * p])
    return Axis(knots, p, lo, hi)


def _uniform_axis(lo, hi, cells, p):
    h = (hi - lo) / cells
    knots = lo + h * np.arange(-p, cells + p + 1)
    return Axis(knots, p, lo, hi)


def _axis_keep(cells, p, boundary, vanish):
    if boundary == "clamped":
        return list(range(vanish, cells + p - vanish))
    if boundary == "interior":
        return list(range(p, cells))
    return list(range(cells + p))


def build_basis(domain, spec=None):
    """Build the trial space for ``domain``.

    Intervals and boxes default to the clamped construction; cell unions only
    support ``interior`` (or the diagnostic ``none``).
    """
    spec = BasisSpec() if spec is None else spec
    p = spec.degree
    if isinstance(domain, CellUnion):
        boundary = spec.boundary or "interior"
        if boundary == "clamped":
            raise ValidationError("clamped boundary is only available for intervals and boxes")
        return _build_cell_union(domain, spec, boundary)
    if not isinstance(domain, (Interval, Box)):
        raise TypeError(f"unsupported domain {domain!r}")
    boundary = spec.boundary or "clamped"
    lo, hi = domain.bounds()
    axes, keeps = [], []
    for l, h in zip(lo, hi):
        if boundary == "clamped":
            axes.append(_clamped_axis(l, h, spec.cells, p))
        else:
            axes.append(_uniform_axis(l, h, spec.cells, p))
        keeps.append(_axis_keep(spec.cells, p, boundary, spec.vanish_order))
    if any(not k for k in keeps):
        raise EmptyBasis(f"no admissible spline for cells={spec.cells}, degree={p}, boundary={boundary}")
    index = np.array(list(itertools.product(*keeps)), dtype=np.intp).reshape(-1, len(axes))
    return Basis(domain, spec, tuple(axes), index, boundary)


def _build_cell_union(domain, spec, boundary):
    p, r = spec.degree, spec.refine
    imin, imax = domain.index_bounds()
    n = domain.dim
    counts = (imax - imin + 1) * r
    axes = []
    for k in range(n):
        lo = float(imin[k]) * domain.h
        hi = float(imax[k] + 1) * domain.h
        axes.append(_uniform_axis(lo, hi, int(counts[k]), p))
    occupied = np.zeros(tuple(counts), dtype=bool)
    for c in domain.cells:
        sl = tuple(slice((c[k] - imin[k]) * r, (c[k] - imin[k] + 1) * r) for k in range(n))
        occupied[sl] = True
    rows = []
    if boundary == "interior":
        # spline i spans fine cells i - p .. i of its axis
        ranges = [range(p, int(counts[k])) for k in range(n)]
        for idx in itertools.product(*ranges):
            sl = tuple(slice(i - p, i + 1) for i in idx)
            if occupied[sl].all():
                rows.append(idx)
    else:
        ranges = [range(int(counts[k]) + p) for k in range(n)]
        for idx in itertools.product(*ranges):
            sl = tuple(slice(max(i - p, 0), i + 1) for i in idx)
            if occupied[sl].any():
                rows.append(idx)
    if not rows:
        raise EmptyBasis(f"no spline of degree {p} fits inside the cell union at refine={r}")
    index = np.array(rows, dtype=np.intp).reshape(-1, n)
    return Basis(domain, spec, tuple(axes), index, boundary)


def spline_inner(basis, i, j, d):
    """Exact ``int d1 b_i * d2 b_j`` for the derivative pair ``d = (d1, d2)``.

    Factorizes over axes; every axis factor comes from Gauss-Legendre tables
    that are exact for the piecewise-polynomial integrand.
    """
    d1, d2 = (_multi(v, basis.dim) for v in d)
    for a, b in zip(d1, d2):
        if max(a, b) > basis.degree:
            raise DerivativeTooHigh(f"derivative order {max(a, b)} exceeds degree {basis.degree}")
    value = 1.0
    for ax, a, b, ii, jj in zip(basis.axes, d1, d2, basis.index[i], basis.index[j]):
        value *= ax.gram(a, b)[ii, jj]
    return float(value)


def gram_matrix(basis, d1, d2=None):
    """Matrix of :func:`spline_inner` values over all basis pairs."""
    d1 = _multi(d1, basis.dim)
    d2 = d1 if d2 is None else _multi(d2, basis.dim)
    out = np.ones((len(basis), len(basis)))
    for k, (ax, a, b) in enumerate(zip(basis.axes, d1, d2)):
        if max(a, b) > basis.degree:
            raise DerivativeTooHigh(f"derivative order {max(a, b)} exceeds degree {basis.degree}")
        idx = basis.index[:, k]
        out *= ax.gram(a, b)[np.ix_(idx, idx)]
    return out


def eval_basis(basis, i, x, d=None):
    """Derivative ``d`` of basis function ``i`` at point ``x``; zero off support."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = (0,) * basis.dim if d is None else _multi(d, basis.dim)
    value = 1.0
    for ax, xk, dk, ik in zip(basis.axes, x, d, basis.index[i]):
        value *= ax.values([xk], dk)[ik, 0]
    return float(value)
