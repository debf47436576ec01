"""Discrete matrices of the buckling forms and the L2 mass form.

With ``S = (-Delta)^m`` on compactly supported functions,

    a(u, v) = (S u, S v) = sum_{|alpha| = 2m} (2m)!/alpha! (d^alpha u, d^alpha v)
    b(u, v) = (u, S v)   = sum_{|alpha| = m}  m!/alpha!    (d^alpha u, d^alpha v)

so only mixed partial derivatives of single splines are ever needed.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .basis import gram_matrix


def multinomial_weights(k, n):
    """``{alpha: k!/alpha!}`` over all multi-indices of length ``n`` with ``|alpha| = k``."""
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    weights = {}
    for cut in itertools.combinations(range(k + n - 1), n - 1):
        # stars and bars: the bars at positions ``cut`` split k stars into n parts
        edges = (-1,) + cut + (k + n - 1,)
        alpha = tuple(edges[i + 1] - edges[i] - 1 for i in range(n))
        weights[alpha] = math.factorial(k) // math.prod(math.factorial(a) for a in alpha)
    return dict(sorted(weights.items(), reverse=True))


def _weighted_sum(basis, k):
    out = np.zeros((len(basis), len(basis)))
    for alpha, w in multinomial_weights(k, basis.dim).items():
        out += w * gram_matrix(basis, alpha)
    return out


def assemble_a(basis, m=None):
    """Matrix of ``a(b_i, b_j) = ((-Delta)^m b_i, (-Delta)^m b_j)``."""
    m = basis.m if m is None else m
    return _weighted_sum(basis, 2 * m)


def assemble_b(basis, m=None):
    """Matrix of ``b(b_i, b_j) = (b_i, (-Delta)^m b_j)``."""
    m = basis.m if m is None else m
    return _weighted_sum(basis, m)


def assemble_mass(basis):
    return gram_matrix(basis, (0,) * basis.dim)


@dataclass(frozen=True, eq=False)
class AssembledForms:
    A: np.ndarray
    B: np.ndarray
    M: np.ndarray
    basis: object
    m: int

    @property
    def size(self):
        return self.A.shape[0]

    @property
    def domain(self):
        return self.basis.domain


def assemble_forms(basis, m=None, check=True):
    """Assemble ``A``, ``B`` and the mass matrix on ``basis``.

    With ``check`` every matrix is Cholesky-factored once; a failure means the
    basis is not conforming or the assembly is broken.
    """
    m = basis.m if m is None else m
    forms = AssembledForms(assemble_a(basis, m), assemble_b(basis, m), assemble_mass(basis), basis, m)
    if check:
        for mat in (forms.A, forms.B, forms.M):
            linalg.cholesky(mat)
    return forms


def write_matrix(path, mat):
    """Plain-text dump: ``N`` on the first line, then ``N`` rows of ``N`` entries."""
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[0]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n}\n")
        for row in mat:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        n = int(fh.readline())
        rows = [np.array(fh.readline().split(), dtype=float) for _ in range(n)]
    mat = np.array(rows)
    if mat.shape != (n, n):
        raise ValueError(f"{path}: expected {n}x{n} entries, got {mat.shape}")
    return mat
