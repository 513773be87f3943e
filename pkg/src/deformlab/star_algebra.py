"""Finite-dimensional *-algebras in coefficient space.

A span of matrices closed under product and adjoint is reduced to its
structure constants once; everything downstream (closure checks, block
decomposition, comparisons) happens on coefficient vectors.  Large algebras
built from crossed products implement the same operations through closed-form
product rules instead of a dense tensor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .linalg import SpanBasis, max_abs

SC_TOL = 1e-10


@dataclass
class StructureConstants:
    """Product tensor c[i,j,k], involution matrix s[i,k] and unit coefficients.

    a_i a_j = sum_k c[i,j,k] a_k;  a_i* = sum_k s[i,k] a_k.
    """

    c: np.ndarray
    s: np.ndarray
    unit: np.ndarray
    labels: Optional[list] = None

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def product_coeffs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def involute_coeffs(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ik->k", np.conj(x), self.s)

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->kj", x, self.c)

    def right_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("j,ijk->ki", x, self.c)

    def regular_trace_vector(self) -> np.ndarray:
        """t with  tr(L_x) = t . x  in the left regular representation."""
        return np.einsum("ijj->i", self.c)

    def associativity_residual(self, max_exhaustive: int = 24, seed: int = 0) -> float:
        k = self.dim
        if k <= max_exhaustive:
            lhs = np.einsum("ijm,mkl->ijkl", self.c, self.c)
            rhs = np.einsum("jkm,iml->ijkl", self.c, self.c)
            return max_abs(lhs - rhs)
        rng = np.random.default_rng([seed, k, 3])
        worst = 0.0
        for _ in range(200):
            i, j, l = rng.integers(0, k, 3)
            lhs = self.product_coeffs(self.c[i, j], _basis_vec(k, l))
            rhs = self.product_coeffs(_basis_vec(k, i), self.c[j, l])
            worst = max(worst, max_abs(lhs - rhs))
        return worst

    def involution_residual(self) -> float:
        """Conjugate-linear involutivity: s applied twice is the identity."""
        return max_abs(np.conj(self.s) @ self.s - np.eye(self.dim))

    def max_difference(self, other: "StructureConstants") -> float:
        return max(max_abs(self.c - other.c), max_abs(self.s - other.s),
                   max_abs(self.unit - other.unit))


def _basis_vec(k: int, i: int) -> np.ndarray:
    v = np.zeros(k, dtype=complex)
    v[i] = 1.0
    return v


@dataclass
class SpanClosureReport:
    max_product_residual: float
    max_adjoint_residual: float
    max_unit_residual: float

    def passed(self, tol: float = SC_TOL) -> bool:
        return max(self.max_product_residual, self.max_adjoint_residual,
                   self.max_unit_residual) <= tol


def structure_constants_from_matrices(
    basis: Sequence[np.ndarray], labels: Optional[list] = None,
) -> tuple[StructureConstants, SpanClosureReport]:
    """Extract structure constants of a matrix span by least squares.

    The closure report carries the worst expansion residuals; a residual above
    tolerance means the proposed basis does not span a *-closed algebra.
    """
    span = SpanBasis(basis)
    k = span.dim
    c = np.zeros((k, k, k), dtype=complex)
    prod_res = 0.0
    for i, a in enumerate(span.matrices):
        for j, b in enumerate(span.matrices):
            coeffs, res = span.expand(a @ b)
            c[i, j] = coeffs
            prod_res = max(prod_res, res)
    s = np.zeros((k, k), dtype=complex)
    adj_res = 0.0
    for i, a in enumerate(span.matrices):
        coeffs, res = span.expand(a.conj().T)
        s[i] = coeffs
        adj_res = max(adj_res, res)
    unit, unit_res = span.expand(np.eye(span.shape[0]))
    sc = StructureConstants(c, s, unit, labels=labels)
    return sc, SpanClosureReport(prod_res, adj_res, unit_res)


class CoeffAlgebra:
    """Operations every block-decomposable algebra exposes on coefficients."""

    dim: int
    unit: np.ndarray

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def involute(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def right_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def regular_trace(self, x: np.ndarray) -> complex:
        raise NotImplementedError


class DenseAlgebra(CoeffAlgebra):
    """CoeffAlgebra backed by a dense structure-constant tensor."""

    def __init__(self, sc: StructureConstants, matrices: Optional[list] = None):
        self.sc = sc
        self.dim = sc.dim
        self.unit = np.asarray(sc.unit, dtype=complex)
        self.matrices = matrices
        self._trace_vec = sc.regular_trace_vector()

    @classmethod
    def from_matrices(cls, basis: Sequence[np.ndarray], tol: float = SC_TOL,
                      labels: Optional[list] = None) -> "DenseAlgebra":
        sc, report = structure_constants_from_matrices(basis, labels=labels)
        if not report.passed(tol):
            raise ValueError(
                "matrix span is not a *-closed algebra: residuals "
                f"{report.max_product_residual:.3e} / {report.max_adjoint_residual:.3e}"
                f" / {report.max_unit_residual:.3e}"
            )
        return cls(sc, matrices=[np.asarray(b, dtype=complex) for b in basis])

    def multiply(self, x, y):
        return self.sc.product_coeffs(np.asarray(x, complex), np.asarray(y, complex))

    def involute(self, x):
        return self.sc.involute_coeffs(np.asarray(x, complex))

    def left_mult_matrix(self, x):
        return self.sc.left_mult_matrix(np.asarray(x, complex))

    def right_mult_matrix(self, x):
        return self.sc.right_mult_matrix(np.asarray(x, complex))

    def regular_trace(self, x):
        return complex(np.dot(self._trace_vec, np.asarray(x, complex)))
