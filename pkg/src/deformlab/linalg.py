"""Dense linear-algebra helpers shared by all modules.

Everything here works on plain complex128 numpy arrays.  Matrix spans are
handled through a QR factorization of the vectorized basis so that repeated
least-squares expansions are cheap and deterministic.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NotInAlgebra

SPAN_MEMBERSHIP_TOL = 1e-8
INDEPENDENCE_SV_TOL = 1e-8
UNITARY_TOL = 1e-12


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))


def unit_root(numerator: int, denominator: int) -> complex:
    """e^{2 pi i numerator/denominator}, exact for 1st, 2nd and 4th roots."""
    if denominator == 0:
        raise ZeroDivisionError("zero denominator in root of unity")
    k = numerator % denominator
    frac = Fraction(k, denominator)
    exact = {
        Fraction(0, 1): 1 + 0j,
        Fraction(1, 2): -1 + 0j,
        Fraction(1, 4): 1j,
        Fraction(3, 4): -1j,
    }
    if frac in exact:
        return exact[frac]
    return complex(np.exp(2j * np.pi * float(frac)))


class SpanBasis:
    """Linear span of matrices with least-squares expansion.

    Stores the reduced QR factorization of the vectorized basis; ``expand``
    returns coefficients and the 2-norm residual of the projection.
    """

    def __init__(self, matrices):
        self.matrices = [np.asarray(m, dtype=complex) for m in matrices]
        if not self.matrices:
            raise ValueError("empty basis")
        shape = self.matrices[0].shape
        for m in self.matrices:
            if m.shape != shape:
                raise ValueError("basis matrices have mixed shapes")
        self.shape = shape
        self.stack = np.column_stack([vec(m) for m in self.matrices])
        self._q, self._r = np.linalg.qr(self.stack, mode="reduced")
        svals = np.linalg.svd(self.stack, compute_uv=False)
        self.smallest_sv = float(svals[-1])
        self.dim = len(self.matrices)

    def expand(self, m: np.ndarray) -> tuple[np.ndarray, float]:
        v = vec(m)
        rhs = self._q.conj().T @ v
        coeffs = np.linalg.solve(self._r, rhs)
        residual = float(np.linalg.norm(self.stack @ coeffs - v))
        return coeffs, residual

    def expand_many(self, mats) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients (dim x m) and residuals (m,) for a batch of matrices."""
        arr = np.asarray(mats, dtype=complex)
        v = arr.transpose(0, 2, 1).reshape(arr.shape[0], -1).T   # columns are vec(m)
        rhs = self._q.conj().T @ v
        coeffs = np.linalg.solve(self._r, rhs)
        residuals = np.linalg.norm(self.stack @ coeffs - v, axis=0)
        return coeffs, residuals

    def expand_strict(self, m: np.ndarray, tol: float = SPAN_MEMBERSHIP_TOL) -> np.ndarray:
        coeffs, residual = self.expand(m)
        if residual > tol * max(1.0, float(np.linalg.norm(vec(m)))):
            raise NotInAlgebra(residual, tol)
        return coeffs

    def combine(self, coeffs) -> np.ndarray:
        flat = self.stack @ np.asarray(coeffs, dtype=complex)
        return flat.reshape(self.shape, order="F")

    def membership_residual(self, m: np.ndarray) -> float:
        return self.expand(m)[1]


class MonomialUnitary:
    """Unitary of the form  delta_j -> phase[j] * delta_{perm[j]}.

    Composition, Kronecker products and conjugation of dense matrices all stay
    O(dim) resp. O(dim^2), which keeps the large tensor-leg computations cheap.
    """

    def __init__(self, perm, phase=None):
        self.perm = np.asarray(perm, dtype=np.int64)
        n = self.perm.shape[0]
        if phase is None:
            phase = np.ones(n, dtype=complex)
        self.phase = np.asarray(phase, dtype=complex)
        if self.phase.shape != (n,):
            raise ValueError("phase length does not match permutation")
        self.dim = n

    @classmethod
    def identity(cls, n: int) -> "MonomialUnitary":
        return cls(np.arange(n))

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        m[self.perm, np.arange(self.dim)] = self.phase
        return m

    def adjoint(self) -> "MonomialUnitary":
        inv = np.empty(self.dim, dtype=np.int64)
        inv[self.perm] = np.arange(self.dim)
        return MonomialUnitary(inv, self.phase[inv].conj())

    def compose(self, other: "MonomialUnitary") -> "MonomialUnitary":
        """self @ other as operators."""
        return MonomialUnitary(self.perm[other.perm], self.phase[other.perm] * other.phase)

    def kron(self, other: "MonomialUnitary") -> "MonomialUnitary":
        n2 = other.dim
        perm = self.perm[:, None] * n2 + other.perm[None, :]
        phase = self.phase[:, None] * other.phase[None, :]
        return MonomialUnitary(perm.reshape(-1), phase.reshape(-1))

    @classmethod
    def kron_identity(cls, u: "MonomialUnitary", n: int) -> "MonomialUnitary":
        return u.kron(cls.identity(n))

    @classmethod
    def identity_kron(cls, n: int, u: "MonomialUnitary") -> "MonomialUnitary":
        return cls.identity(n).kron(u)

    def conjugate_dense(self, a: np.ndarray) -> np.ndarray:
        """U a U* without forming U."""
        a = np.asarray(a, dtype=complex)
        scaled = (self.phase[:, None] * a) * self.phase.conj()[None, :]
        out = np.empty_like(scaled)
        out[np.ix_(self.perm, self.perm)] = scaled
        return out

    def apply_left(self, a: np.ndarray) -> np.ndarray:
        """U @ a without forming U."""
        a = np.asarray(a, dtype=complex)
        out = np.empty_like(a)
        out[self.perm, :] = self.phase[:, None] * a
        return out


def derived_rng(*keys: int) -> np.random.Generator:
    """Deterministic generator from a tuple of integer keys."""
    return np.random.default_rng(list(keys))


def random_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
