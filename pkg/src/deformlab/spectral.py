"""Equivariant spectral triples at finite dimension and their deformations.

The Hilbert space carries a coordinate-aligned group grading; the covariant
unitary built from the grading projections intertwines the amplified action
with the coaction, and the deformation re-represents the deformed algebra on
the same space with the same (hence isospectral) self-adjoint operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bundles import FellBundle, plain_lambda_matrix
from .cocycles import TwoCocycleReal, TwoCocycleU1, exp_cocycle
from .errors import GapClosed, GradingIncompatible, NonIntegerPairing, NotAProjection
from .linalg import MonomialUnitary, max_abs
from .star_algebra import StructureConstants

TRIPLE_TOL = 1e-10
PROJECTION_TOL = 1e-8
INDEX_TOL = 1e-6
GAP_TOL = 1e-6


class EquivariantTriple:
    """Even spectral triple with a grading of the representation space.

    ``h_degrees`` assigns a group degree to each standard basis vector of the
    Hilbert space; degree-g algebra elements must map the degree-h subspace
    into the degree-gh one, the self-adjoint operator must commute with the
    grading projections, and the grading unitary must commute with projections
    and algebra while anticommuting with the operator.
    """

    def __init__(self, bundle: FellBundle, h_degrees: Sequence[int],
                 dirac, gamma, name: str = ""):
        self.bundle = bundle
        self.group = bundle.group
        self.h_degrees = [bundle.group.label_index(d) for d in h_degrees]
        self.dirac = np.array(dirac, dtype=complex)
        self.gamma = np.array(gamma, dtype=complex)
        self.dim = len(self.h_degrees)
        self.name = name or f"triple-{bundle.name}"
        if self.bundle.ambient_dim != self.dim:
            raise GradingIncompatible(
                f"bundle acts on dimension {bundle.ambient_dim}, grading has {self.dim}")
        if self.dirac.shape != (self.dim, self.dim) or self.gamma.shape != (self.dim, self.dim):
            raise GradingIncompatible("operator shapes do not match the Hilbert space")
        self._validate()

    def projection(self, g: int) -> np.ndarray:
        diag = np.array([1.0 if d == g else 0.0 for d in self.h_degrees])
        return np.diag(diag).astype(complex)

    def _validate(self) -> None:
        group = self.group
        if max_abs(self.dirac - self.dirac.conj().T) > TRIPLE_TOL:
            raise GradingIncompatible("operator is not self-adjoint")
        if max_abs(self.gamma - self.gamma.conj().T) > TRIPLE_TOL or \
                max_abs(self.gamma @ self.gamma - np.eye(self.dim)) > TRIPLE_TOL:
            raise GradingIncompatible("grading unitary is not a self-adjoint unitary")
        projections = {g: self.projection(g) for g in group.elements()}
        for i, (a, ga) in enumerate(zip(self.bundle.basis, self.bundle.degrees)):
            for h in group.elements():
                image = a @ projections[h]
                off = max_abs((np.eye(self.dim) - projections[group.mul(ga, h)]) @ image)
                if off > TRIPLE_TOL:
                    raise GradingIncompatible(
                        f"degree rule fails: basis {i} on subspace {h}", witness=(i, h))
        for g in group.elements():
            if max_abs(self.dirac @ projections[g] - projections[g] @ self.dirac) > TRIPLE_TOL:
                raise GradingIncompatible("operator does not commute with the grading")
            if max_abs(self.gamma @ projections[g] - projections[g] @ self.gamma) > TRIPLE_TOL:
                raise GradingIncompatible("grading unitary does not respect the grading")
        if max_abs(self.gamma @ self.dirac + self.dirac @ self.gamma) > TRIPLE_TOL:
            raise GradingIncompatible("grading unitary does not anticommute with the operator")
        for i, a in enumerate(self.bundle.basis):
            if max_abs(self.gamma @ a - a @ self.gamma) > TRIPLE_TOL:
                raise GradingIncompatible(
                    "grading unitary does not commute with the algebra", witness=i)


@dataclass
class CovarianceReport:
    comultiplication_residual: float
    intertwining_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.comultiplication_residual, self.intertwining_residual)

    def passed(self, tol: float = TRIPLE_TOL) -> bool:
        return self.max_residual <= tol


def covariant_unitary(triple: EquivariantTriple) -> tuple[MonomialUnitary, CovarianceReport]:
    """X = sum_g lambda_g* ox P_g, with both covariance identities checked.

    X (delta_h ox xi_m) = delta_{deg(m)^{-1} h} ox xi_m for coordinate vectors,
    so X is monomial.
    """
    group = triple.group
    n, m_dim = group.order, triple.dim
    flat = np.arange(n * m_dim)
    h_idx = flat // m_dim
    m_idx = flat % m_dim
    deg = np.array(triple.h_degrees)
    perm = group.cayley[group.inverse[deg[m_idx]], h_idx] * m_dim + m_idx
    x_unitary = MonomialUnitary(perm)

    x_mat = x_unitary.matrix()
    # comultiplied first leg: sum_g lambda_g* ox lambda_g* ox P_g  =  X_13 X_23
    first = np.zeros((n * n * m_dim, n * n * m_dim), dtype=complex)
    x13 = np.zeros_like(first)
    x23 = np.zeros_like(first)
    eye_n = np.eye(n)
    for g in group.elements():
        lam_star = plain_lambda_matrix(group, g).conj().T
        p_g = triple.projection(g)
        first += np.kron(np.kron(lam_star, lam_star), p_g)
        x13 += np.kron(lam_star, np.kron(eye_n, p_g))
        x23 += np.kron(eye_n, np.kron(lam_star, p_g))
    comul_res = max_abs(first - x13 @ x23)

    inter_res = 0.0
    from .bundles import coaction_matrix

    for a in triple.bundle.basis:
        lhs = x_mat.conj().T @ np.kron(eye_n, a) @ x_mat
        inter_res = max(inter_res, max_abs(lhs - coaction_matrix(triple.bundle, a)))
    return x_unitary, CovarianceReport(comul_res, inter_res)


@dataclass
class DeformedTriple:
    triple: EquivariantTriple
    cocycle: TwoCocycleU1
    representation: list            # image of each bundle basis element
    twisted_constants: StructureConstants
    homomorphism_residual: float
    restriction_residual: float
    commutator_norms: tuple

    @property
    def dirac(self) -> np.ndarray:
        return self.triple.dirac

    @property
    def gamma(self) -> np.ndarray:
        return self.triple.gamma

    def element(self, coeffs) -> np.ndarray:
        out = np.zeros_like(self.representation[0])
        for c, m in zip(np.asarray(coeffs, dtype=complex), self.representation):
            out += c * m
        return out


def deform_triple(triple: EquivariantTriple, omega: TwoCocycleU1) -> DeformedTriple:
    """Represent the deformed algebra on the original space, same operator.

    The compression of  sum_g lambda^w_g ox a^{(g)}  to the covariant-unitary
    image of (delta_e ox H) is  sum_g a^{(g)} T_g  with the diagonal unitary
    T_g = sum_h w(g, h) P_h.  Isospectrality is exact: the operator and the
    grading unitary are untouched.
    """
    group = triple.group
    covariant_unitary(triple)   # raises GradingIncompatible if the grading fails
    t_diag = {}
    deg = np.array(triple.h_degrees)
    for g in group.elements():
        t_diag[g] = np.diag(omega.table[g, deg]).astype(complex)
    rep = []
    eye_coeffs = np.eye(triple.bundle.size, dtype=complex)
    for i in range(triple.bundle.size):
        acc = np.zeros((triple.dim, triple.dim), dtype=complex)
        for g in group.elements():
            comp = triple.bundle.combine(
                triple.bundle.component_coeffs(eye_coeffs[i], g))
            if max_abs(comp) == 0.0:
                continue
            acc += comp @ t_diag[g]
        rep.append(acc)
    from .deformation import twisted_structure_constants

    sc = twisted_structure_constants(triple.bundle, omega)
    hom_res = 0.0
    for i in range(len(rep)):
        for j in range(len(rep)):
            expected = np.zeros_like(rep[0])
            for k, coef in enumerate(sc.c[i, j]):
                if coef != 0:
                    expected += coef * rep[k]
            hom_res = max(hom_res, max_abs(rep[i] @ rep[j] - expected))
        expected = np.zeros_like(rep[0])
        for k, coef in enumerate(sc.s[i]):
            if coef != 0:
                expected += coef * rep[k]
        hom_res = max(hom_res, max_abs(rep[i].conj().T - expected))
    # the operator restricted through the embedding u xi = sum_g delta_g ox P_g xi
    restriction = sum(triple.projection(g) @ triple.dirac @ triple.projection(g)
                      for g in group.elements())
    restr_res = max_abs(restriction - triple.dirac)
    commutators = tuple(float(np.linalg.norm(triple.dirac @ m - m @ triple.dirac, 2))
                        for m in rep)
    return DeformedTriple(triple, omega, rep, sc, hom_res, restr_res, commutators)


def index_pairing(gamma: np.ndarray, p: np.ndarray) -> int:
    """round(trace(gamma p)) for a projection p, with integrality enforced."""
    p = np.asarray(p, dtype=complex)
    if max_abs(p - p.conj().T) > PROJECTION_TOL or max_abs(p @ p - p) > PROJECTION_TOL:
        raise NotAProjection(
            f"p fails p*=p or p^2=p within {PROJECTION_TOL:.0e}")
    value = complex(np.trace(np.asarray(gamma, dtype=complex) @ p))
    nearest = round(value.real)
    if abs(value - nearest) > INDEX_TOL:
        raise NonIntegerPairing(value)
    return int(nearest)


@dataclass
class ProjectionRule:
    """Spectral projection of a continuously deformed self-adjoint element.

    ``coeffs`` picks the element  x = m + m*  with  m = sum_i coeffs[i] b_i^w
    in each fiber; the projection is onto eigenvalues below ``cut``.
    """

    coeffs: np.ndarray
    cut: float = 0.0

    def projection(self, deformed: DeformedTriple) -> np.ndarray:
        m = deformed.element(self.coeffs)
        x = (m + m.conj().T) / 2.0
        evals, evecs = np.linalg.eigh(x)
        gap = float(np.min(np.abs(evals - self.cut)))
        if gap < GAP_TOL:
            raise GapClosed(float("nan"), gap)
        below = evecs[:, evals < self.cut]
        return below @ below.conj().T


@dataclass
class PathIndexReport:
    thetas: list
    indices: list
    constant: bool


def index_invariance_along_path(triple: EquivariantTriple, omega0: TwoCocycleReal,
                                thetas, rule: ProjectionRule) -> PathIndexReport:
    """Pairing of gamma with a gap-protected projection family along the path."""
    indices = []
    thetas = [float(t) for t in thetas]
    for theta in thetas:
        deformed = deform_triple(triple, exp_cocycle(omega0, theta))
        try:
            p = rule.projection(deformed)
        except GapClosed as exc:
            raise GapClosed(theta, exc.gap) from exc
        indices.append(index_pairing(deformed.gamma, p))
    return PathIndexReport(thetas, indices, len(set(indices)) <= 1)


def phase_operator(dirac: np.ndarray, kernel_tol: float = 1e-12):
    """F = D |D|^{-1} with kernel mapped to +1; returns (F, kernel_flag)."""
    evals, evecs = np.linalg.eigh(np.asarray(dirac, dtype=complex))
    signs = np.sign(evals)
    had_kernel = bool(np.any(np.abs(evals) <= kernel_tol))
    signs[np.abs(evals) <= kernel_tol] = 1.0
    f = (evecs * signs) @ evecs.conj().T
    return f, had_kernel
