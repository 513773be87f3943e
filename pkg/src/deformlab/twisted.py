"""Twisted group algebras on l2 of the group.

Generators act by lambda^w_g delta_h = w(g, h) delta_{g h}; that single
convention is used everywhere.  Elements are finitely supported coefficient
maps; twisted convolution and involution work on both backends, while the
matrix model is finite-group only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np

from .cocycles import (
    TwoCocycleU1,
    UnitaryCocycle,
    check_cohomologous,
    product_cocycle,
)
from .errors import CocycleMismatch, NotCohomologous
from .groups import FiniteGroup
from .linalg import MonomialUnitary, max_abs, random_complex

RELATIONS_TOL = 1e-12
TRACE_TOL = 1e-10


@dataclass
class TwistedGroupElement:
    """Finitely supported element  sum_g coeffs[g] lambda^w_g."""

    cocycle: UnitaryCocycle
    coeffs: Dict

    @property
    def group(self):
        return self.cocycle.group

    def cleaned(self, tol: float = 0.0) -> "TwistedGroupElement":
        kept = {g: c for g, c in self.coeffs.items() if abs(c) > tol}
        return TwistedGroupElement(self.cocycle, kept)

    def coefficient(self, g) -> complex:
        return complex(self.coeffs.get(g, 0.0))


def delta_element(cocycle: UnitaryCocycle, g, coeff: complex = 1.0) -> TwistedGroupElement:
    return TwistedGroupElement(cocycle, {g: complex(coeff)})


def _same_twist(x: TwistedGroupElement, y: TwistedGroupElement) -> None:
    if x.cocycle is y.cocycle:
        return
    a, b = x.cocycle, y.cocycle
    if isinstance(a, TwoCocycleU1) and isinstance(b, TwoCocycleU1) and a.same_as(b):
        return
    raise CocycleMismatch("elements live over different cocycles")


def multiply(x: TwistedGroupElement, y: TwistedGroupElement) -> TwistedGroupElement:
    """Twisted convolution (x y)(k) = sum_{g h = k} x(g) y(h) w(g, h)."""
    _same_twist(x, y)
    group = x.group
    w = x.cocycle
    out: Dict = {}
    for g, cg in x.coeffs.items():
        for h, ch in y.coeffs.items():
            k = group.mul(g, h)
            out[k] = out.get(k, 0.0) + cg * ch * w.value(g, h)
    return TwistedGroupElement(x.cocycle, out)


def involute(x: TwistedGroupElement) -> TwistedGroupElement:
    """x*(g) = conj(w(g, g^{-1})) conj(x(g^{-1}))."""
    group = x.group
    w = x.cocycle
    out: Dict = {}
    for h, ch in x.coeffs.items():
        g = group.inv(h)
        out[g] = out.get(g, 0.0) + np.conj(w.value(g, h)) * np.conj(ch)
    return TwistedGroupElement(x.cocycle, out)


def standard_trace(x: TwistedGroupElement) -> complex:
    """Coefficient at the identity element."""
    return x.coefficient(x.group.identity)


def untwisted_convolution(x_coeffs: Dict, y_coeffs: Dict, group) -> Dict:
    """Plain group-algebra convolution; the independent oracle for trivial twist."""
    out: Dict = {}
    for g, cg in x_coeffs.items():
        for h, ch in y_coeffs.items():
            k = group.mul(g, h)
            out[k] = out.get(k, 0.0) + cg * ch
    return out


# ---------------------------------------------------------------------------
# Matrix model on a finite group.

def lambda_monomial(omega: TwoCocycleU1, g: int) -> MonomialUnitary:
    group = omega.group
    return MonomialUnitary(group.cayley[g].copy(), omega.table[g].copy())


def lambda_matrix(omega: TwoCocycleU1, g: int) -> np.ndarray:
    """|G| x |G| matrix with entry w(g, h) at (g h, h)."""
    omega.group.require_finite()
    return lambda_monomial(omega, g).matrix()


def element_matrix(x: TwistedGroupElement) -> np.ndarray:
    group = x.group.require_finite()
    out = np.zeros((group.order, group.order), dtype=complex)
    for g, c in x.coeffs.items():
        out += c * lambda_matrix(x.cocycle, g)
    return out


def rho_monomial(group: FiniteGroup, k: int) -> MonomialUnitary:
    """Right translation delta_h -> delta_{h k^{-1}}."""
    return MonomialUnitary(group.cayley[:, group.inv(k)].copy())


@dataclass
class RelationsReport:
    max_product_residual: float
    max_adjoint_residual: float
    max_unitarity_defect: float

    @property
    def max_residual(self) -> float:
        return max(self.max_product_residual, self.max_adjoint_residual,
                   self.max_unitarity_defect)

    def passed(self, tol: float = RELATIONS_TOL) -> bool:
        return self.max_residual <= tol


def relations_check(omega: TwoCocycleU1) -> RelationsReport:
    """lambda_g lambda_h = w(g,h) lambda_{gh} and lambda_g* = conj(w(g,g^{-1})) lambda_{g^{-1}}."""
    group = omega.group.require_finite()
    mats = [lambda_matrix(omega, g) for g in group.elements()]
    prod_res = 0.0
    for g in group.elements():
        for h in group.elements():
            lhs = mats[g] @ mats[h]
            rhs = omega.value(g, h) * mats[group.mul(g, h)]
            prod_res = max(prod_res, max_abs(lhs - rhs))
    adj_res = 0.0
    unit_res = 0.0
    eye = np.eye(group.order)
    for g in group.elements():
        gi = group.inv(g)
        adj_res = max(adj_res, max_abs(mats[g].conj().T - np.conj(omega.value(g, gi)) * mats[gi]))
        unit_res = max(unit_res, max_abs(mats[g].conj().T @ mats[g] - eye))
    return RelationsReport(prod_res, adj_res, unit_res)


def fundamental_unitary(omega: TwoCocycleU1) -> MonomialUnitary:
    """W^w (delta_h ox delta_k) = w(h, k) delta_h ox delta_{h k}, on l2 ox l2."""
    group = omega.group.require_finite()
    n = group.order
    idx_h, idx_k = np.divmod(np.arange(n * n), n)
    perm = idx_h * n + group.cayley[idx_h, idx_k]
    phase = omega.table[idx_h, idx_k]
    return MonomialUnitary(perm, phase)


def coproduct_conjugation_residual(alpha: TwoCocycleU1, beta: TwoCocycleU1) -> float:
    """Residual of  W^b (lambda^{ab}_g ox 1) (W^b)* = lambda^a_g ox lambda^b_g  over g."""
    group = alpha.group.require_finite()
    if group != beta.group:
        raise CocycleMismatch("cocycles live on different groups")
    n = group.order
    w = fundamental_unitary(beta)
    ab = product_cocycle(alpha, beta)
    worst = 0.0
    for g in group.elements():
        lhs = w.conjugate_dense(np.kron(lambda_matrix(ab, g), np.eye(n)))
        rhs = np.kron(lambda_matrix(alpha, g), lambda_matrix(beta, g))
        worst = max(worst, max_abs(lhs - rhs))
    return worst


def ad_twisted_coefficient(omega: TwoCocycleU1, g: int, h: int) -> complex:
    """Scalar c with  lambda_g lambda_h lambda_g* = c lambda_{g h g^{-1}}."""
    group = omega.group
    gi = group.inv(g)
    return (omega.value(g, h) * omega.value(group.mul(g, h), gi)
            * np.conj(omega.value(g, gi)))


def cohomologous_isomorphism(psi, x: TwistedGroupElement,
                             target: TwoCocycleU1) -> TwistedGroupElement:
    """Transport lambda^w_g -> conj(psi(g)) lambda^{w'}_g, extended linearly.

    Requires psi to witness that the source and target cocycles are
    cohomologous; raises NotCohomologous otherwise.
    """
    source = x.cocycle
    if not isinstance(source, TwoCocycleU1):
        raise CocycleMismatch("transport needs a dense finite-group cocycle")
    if not check_cohomologous(source, target, psi):
        raise NotCohomologous("psi does not intertwine the two cocycles")
    psi = np.asarray(psi, dtype=complex)
    out = {g: c * np.conj(psi[g]) for g, c in x.coeffs.items()}
    return TwistedGroupElement(target, out)


@dataclass
class YetterDrinfeldReport:
    max_diagram_residual: float
    max_ad_formula_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.max_diagram_residual, self.max_ad_formula_residual)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_residual <= tol


def yetter_drinfeld_check(omega: TwoCocycleU1) -> YetterDrinfeldReport:
    """Both composites of the compatibility diagram on each generator.

    Top route:    sum_h delta_h ox lambda_g ox lambda_h* lambda_g lambda_h.
    Bottom route: conjugate  sum_h delta_h ox lambda_{h^{-1} g h} ox (same third leg)
    by the untwisted shift unitary on legs 1, 2.  Also verifies the adjoint
    action coefficient  w(g,h) w(gh,g^{-1}) conj(w(g,g^{-1})).
    """
    group = omega.group.require_finite()
    n = group.order
    lam_w = [lambda_matrix(omega, g) for g in group.elements()]
    lam_plain = [np.zeros((n, n), dtype=complex) for _ in group.elements()]
    for g in group.elements():
        lam_plain[g][group.cayley[g], np.arange(n)] = 1.0
    # untwisted fundamental unitary on legs 1,2 of a 3-leg space
    trivial = TwoCocycleU1(group, np.ones((n, n), dtype=complex))
    w12 = fundamental_unitary(trivial).kron(MonomialUnitary.identity(n))

    diag_res = 0.0
    ad_res = 0.0
    for g in group.elements():
        third = [lam_w[h].conj().T @ lam_w[g] @ lam_w[h] for h in group.elements()]
        top = np.zeros((n ** 3, n ** 3), dtype=complex)
        pre = np.zeros((n ** 3, n ** 3), dtype=complex)
        for h in group.elements():
            e_h = np.zeros((n, n), dtype=complex)
            e_h[h, h] = 1.0
            top += np.kron(e_h, np.kron(lam_plain[g], third[h]))
            conj_deg = group.mul(group.mul(group.inv(h), g), h)
            pre += np.kron(e_h, np.kron(lam_plain[conj_deg], third[h]))
        bottom = w12.conjugate_dense(pre)
        diag_res = max(diag_res, max_abs(top - bottom))
        for h in group.elements():
            ghg = group.mul(group.mul(g, h), group.inv(g))
            coeff = ad_twisted_coefficient(omega, g, h)
            ad_res = max(ad_res, max_abs(lam_w[g] @ lam_w[h] @ lam_w[g].conj().T
                                         - coeff * lam_w[ghg]))
    return YetterDrinfeldReport(diag_res, ad_res)


def traciality_residual(omega: TwoCocycleU1, pairs: int = 100, seed: int = 0) -> float:
    """max |tr(x y) - tr(y x)| over seeded random pairs."""
    group = omega.group.require_finite()
    rng = np.random.default_rng([seed, group.order, 7])
    worst = 0.0
    for _ in range(pairs):
        x = TwistedGroupElement(omega, dict(enumerate(random_complex(rng, group.order))))
        y = TwistedGroupElement(omega, dict(enumerate(random_complex(rng, group.order))))
        worst = max(worst,
                    abs(standard_trace(multiply(x, y)) - standard_trace(multiply(y, x))))
    return worst
