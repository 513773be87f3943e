"""Normalized 2-cocycles with values in U(1) or R.

U(1) values are stored as complex numbers (never as angles) so that the
downstream matrix models multiply exactly in the stored representation.
Normalization is against the neutral element of the target group: value 1 for
U(1), value 0 for R, required to hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    GroupMismatch,
    NoSolution,
    NotSkewSymmetric,
)
from .groups import FiniteGroup, FreeAbelianGroup, Group, Subgroup
from .linalg import derived_rng, max_abs

COCYCLE_IDENTITY_TOL = 1e-12
MODULUS_TOL = 1e-12
COHOMOLOGOUS_TOL = 1e-10
COBOUNDARY_TOL = 1e-10


class UnitaryCocycle:
    """Common interface of U(1)-valued cocycles: a group and a value map."""

    group: Group

    def value(self, g, h) -> complex:
        raise NotImplementedError


class TwoCocycleU1(UnitaryCocycle):
    """Dense U(1) cocycle table on a finite group.

    The normalization entries along the identity row and column are held
    exactly at 1: construction snaps them when they agree to 1e-12, so that
    operation outputs (products, transports) keep the invariant on the nose.
    """

    def __init__(self, group: FiniteGroup, table):
        group.require_finite()
        table = np.array(table, dtype=complex)
        if table.shape != (group.order, group.order):
            raise DimensionMismatch(
                f"cocycle table shape {table.shape} does not match group order {group.order}"
            )
        e = group.identity
        for line in (table[e, :], table[:, e]):
            near = np.abs(line - 1.0) <= 1e-12
            line[near] = 1.0
        table.setflags(write=False)
        self.group = group
        self.table = table

    def value(self, g: int, h: int) -> complex:
        return complex(self.table[g, h])

    def same_as(self, other: "TwoCocycleU1") -> bool:
        return self.group == other.group and np.array_equal(self.table, other.table)


class BilinearCocycle(UnitaryCocycle):
    """Closed-form cocycle omega(x, y) = e^{i <theta x, y>} on Z^n."""

    def __init__(self, form):
        form = np.array(form, dtype=float)
        if form.ndim != 2 or form.shape[0] != form.shape[1]:
            raise NotSkewSymmetric(f"form must be square, got shape {form.shape}")
        if max_abs(form + form.T) > 1e-12:
            raise NotSkewSymmetric(
                f"form is not skew-symmetric: max |theta + theta^T| = {max_abs(form + form.T):.3e}"
            )
        form.setflags(write=False)
        self.form = form
        self.group = FreeAbelianGroup(form.shape[0])

    def value(self, x, y) -> complex:
        xv = np.asarray(x, dtype=float)
        yv = np.asarray(y, dtype=float)
        return complex(np.exp(1j * float(self.form @ xv @ yv)))


class TwoCocycleReal:
    """Dense R-valued cocycle table on a finite group (additive identity).

    Normalization entries are snapped to exactly 0 when within 1e-12.
    """

    def __init__(self, group: FiniteGroup, table):
        group.require_finite()
        table = np.array(table, dtype=float)
        if table.shape != (group.order, group.order):
            raise DimensionMismatch(
                f"cocycle table shape {table.shape} does not match group order {group.order}"
            )
        e = group.identity
        for line in (table[e, :], table[:, e]):
            near = np.abs(line) <= 1e-12
            line[near] = 0.0
        table.setflags(write=False)
        self.group = group
        self.table = table

    def value(self, g: int, h: int) -> float:
        return float(self.table[g, h])


@dataclass
class CocycleValidation:
    max_identity_residual: float
    max_normalization_residual: float
    max_modulus_deviation: float
    passed: bool
    witness: Optional[tuple] = None


@dataclass
class CoboundaryWitness:
    """phi with phi(e) = 0 and table(h0, h1) = phi(h0) - phi(h0 h1) + phi(h1)."""

    subgroup: Subgroup
    phi: np.ndarray          # indexed by position in subgroup.members
    residual: float

    def phi_of(self, g: int) -> float:
        return float(self.phi[self.subgroup.position(g)])


def trivial_cocycle(group: FiniteGroup) -> TwoCocycleU1:
    return TwoCocycleU1(group, np.ones((group.order, group.order), dtype=complex))


def zero_real_cocycle(group: FiniteGroup) -> TwoCocycleReal:
    return TwoCocycleReal(group, np.zeros((group.order, group.order)))


def validate_cocycle(cocycle, samples: int = 100, seed: int = 0) -> CocycleValidation:
    """Check normalization, the cocycle identity and (U(1) case) unimodularity.

    Dense tables are checked exhaustively; the Z^n closed form is checked on
    ``samples`` random integer-vector triples.
    """
    if isinstance(cocycle, BilinearCocycle):
        return _validate_closed_form(cocycle, samples, seed)
    group = cocycle.group
    n = group.order
    e = group.identity
    multiplicative = isinstance(cocycle, TwoCocycleU1)
    table = cocycle.table
    norm_res = max(max_abs(table[:, e] - (1 if multiplicative else 0)),
                   max_abs(table[e, :] - (1 if multiplicative else 0)))
    if multiplicative:
        modulus = max_abs(np.abs(table) - 1.0)
    else:
        modulus = 0.0
    cay = group.cayley
    # omega(g0,g1) * omega(g0g1,g2)  vs  omega(g1,g2) * omega(g0,g1g2), all triples
    if multiplicative:
        lhs = table[:, :, None] * table[cay, :]
        rhs = table[None, :, :] * table[:, cay]
    else:
        lhs = table[:, :, None] + table[cay, :]
        rhs = table[None, :, :] + table[:, cay]
    diff = np.abs(lhs - rhs)
    identity_res = float(diff.max()) if diff.size else 0.0
    witness = None
    passed = identity_res <= COCYCLE_IDENTITY_TOL and norm_res == 0.0 and modulus <= MODULUS_TOL
    if identity_res > COCYCLE_IDENTITY_TOL:
        g0, g1, g2 = np.unravel_index(int(np.argmax(diff)), diff.shape)
        witness = (int(g0), int(g1), int(g2))
    return CocycleValidation(identity_res, norm_res, modulus, passed, witness)


def _validate_closed_form(cocycle: BilinearCocycle, samples: int, seed: int) -> CocycleValidation:
    rng = derived_rng(seed, 17)
    rank = cocycle.group.rank
    worst = 0.0
    witness = None
    for _ in range(samples):
        x, y, z = (tuple(int(v) for v in rng.integers(-5, 6, rank)) for _ in range(3))
        lhs = cocycle.value(x, y) * cocycle.value(cocycle.group.mul(x, y), z)
        rhs = cocycle.value(y, z) * cocycle.value(x, cocycle.group.mul(y, z))
        r = abs(lhs - rhs)
        if r > worst:
            worst, witness = r, (x, y, z)
    e = cocycle.group.identity
    x0 = cocycle.group.basis_vector(0)
    norm_res = max(abs(cocycle.value(x0, e) - 1), abs(cocycle.value(e, x0) - 1))
    passed = worst <= COCYCLE_IDENTITY_TOL and norm_res == 0.0
    return CocycleValidation(worst, norm_res, 0.0, passed, witness if not passed else None)


def exp_cocycle(omega0: TwoCocycleReal, theta: float) -> TwoCocycleU1:
    """Entrywise e^{i theta omega0}."""
    return TwoCocycleU1(omega0.group, np.exp(1j * theta * omega0.table))


def opposite_cocycle(omega: TwoCocycleU1) -> TwoCocycleU1:
    """omega~(g, h) = omega(h^{-1}, g^{-1})."""
    inv = omega.group.inverse
    return TwoCocycleU1(omega.group, omega.table[np.ix_(inv, inv)].T)


def opposite_real_cocycle(omega0: TwoCocycleReal) -> TwoCocycleReal:
    inv = omega0.group.inverse
    return TwoCocycleReal(omega0.group, omega0.table[np.ix_(inv, inv)].T)


def conjugate_cocycle(omega: TwoCocycleU1) -> TwoCocycleU1:
    return TwoCocycleU1(omega.group, omega.table.conj())


def product_cocycle(alpha: TwoCocycleU1, beta: TwoCocycleU1) -> TwoCocycleU1:
    if alpha.group != beta.group:
        raise GroupMismatch("cocycles live on different groups")
    return TwoCocycleU1(alpha.group, alpha.table * beta.table)


def check_cohomologous(omega: TwoCocycleU1, omega_prime: TwoCocycleU1, psi,
                       tol: float = COHOMOLOGOUS_TOL) -> bool:
    """True iff psi(g) psi(h) omega(g,h) conj(psi(gh)) = omega'(g,h) everywhere."""
    if omega.group != omega_prime.group:
        raise GroupMismatch("cocycles live on different groups")
    group = omega.group
    psi = np.asarray(psi, dtype=complex)
    if abs(psi[group.identity] - 1.0) > 1e-12:
        raise ValueError("psi must send the identity to 1")
    transported = psi[:, None] * psi[None, :] * omega.table * psi[group.cayley].conj()
    return max_abs(transported - omega_prime.table) <= tol


def transport_cocycle(omega: TwoCocycleU1, psi) -> TwoCocycleU1:
    """The cohomologous cocycle psi psi omega conj(psi o mul)."""
    psi = np.asarray(psi, dtype=complex)
    return TwoCocycleU1(
        omega.group, psi[:, None] * psi[None, :] * omega.table * psi[omega.group.cayley].conj()
    )


def coboundary_from_potential(group: FiniteGroup, phi) -> TwoCocycleReal:
    """d(phi)(g, h) = phi(g) - phi(gh) + phi(h), with phi(e) forced to 0."""
    phi = np.asarray(phi, dtype=float).copy()
    phi[group.identity] = 0.0
    table = phi[:, None] - phi[group.cayley] + phi[None, :]
    return TwoCocycleReal(group, table)


def random_real_coboundary(group: FiniteGroup, seed: int, scale: float = 2.0) -> TwoCocycleReal:
    rng = derived_rng(seed, group.order, 101)
    phi = rng.uniform(-scale, scale, group.order)
    return coboundary_from_potential(group, phi)


def random_u1_coboundary(group: FiniteGroup, seed: int) -> TwoCocycleU1:
    return exp_cocycle(random_real_coboundary(group, seed), 1.0)


def coboundary_solve(table_on_h: TwoCocycleReal, subgroup: Optional[Subgroup] = None,
                     tol: float = COBOUNDARY_TOL) -> CoboundaryWitness:
    """Solve table(h0, h1) = phi(h0) - phi(h0 h1) + phi(h1) on a finite subgroup.

    Least squares over the |H|^2 equations in the |H|-1 unknowns phi(h), h != e;
    the residual gates acceptance.  H^2(H, R) = 0 guarantees solvability
    whenever the restricted table is a genuine cocycle, so NoSolution signals
    invalid input.  phi is unique only up to a homomorphism H -> R; no
    canonical representative is chosen.
    """
    group = table_on_h.group
    if subgroup is None:
        subgroup = Subgroup(group, tuple(range(group.order)))
    members = subgroup.members
    m = len(members)
    pos = {g: i for i, g in enumerate(members)}
    e_pos = pos[group.identity]
    unknowns = [i for i in range(m) if i != e_pos]
    col = {i: j for j, i in enumerate(unknowns)}
    rows = []
    rhs = []
    for a in members:
        for b in members:
            row = np.zeros(len(unknowns))
            for g, sign in ((a, 1.0), (group.mul(a, b), -1.0), (b, 1.0)):
                i = pos[g]
                if i != e_pos:
                    row[col[i]] += sign
            rows.append(row)
            rhs.append(table_on_h.value(a, b))
    a_mat = np.array(rows)
    b_vec = np.array(rhs)
    sol, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
    residual = max_abs(a_mat @ sol - b_vec)
    if residual > tol:
        raise NoSolution(residual, tol)
    phi = np.zeros(m)
    for i, j in col.items():
        phi[i] = sol[j]
    return CoboundaryWitness(subgroup, phi, float(residual))


def bilinear_cocycle(theta_matrix) -> BilinearCocycle:
    """Closed-form cocycle on Z^n from a skew-symmetric form."""
    return BilinearCocycle(theta_matrix)


def restrict_real_cocycle(omega0: TwoCocycleReal, subgroup: Subgroup) -> TwoCocycleReal:
    """The restricted table, reindexed by subgroup position.

    The result's group is the subgroup's own Cayley table.
    """
    members = list(subgroup.members)
    pos = {g: i for i, g in enumerate(members)}
    m = len(members)
    cay = np.array([[pos[omega0.group.mul(a, b)] for b in members] for a in members])
    sub_group = FiniteGroup(cay, name=f"{omega0.group.name}-sub{m}")
    table = omega0.table[np.ix_(members, members)]
    return TwoCocycleReal(sub_group, table)
