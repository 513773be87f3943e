"""Config-driven check suites with machine-readable, deterministic reports.

Every check record carries a stable anchor identifier naming the identity it
exercises, an explicit tolerance, and a numeric or boolean outcome.  Reports
contain no wall-clock data so that two runs of the same scenario serialize to
identical bytes; per-suite timings go to the console instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import catalog
from .bundles import approximation_identity_residual, coaction_check
from .catalog import BUILTINS, ScenarioInputs
from .cocycles import (
    check_cohomologous,
    coboundary_solve,
    conjugate_cocycle,
    exp_cocycle,
    opposite_cocycle,
    product_cocycle,
    trivial_cocycle,
    validate_cocycle,
)
from .crossed import (
    constant_field_residual,
    crossed_product,
    dual_action_check,
    exterior_equivalence_check,
    group_algebra_untwist_residual,
    iterated_crossed_product,
    solve_w_witness,
    untwist_isomorphism,
    v_multiplicativity_check,
    w_cocycle,
)
from .deformation import (
    braided_model_check,
    cohomologous_transport_residual,
    deform,
    deform_path,
    iterate_check,
    norm_preservation_residual,
    twisted_structure_constants,
)
from .errors import ConfigInvalid, GapClosed
from .groups import Subgroup
from .k0 import block_decompose, k0_along_path, morita_rank_check
from .linalg import max_abs
from .spectral import (
    ProjectionRule,
    covariant_unitary,
    deform_triple,
    index_invariance_along_path,
)
from .twisted import (
    TwistedGroupElement,
    delta_element,
    element_matrix,
    involute,
    multiply,
    relations_check,
    standard_trace,
    traciality_residual,
    untwisted_convolution,
    yetter_drinfeld_check,
)

ANCHORS = frozenset({
    "cocycle-ident-omega",
    "opposite-cocycle",
    "reg-omega-rep-unitary",
    "tw-grp-alg-YD-Gamma-alg-comm-diag",
    "A-omega-alt-dfn",
    "triv-param-case",
    "deformation-param-additivity",
    "cross-prod-C-0-Gamma-A-omega",
    "isom-tw-cross-c0-untw-cross-c0",
    "omega-delta-hat-on-untw-crossed-prod",
    "tw-cross-prod-YD-alg-C-0-coact",
    "v-k-dfn",
    "v-k-multiplicativity-with-omega",
    "calc-w-k-cocycle-ident",
    "tilde-omega-0-is-cbd-alpha",
    "fin-subgrp-ext-equiv-on-A-C-Gamma-C-0",
    "approx-seq-bddness",
    "approx-seq-approximation",
    "approx-property-invariance",
    "C-0-Gamma-crossed-prod-cont-field-triv-wo-Gamma-action",
    "K-grp-isom-for-BC-coeff",
    "A-omega-st-Mor-equiv-iter-twist-cross-prod",
    "rep-of-deformed-alg-from-covar-rep",
    "ext-equiv-str-Mor-equiv-deform",
    "Gamma-on-cont-field",
})

DEFAULT_TOLERANCES = {
    "cocycle": 1e-12,
    "cohomologous": 1e-10,
    "relations": 1e-12,
    "trace": 1e-10,
    "deform": 1e-10,
    "crossed": 1e-10,
    "index": 1e-6,
}


@dataclass
class CheckRecord:
    name: str
    anchor: str
    kind: str                 # "residual" | "verdict" | "value"
    value: object
    tolerance: Optional[float]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "kind": self.kind,
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class Report:
    scenario: str
    seed: int
    theta_grid: list
    checks: list
    environment: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "theta_grid": list(self.theta_grid),
            "environment": self.environment,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass
class Scenario:
    name: str
    inputs: ScenarioInputs
    suites: tuple
    theta_grid: tuple = tuple(np.linspace(0.0, 1.0, 11))
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))


def builtin_scenario(name: str, theta_grid=None, seed: int = 0,
                     tolerances: Optional[dict] = None) -> Scenario:
    if name not in BUILTINS:
        raise ConfigInvalid("builtin", f"unknown builtin {name!r}; see `deformctl list`")
    spec = BUILTINS[name]
    grid = tuple(theta_grid) if theta_grid is not None else tuple(np.linspace(0.0, 1.0, 11))
    return Scenario(name, spec.make(seed), spec.suites, grid, seed, tolerances or {})


def list_builtins():
    return catalog.list_builtins()


def _residual(name, anchor, value, tol) -> CheckRecord:
    return CheckRecord(name, anchor, "residual", float(value), float(tol),
                       bool(value <= tol))


def _verdict(name, anchor, value) -> CheckRecord:
    return CheckRecord(name, anchor, "verdict", bool(value), None, bool(value))


def _value(name, anchor, value) -> CheckRecord:
    return CheckRecord(name, anchor, "value", value, None, True)


# ---------------------------------------------------------------------------
# Suites.

def cocycle_suite(sc: Scenario) -> list:
    records = []
    tol = sc.tol("cocycle")
    ctol = sc.tol("cohomologous")
    for name, omega in sc.inputs.u1_cocycles:
        v = validate_cocycle(omega)
        records.append(_residual(f"{name}:identity", "cocycle-ident-omega",
                                 max(v.max_identity_residual, v.max_normalization_residual,
                                     v.max_modulus_deviation), tol))
        opp = opposite_cocycle(omega)
        records.append(_residual(f"{name}:opposite-valid", "opposite-cocycle",
                                 validate_cocycle(opp).max_identity_residual, tol))
        group = omega.group
        psi = np.array([omega.value(g, group.inv(g)) for g in group.elements()])
        records.append(_verdict(f"{name}:conjugate-vs-opposite", "opposite-cocycle",
                                check_cohomologous(conjugate_cocycle(omega), opp, psi, ctol)))
        double_opp = opposite_cocycle(opp)
        records.append(_residual(f"{name}:opposite-involutive", "opposite-cocycle",
                                 max_abs(double_opp.table - omega.table), tol))
        records.append(_residual(
            f"{name}:conjugate-product-trivial", "cocycle-ident-omega",
            max_abs(product_cocycle(omega, conjugate_cocycle(omega)).table - 1.0), tol))
    for name, omega0 in sc.inputs.real_cocycles:
        v = validate_cocycle(omega0)
        records.append(_residual(f"{name}:identity", "cocycle-ident-omega",
                                 max(v.max_identity_residual, v.max_normalization_residual),
                                 tol))
        witness = coboundary_solve(omega0)
        records.append(_residual(f"{name}:coboundary", "tilde-omega-0-is-cbd-alpha",
                                 witness.residual, sc.tol("cohomologous")))
        lhs = exp_cocycle(omega0, 0.7 + 0.2)
        rhs = product_cocycle(exp_cocycle(omega0, 0.7), exp_cocycle(omega0, 0.2))
        records.append(_residual(f"{name}:exp-additive", "cocycle-ident-omega",
                                 max_abs(lhs.table - rhs.table), tol))
    for name, form in sc.inputs.bilinear:
        v = validate_cocycle(form, samples=100, seed=sc.seed)
        records.append(_residual(f"{name}:identity-sampled", "cocycle-ident-omega",
                                 max(v.max_identity_residual, v.max_normalization_residual),
                                 tol))
    return records


def tga_suite(sc: Scenario) -> list:
    records = []
    rtol = sc.tol("relations")
    ttol = sc.tol("trace")
    for name, omega in sc.inputs.u1_cocycles:
        rep = relations_check(omega)
        records.append(_residual(f"{name}:relations", "reg-omega-rep-unitary",
                                 rep.max_residual, rtol))
        records.append(_residual(f"{name}:traciality", "reg-omega-rep-unitary",
                                 traciality_residual(omega, pairs=100, seed=sc.seed), ttol))
        records.append(_residual(f"{name}:matrix-vs-convolution", "reg-omega-rep-unitary",
                                 _matrix_model_residual(omega, sc.seed), rtol))
        yd = yetter_drinfeld_check(omega)
        records.append(_residual(f"{name}:yetter-drinfeld",
                                 "tw-grp-alg-YD-Gamma-alg-comm-diag",
                                 yd.max_residual, sc.tol("deform")))
    for name, form in sc.inputs.bilinear:
        records.append(_residual(f"{name}:uv-commutation", "cocycle-ident-omega",
                                 _nc_torus_relation_residual(form), rtol))
        records.append(_residual(f"{name}:trace-positivity", "cocycle-ident-omega",
                                 _zn_trace_residual(form, sc.seed), ttol))
    return records


def _matrix_model_residual(omega, seed: int) -> float:
    """Twisted convolution against the concrete matrix product, plus the
    untwisted independent oracle when the twist is trivial."""
    group = omega.group
    rng = np.random.default_rng([seed, group.order, 5])
    worst = 0.0
    for _ in range(20):
        x = TwistedGroupElement(omega, {g: complex(c) for g, c in
                                        enumerate(rng.standard_normal(group.order)
                                                  + 1j * rng.standard_normal(group.order))})
        y = TwistedGroupElement(omega, {g: complex(c) for g, c in
                                        enumerate(rng.standard_normal(group.order)
                                                  + 1j * rng.standard_normal(group.order))})
        prod = multiply(x, y)
        worst = max(worst, max_abs(element_matrix(prod)
                                   - element_matrix(x) @ element_matrix(y)))
        worst = max(worst, max_abs(element_matrix(involute(x))
                                   - element_matrix(x).conj().T))
        if max_abs(omega.table - 1.0) == 0.0:
            oracle = untwisted_convolution(x.coeffs, y.coeffs, group)
            diff = {g: prod.coefficient(g) - oracle.get(g, 0.0) for g in group.elements()}
            worst = max(worst, max(abs(v) for v in diff.values()))
    return worst


def _nc_torus_relation_residual(form) -> float:
    """u v = e^{i theta} v u for the two generator delta-elements on Z^2."""
    group = form.group
    u = delta_element(form, group.basis_vector(0))
    v = delta_element(form, group.basis_vector(1))
    uv = multiply(u, v)
    vu = multiply(v, u)
    e1, e2 = group.basis_vector(0), group.basis_vector(1)
    phase = form.value(e1, e2) * np.conj(form.value(e2, e1))
    target = {g: phase * c for g, c in vu.coeffs.items()}
    support = set(uv.coeffs) | set(target)
    return max(abs(uv.coeffs.get(g, 0.0) - target.get(g, 0.0)) for g in support)


def _zn_trace_residual(form, seed: int) -> float:
    group = form.group
    rng = np.random.default_rng([seed, group.rank, 13])
    worst = 0.0
    for _ in range(20):
        support = [tuple(int(v) for v in rng.integers(-3, 4, group.rank))
                   for _ in range(4)]
        coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        x = TwistedGroupElement(form, dict(zip(support, coeffs)))
        y = TwistedGroupElement(form, dict(zip(
            [tuple(int(v) for v in rng.integers(-3, 4, group.rank)) for _ in range(4)],
            rng.standard_normal(4) + 1j * rng.standard_normal(4))))
        worst = max(worst, abs(standard_trace(multiply(x, y))
                               - standard_trace(multiply(y, x))))
        positivity = standard_trace(multiply(involute(x), x)).real
        worst = max(worst, max(0.0, -positivity))
    return worst


def deform_suite(sc: Scenario) -> list:
    records = []
    dtol = sc.tol("deform")
    for bname, bundle in sc.inputs.bundles:
        records.append(_residual(f"{bname}:coaction", "A-omega-alt-dfn",
                                 coaction_check(bundle).max_multiplicativity_residual, dtol))
        records.append(_residual(f"{bname}:averaging-identity", "approx-seq-approximation",
                                 approximation_identity_residual(bundle), dtol))
        for cname, omega in sc.inputs.u1_cocycles:
            if omega.group != bundle.group:
                continue
            dalg = deform(bundle, omega)
            records.append(_residual(f"{bname}:{cname}:membership", "A-omega-alt-dfn",
                                     dalg.intertwining_residual, dtol))
            oracle = twisted_structure_constants(bundle, omega)
            records.append(_residual(f"{bname}:{cname}:oracle-agreement", "A-omega-alt-dfn",
                                     dalg.sc.max_difference(oracle), dtol))
            records.append(_residual(f"{bname}:{cname}:unit", "A-omega-alt-dfn",
                                     dalg.unit_residual(), dtol))
            records.append(_residual(f"{bname}:{cname}:norm-preservation",
                                     "approx-property-invariance",
                                     norm_preservation_residual(dalg), dtol))
            if max_abs(omega.table - 1.0) == 0.0:
                from .star_algebra import structure_constants_from_matrices

                untwisted = structure_constants_from_matrices(list(bundle.basis))[0]
                records.append(_residual(f"{bname}:{cname}:trivial-case", "triv-param-case",
                                         dalg.sc.max_difference(untwisted), dtol))
            records.append(_residual(f"{bname}:{cname}:braided-model", "A-omega-alt-dfn",
                                     braided_model_check(bundle, omega).max_residual, dtol))
        if len(sc.inputs.u1_cocycles) >= 2:
            (n1, w1), (n2, w2) = sc.inputs.u1_cocycles[0], sc.inputs.u1_cocycles[1]
            if w1.group == bundle.group and w2.group == bundle.group:
                rep = iterate_check(bundle, w1, w2)
                records.append(_residual(f"{bname}:iterate[{n1},{n2}]",
                                         "deformation-param-additivity",
                                         rep.max_difference, dtol))
        for rname, omega0 in sc.inputs.real_cocycles:
            if omega0.group != bundle.group:
                continue
            path = deform_path(bundle, omega0, sc.theta_grid)
            records.append(_verdict(f"{bname}:{rname}:path-lipschitz",
                                    "K-grp-isom-for-BC-coeff", path.bound_satisfied))
    return records


def crossed_suite(sc: Scenario) -> list:
    records = []
    xtol = sc.tol("crossed")
    for bname, bundle in sc.inputs.bundles:
        cp = crossed_product(bundle, seed=sc.seed)
        records.append(_residual(f"{bname}:crossed-closure", "cross-prod-C-0-Gamma-A-omega",
                                 max(cp.matrix_agreement_residual,
                                     cp.diagonal_membership_residual), xtol))
        for cname, omega in sc.inputs.u1_cocycles:
            if omega.group != bundle.group:
                continue
            rep = untwist_isomorphism(bundle, omega)
            records.append(_residual(f"{bname}:{cname}:untwist",
                                     "cross-prod-C-0-Gamma-A-omega", rep.max_residual, xtol))
            records.append(_residual(f"{cname}:group-algebra-untwist",
                                     "isom-tw-cross-c0-untw-cross-c0",
                                     group_algebra_untwist_residual(omega), xtol))
            records.append(_residual(f"{bname}:{cname}:dual-action",
                                     "tw-cross-prod-YD-alg-C-0-coact",
                                     dual_action_check(bundle, omega).max_residual, xtol))
            records.append(_residual(f"{cname}:v-multiplicativity",
                                     "v-k-multiplicativity-with-omega",
                                     v_multiplicativity_check(omega).max_residual, xtol))
        for rname, omega0 in sc.inputs.real_cocycles:
            if omega0.group != bundle.group:
                continue
            group = omega0.group
            full = Subgroup(group, tuple(group.elements()))
            wrep = w_cocycle(omega0, full, None, sc.theta_grid)
            records.append(_residual(f"{bname}:{rname}:w-cocycle",
                                     "calc-w-k-cocycle-ident", wrep.max_residual, xtol))
            records.append(_residual(f"{bname}:{rname}:constant-field",
                                     "C-0-Gamma-crossed-prod-cont-field-triv-wo-Gamma-action",
                                     constant_field_residual(bundle, omega0, sc.theta_grid),
                                     xtol))
            verdict, witness = _dual_exterior_equivalence(bundle, omega0)
            records.append(_verdict(f"{bname}:{rname}:exterior-equivalence",
                                    "ext-equiv-str-Mor-equiv-deform", verdict))
    return records


def _dual_exterior_equivalence(bundle, omega0):
    """The plain and twisted dual translates on the crossed product are
    exterior equivalent via the phase-corrected diagonal unitaries."""
    from .bundles import plain_lambda_matrix
    from .twisted import rho_monomial

    group = bundle.group
    omega = exp_cocycle(omega0, 1.0)
    full = Subgroup(group, tuple(group.elements()))
    witness = solve_w_witness(omega0, full)
    n, big_n = group.order, bundle.ambient_dim
    cp = crossed_product(bundle)
    generators = cp.matrices
    alpha_unitaries = {}
    u_family = {}
    for k in group.elements():
        rho = rho_monomial(group, k).matrix()
        alpha_unitaries[k] = np.kron(rho, np.eye(big_n))
        diag = np.exp(-1j * witness.phi_of(k)) * omega.table[group.cayley[:, k], group.inv(k)]
        u_family[k] = np.kron(np.diag(diag), np.eye(big_n))

    def beta(k, idx):
        i, h = cp.labels[idx]
        from .crossed import dual_action_coefficient

        coeff = dual_action_coefficient(bundle, omega, i, h, k)
        return coeff * cp.matrices[cp.labels.index((i, group.mul(h, group.inv(k))))]

    return exterior_equivalence_check(full, alpha_unitaries, beta, u_family, generators)


def k0_suite(sc: Scenario) -> list:
    records = []
    for bname, bundle in sc.inputs.bundles:
        untwisted_sig = block_decompose(
            [np.asarray(b) for b in bundle.basis], seed=sc.seed)
        records.append(_value(f"{bname}:blocks", "K-grp-isom-for-BC-coeff",
                              list(untwisted_sig.block_dims)))
        for cname, omega in sc.inputs.u1_cocycles:
            if omega.group != bundle.group:
                continue
            dalg = deform(bundle, omega)
            sig = block_decompose(dalg.sc, seed=sc.seed)
            records.append(_value(f"{bname}:{cname}:blocks", "K-grp-isom-for-BC-coeff",
                                  list(sig.block_dims)))
            if bundle.group.order ** 2 * bundle.size <= 600:
                iterated = iterated_crossed_product(bundle, omega)
                records.append(_verdict(f"{bname}:{cname}:morita-rank",
                                        "A-omega-st-Mor-equiv-iter-twist-cross-prod",
                                        morita_rank_check(dalg.sc, iterated, seed=sc.seed)))
        for rname, omega0 in sc.inputs.real_cocycles:
            if omega0.group != bundle.group:
                continue
            path = k0_along_path(bundle, omega0, sc.theta_grid, seed=sc.seed)
            records.append(_verdict(f"{bname}:{rname}:rank-invariance",
                                    "K-grp-isom-for-BC-coeff", path.invariant))
    return records


def triple_suite(sc: Scenario) -> list:
    records = []
    ttol = sc.tol("deform")
    for tname, triple in sc.inputs.triples:
        _, cov = covariant_unitary(triple)
        records.append(_residual(f"{tname}:covariance", "rep-of-deformed-alg-from-covar-rep",
                                 cov.max_residual, ttol))
        for cname, omega in sc.inputs.u1_cocycles:
            if omega.group != triple.group:
                continue
            deformed = deform_triple(triple, omega)
            records.append(_residual(f"{tname}:{cname}:representation",
                                     "rep-of-deformed-alg-from-covar-rep",
                                     max(deformed.homomorphism_residual,
                                         deformed.restriction_residual), ttol))
        for rname, omega0 in sc.inputs.real_cocycles:
            if omega0.group != triple.group:
                continue
            rule = _default_rule(triple)
            if rule is None:
                continue
            try:
                path = index_invariance_along_path(triple, omega0, sc.theta_grid, rule)
                records.append(_verdict(f"{tname}:{rname}:index-invariance",
                                        "K-grp-isom-for-BC-coeff", path.constant))
            except GapClosed:
                records.append(_verdict(f"{tname}:{rname}:index-invariance",
                                        "K-grp-isom-for-BC-coeff", False))
    return records


def _default_rule(triple) -> Optional[ProjectionRule]:
    """Symmetrized unit, cut at 1/2: gap-protected for every twist since the
    degree-e action is twist-independent."""
    rule = ProjectionRule(np.asarray(triple.bundle.unit_coeffs), cut=0.5)
    try:
        deformed = deform_triple(triple, trivial_cocycle(triple.group))
        rule.projection(deformed)
    except GapClosed:
        return None
    return rule


SUITE_FUNCTIONS = {
    "cocycle": cocycle_suite,
    "tga": tga_suite,
    "deform": deform_suite,
    "crossed": crossed_suite,
    "k0": k0_suite,
    "triple": triple_suite,
}


def run_scenario(sc: Scenario, echo=None) -> Report:
    """Execute the selected suites in deterministic order."""
    import time

    checks = []
    for suite in sc.suites:
        if suite not in SUITE_FUNCTIONS:
            raise ConfigInvalid("suites", f"unknown suite {suite!r}")
        start = time.perf_counter()
        checks.extend(SUITE_FUNCTIONS[suite](sc))
        if echo is not None:
            echo(f"  suite {suite}: {time.perf_counter() - start:.2f}s")
    for record in checks:
        if record.anchor not in ANCHORS:
            raise ConfigInvalid("checks", f"record {record.name} has unknown anchor")
    return Report(
        scenario=sc.name,
        seed=sc.seed,
        theta_grid=[float(t) for t in sc.theta_grid],
        checks=checks,
        environment={"precision": "complex128", "package": "deformlab-0.1.0"},
    )
