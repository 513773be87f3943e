import numpy as np
import pytest

from deformlab.catalog import (
    diagonal_bundle,
    group_algebra_bundle,
    pauli_bundle,
    product_bicharacter,
    scalar_bundle,
)
from deformlab.cocycles import (
    exp_cocycle,
    random_real_coboundary,
    trivial_cocycle,
)
from deformlab.crossed import (
    IteratedCrossedProduct,
    crossed_product,
    dual_action,
    dual_action_check,
    dual_action_coefficient,
    exterior_equivalence_check,
    group_algebra_untwist_residual,
    iterated_crossed_product,
    solve_w_witness,
    untwist_isomorphism,
    untwist_phases,
    v_multiplicativity_check,
    v_unitary,
    w_cocycle,
)
from deformlab.errors import WitnessInvalid
from deformlab.groups import Subgroup, cyclic_group, klein_four_group, trivial_group
from deformlab.k0 import block_decompose
from deformlab.twisted import rho_monomial


def test_crossed_product_trivial_group():
    bundle = diagonal_bundle(trivial_group(), 2)
    cp = crossed_product(bundle)
    assert cp.dim == 2
    assert block_decompose(cp.algebra).block_dims == (1, 1)


def test_crossed_product_z2_group_algebra_is_m2():
    cp = crossed_product(group_algebra_bundle(cyclic_group(2)))
    assert cp.matrix_agreement_residual < 1e-12
    assert block_decompose(cp.algebra).block_dims == (2,)


def test_crossed_product_klein_group_algebra_is_m4(klein):
    cp = crossed_product(group_algebra_bundle(klein))
    assert block_decompose(cp.algebra).block_dims == (4,)


def test_untwist_trivial_cocycle_is_identity(klein):
    bundle = group_algebra_bundle(klein)
    report = untwist_isomorphism(bundle, trivial_cocycle(klein))
    assert np.abs(report.v_phases - 1.0).max() == 0.0
    assert report.max_residual == 0.0


def test_untwist_bicharacter_exact_coefficients(klein, klein_bicharacter):
    bundle = group_algebra_bundle(klein)
    report = untwist_isomorphism(bundle, klein_bicharacter)
    assert report.passed()
    assert report.max_image_residual < 1e-12


def test_untwist_pauli(pauli, klein_bicharacter):
    report = untwist_isomorphism(pauli, klein_bicharacter)
    assert report.passed()


def test_group_algebra_untwist_formula(klein, klein_bicharacter):
    assert group_algebra_untwist_residual(klein_bicharacter) == 0.0


def test_dual_action_identity_translate(pauli, klein_bicharacter):
    act = dual_action(pauli, klein_bicharacter, pauli.group.identity)
    x = np.arange(pauli.size * pauli.group.order, dtype=complex)
    assert np.abs(act(x) - x).max() == 0.0


def test_dual_action_period_trivial_cocycle():
    g = cyclic_group(4)
    bundle = group_algebra_bundle(g)
    w = trivial_cocycle(g)
    act = dual_action(bundle, w, 1)
    x = np.arange(bundle.size * g.order, dtype=complex) + 1.0
    y = x.copy()
    for _ in range(4):                      # order of the translate
        y = act(y)
    assert np.abs(y - x).max() < 1e-12


def test_dual_action_check_bicharacter(klein, klein_bicharacter):
    bundle = group_algebra_bundle(klein)
    report = dual_action_check(bundle, klein_bicharacter)
    assert report.max_composition_residual < 1e-12
    assert report.passed()


def test_v_unitary_trivial_is_rho():
    g = cyclic_group(4)
    w = trivial_cocycle(g)
    for k in g.elements():
        assert np.abs(v_unitary(w, k).matrix() - rho_monomial(g, k).matrix()).max() == 0.0
    report = v_multiplicativity_check(w)
    assert report.max_multiplicativity_residual == 0.0


def test_v_multiplicativity_sign(klein, klein_bicharacter):
    a, b = 2, 1
    va = v_unitary(klein_bicharacter, a).matrix()
    vb = v_unitary(klein_bicharacter, b).matrix()
    vab = v_unitary(klein_bicharacter, klein.mul(a, b)).matrix()
    scalar = klein_bicharacter.value(klein.inv(b), klein.inv(a))
    assert np.abs(va @ vb - scalar * vab).max() < 1e-14
    assert v_multiplicativity_check(klein_bicharacter).passed()


def test_v_matches_dual_translate_formula(klein, klein_bicharacter):
    """Conjugation by v_k realizes the twisted dual-translate coefficient."""
    report = v_multiplicativity_check(klein_bicharacter)
    assert report.max_dual_formula_residual < 1e-14
    assert report.max_conjugation_residual < 1e-14


def test_w_cocycle_theta_zero():
    g = cyclic_group(4)
    omega0 = random_real_coboundary(g, 51)
    full = Subgroup(g, tuple(g.elements()))
    report = w_cocycle(omega0, full, None, [0.0])
    assert report.max_residual < 1e-12


def test_w_cocycle_full_z4_grid():
    g = cyclic_group(4)
    omega0 = random_real_coboundary(g, 52)
    full = Subgroup(g, tuple(g.elements()))
    report = w_cocycle(omega0, full, None, np.linspace(0.0, 1.0, 5))
    assert report.passed()


def test_w_cocycle_trivial_subgroup():
    g = cyclic_group(4)
    omega0 = random_real_coboundary(g, 53)
    sub = Subgroup(g, (g.identity,))
    report = w_cocycle(omega0, sub, None, np.linspace(0.0, 1.0, 3))
    assert report.max_residual < 1e-14


def test_w_cocycle_rejects_bad_witness():
    g = cyclic_group(4)
    omega0 = random_real_coboundary(g, 54)
    full = Subgroup(g, tuple(g.elements()))
    witness = solve_w_witness(omega0, full)
    witness.phi[1] += 0.5
    with pytest.raises(WitnessInvalid):
        w_cocycle(omega0, full, witness, [0.0, 1.0])


def test_exterior_equivalence_reflexive(klein):
    bundle = group_algebra_bundle(klein)
    cp = crossed_product(bundle)
    eye = np.eye(cp.carrier_dim, dtype=complex)
    alpha = {k: eye for k in klein.elements()}
    u = {k: eye for k in klein.elements()}
    verdict, witness = exterior_equivalence_check(
        klein, alpha, lambda k, idx: cp.matrices[idx], u, cp.matrices)
    assert verdict and witness is None


def test_exterior_equivalence_dual_actions(klein):
    """Plain vs twisted dual translates, intertwined by the corrected
    diagonal unitaries built from the coboundary potential."""
    bundle = group_algebra_bundle(klein)
    omega0 = random_real_coboundary(klein, 55)
    omega = exp_cocycle(omega0, 1.0)
    full = Subgroup(klein, tuple(klein.elements()))
    witness = solve_w_witness(omega0, full)
    cp = crossed_product(bundle)
    n, big_n = klein.order, bundle.ambient_dim
    alpha = {}
    u = {}
    for k in klein.elements():
        alpha[k] = np.kron(rho_monomial(klein, k).matrix(), np.eye(big_n))
        diag = (np.exp(-1j * witness.phi_of(k))
                * omega.table[klein.cayley[:, k], klein.inv(k)])
        u[k] = np.kron(np.diag(diag), np.eye(big_n))

    def beta(k, idx):
        i, h = cp.labels[idx]
        coeff = dual_action_coefficient(bundle, omega, i, h, k)
        return coeff * cp.matrices[cp.labels.index((i, klein.mul(h, klein.inv(k))))]

    verdict, _ = exterior_equivalence_check(full, alpha, beta, u, cp.matrices)
    assert verdict


def test_exterior_equivalence_detects_phase_perturbation(klein):
    bundle = group_algebra_bundle(klein)
    omega0 = random_real_coboundary(klein, 56)
    omega = exp_cocycle(omega0, 1.0)
    full = Subgroup(klein, tuple(klein.elements()))
    witness = solve_w_witness(omega0, full)
    cp = crossed_product(bundle)
    big_n = bundle.ambient_dim
    alpha = {}
    u = {}
    for k in klein.elements():
        alpha[k] = np.kron(rho_monomial(klein, k).matrix(), np.eye(big_n))
        diag = (np.exp(-1j * witness.phi_of(k))
                * omega.table[klein.cayley[:, k], klein.inv(k)])
        if k == 1:
            diag = diag * np.exp(0.3j)      # non-cocycle phase error
        u[k] = np.kron(np.diag(diag), np.eye(big_n))

    def beta(k, idx):
        i, h = cp.labels[idx]
        coeff = dual_action_coefficient(bundle, omega, i, h, k)
        return coeff * cp.matrices[cp.labels.index((i, klein.mul(h, klein.inv(k))))]

    verdict, witness_out = exterior_equivalence_check(full, alpha, beta, u, cp.matrices)
    assert not verdict
    assert witness_out is not None


def test_iterated_takesaki_takai_z2_scalar():
    g = cyclic_group(2)
    it = iterated_crossed_product(scalar_bundle(g), trivial_cocycle(g))
    assert block_decompose(it).block_dims == (2,)


def test_iterated_bicharacter_scalar_single_block(klein, klein_bicharacter):
    it = iterated_crossed_product(scalar_bundle(klein), klein_bicharacter)
    assert block_decompose(it).block_dims == (4,)


def test_iterated_trivial_group():
    bundle = diagonal_bundle(trivial_group(), 2)
    it = iterated_crossed_product(bundle, trivial_cocycle(trivial_group()))
    assert block_decompose(it).block_dims == (1, 1)


def test_iterated_matches_dense_model(klein, klein_bicharacter):
    """The closed-form product rule against explicit matrices."""
    bundle = group_algebra_bundle(cyclic_group(2))
    w0 = random_real_coboundary(cyclic_group(2), 57)
    for w in (trivial_cocycle(cyclic_group(2)), exp_cocycle(w0, 1.0)):
        it = iterated_crossed_product(bundle, w)
        mats = it.dense_matrices()
        rng = np.random.default_rng(6)
        for _ in range(5):
            x = rng.standard_normal(it.dim) + 1j * rng.standard_normal(it.dim)
            y = rng.standard_normal(it.dim) + 1j * rng.standard_normal(it.dim)
            mx = sum(c * m for c, m in zip(x, mats))
            my = sum(c * m for c, m in zip(y, mats))
            mxy = sum(c * m for c, m in zip(it.multiply(x, y), mats))
            assert np.abs(mx @ my - mxy).max() < 1e-12
            mxs = sum(c * m for c, m in zip(it.involute(x), mats))
            assert np.abs(mx.conj().T - mxs).max() < 1e-12
        # regular trace against the dense left-multiplication trace
        x = rng.standard_normal(it.dim) + 1j * rng.standard_normal(it.dim)
        assert abs(it.regular_trace(x) - np.trace(it.left_mult_matrix(x))) < 1e-10


def test_iterated_right_mult_consistent():
    g = cyclic_group(2)
    it = iterated_crossed_product(group_algebra_bundle(g), trivial_cocycle(g))
    rng = np.random.default_rng(7)
    x = rng.standard_normal(it.dim) + 1j * rng.standard_normal(it.dim)
    y = rng.standard_normal(it.dim) + 1j * rng.standard_normal(it.dim)
    assert np.abs(it.left_mult_matrix(x) @ y - it.right_mult_matrix(y) @ x).max() < 1e-12


def test_untwist_phases_unitary(corpus_instances):
    for name, bundle, u1_list, _ in corpus_instances:
        for cname, w in u1_list:
            assert np.abs(np.abs(untwist_phases(w)) - 1.0).max() < 1e-12


def test_v_and_w_unitary(corpus_instances):
    for name, bundle, u1_list, real_list in corpus_instances:
        group = bundle.group
        for cname, w in u1_list:
            for k in group.elements():
                vk = v_unitary(w, k)
                assert np.abs(np.abs(vk.phase) - 1.0).max() < 1e-12
