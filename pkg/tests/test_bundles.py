import numpy as np
import pytest

from deformlab.bundles import (
    FellBundle,
    approximation_identity_residual,
    build_fell_bundle,
    coaction_check,
    coaction_matrix,
    plain_lambda_matrix,
    spectral_component,
)
from deformlab.catalog import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    clock_shift_bundle,
    group_algebra_bundle,
    matrix_units_bundle,
    pauli_bundle,
)
from deformlab.errors import (
    DependentBasis,
    NotGraded,
    NotInAlgebra,
    NotStarClosed,
    NotUnital,
)
from deformlab.groups import cyclic_group, klein_four_group, trivial_group


def test_matrix_units_trivial_grading():
    bundle = matrix_units_bundle(trivial_group(), 2)
    assert bundle.size == 4
    assert all(d == 0 for d in bundle.degrees)


def test_group_algebra_self_grading():
    g = cyclic_group(2)
    bundle = group_algebra_bundle(g)
    assert bundle.size == 2
    assert np.array_equal(bundle.basis[1], np.array([[0, 1], [1, 0]], dtype=complex))


def test_pauli_bundle_valid(pauli, klein):
    # X Z is proportional to Y and degrees add: (1,0) + (0,1) = (1,1)
    xz = PAULI_X @ PAULI_Z
    assert np.abs(xz + 1j * PAULI_Y).max() < 1e-15
    assert klein.mul(2, 1) == 3
    assert pauli.degrees == [0, 2, 3, 1]


def test_build_fell_bundle_by_labels(klein):
    bundle = build_fell_bundle(klein, [
        (np.eye(2), "(0,0)"),
        (PAULI_X, "(1,0)"),
        (PAULI_Y, "(1,1)"),
        (PAULI_Z, "(0,1)"),
    ])
    assert bundle.degrees == [0, 2, 3, 1]


def test_not_star_closed_rejected(klein):
    upper = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises((NotStarClosed, NotGraded)):
        FellBundle(klein, [np.eye(2), upper], [0, 2])


def test_not_graded_rejected(klein):
    # Y tagged degree e: X Z is proportional to Y but must land in degree (1,1)
    with pytest.raises(NotGraded):
        FellBundle(klein, [np.eye(2), PAULI_X, PAULI_Y, PAULI_Z], [0, 2, 0, 1])


def test_relabeled_pauli_grading_is_also_valid(klein):
    # swapping the X and Z degrees is the Klein automorphism (a,b) -> (b,a)
    bundle = FellBundle(klein, [np.eye(2), PAULI_X, PAULI_Y, PAULI_Z], [0, 1, 3, 2])
    assert bundle.size == 4


def test_not_unital_rejected(trivial=trivial_group()):
    e00 = np.diag([1.0 + 0j, 0.0])
    with pytest.raises(NotUnital):
        FellBundle(trivial, [e00], [0])


def test_dependent_basis_rejected(klein):
    with pytest.raises(DependentBasis):
        FellBundle(klein, [np.eye(2), np.eye(2) * (1 + 1e-12)], [0, 0])


def test_spectral_component_homogeneous(pauli):
    part = spectral_component(pauli, PAULI_X, 2)
    assert np.abs(part.matrix - PAULI_X).max() < 1e-12
    for g in (0, 1, 3):
        assert np.abs(spectral_component(pauli, PAULI_X, g).matrix).max() < 1e-12


def test_spectral_component_sum(pauli):
    a = PAULI_X + PAULI_Z
    comp = spectral_component(pauli, a, 2)
    assert np.abs(comp.matrix - PAULI_X).max() < 1e-12
    total = sum(spectral_component(pauli, a, g).matrix for g in range(4))
    assert np.abs(total - a).max() < 1e-12


def test_component_convolution_rule(pauli, klein):
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = pauli.combine(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        b = pauli.combine(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        ab = a @ b
        for k in klein.elements():
            direct = spectral_component(pauli, ab, k).matrix
            acc = np.zeros_like(direct)
            for g in klein.elements():
                for h in klein.elements():
                    if klein.mul(g, h) == k:
                        acc += (spectral_component(pauli, a, g).matrix
                                @ spectral_component(pauli, b, h).matrix)
            assert np.abs(direct - acc).max() < 1e-10


def test_component_projection_system(pauli, klein):
    rng = np.random.default_rng(1)
    a = pauli.combine(rng.standard_normal(4) + 1j * rng.standard_normal(4))
    for g in klein.elements():
        once = spectral_component(pauli, a, g).matrix
        twice = spectral_component(pauli, once, g).matrix
        assert np.abs(twice - once).max() < 1e-10
        for h in klein.elements():
            if h != g:
                cross = spectral_component(pauli, once, h).matrix
                assert np.abs(cross).max() < 1e-10


def test_adjoint_grading(pauli, klein):
    rng = np.random.default_rng(2)
    a = pauli.combine(rng.standard_normal(4) + 1j * rng.standard_normal(4))
    for g in klein.elements():
        lhs = spectral_component(pauli, a, g).matrix.conj().T
        rhs = spectral_component(pauli, a.conj().T, klein.inv(g)).matrix
        assert np.abs(lhs - rhs).max() < 1e-10


def test_not_in_algebra(klein):
    diag = FellBundle(klein, [np.diag([1.0, 0]), np.diag([0, 1.0])],
                      [0, 0], name="diag")
    with pytest.raises(NotInAlgebra):
        diag.expand(PAULI_X)


def test_coaction_unit(pauli):
    n_total = 4 * 2
    assert np.abs(coaction_matrix(pauli, np.eye(2)) - np.eye(n_total)).max() < 1e-12


def test_coaction_reproduces_coproduct():
    g = cyclic_group(2)
    bundle = group_algebra_bundle(g)
    for x in g.elements():
        lam = plain_lambda_matrix(g, x)
        expected = np.kron(lam, lam)
        assert np.abs(coaction_matrix(bundle, lam) - expected).max() < 1e-12


def test_coaction_multiplicative(pauli):
    ax = coaction_matrix(pauli, PAULI_X)
    az = coaction_matrix(pauli, PAULI_Z)
    axz = coaction_matrix(pauli, PAULI_X @ PAULI_Z)
    assert np.abs(ax @ az - axz).max() < 1e-12


def test_coaction_report(pauli):
    report = coaction_check(pauli)
    assert report.passed()
    assert report.injectivity_smallest_sv > 1e-8


def test_averaging_identity_all_bundles(corpus_instances):
    for name, bundle, _, _ in corpus_instances:
        assert approximation_identity_residual(bundle) < 1e-12


def test_clock_shift_bundle_structure():
    bundle = clock_shift_bundle()
    assert bundle.ambient_dim == 3 and bundle.size == 9
    report = coaction_check(bundle)
    assert report.passed()
