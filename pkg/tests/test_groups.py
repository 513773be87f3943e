import numpy as np
import pytest

from deformlab.errors import InfiniteGroupUnsupported, NotAGroup
from deformlab.groups import (
    FreeAbelianGroup,
    Subgroup,
    all_subgroups,
    build_group,
    cyclic_group,
    dihedral_group_4,
    direct_product,
    folner_witness,
    klein_four_group,
    quaternion_group,
    subgroup_closure,
    symmetric_group_3,
    trivial_group,
)


def brute_force_associative(table):
    n = len(table)
    for g in range(n):
        for h in range(n):
            for k in range(n):
                if table[table[g][h]][k] != table[g][table[h][k]]:
                    return (g, h, k)
    return None


def brute_force_closure(group, generators):
    members = {group.identity, *generators}
    changed = True
    while changed:
        changed = False
        for a in list(members):
            for b in list(members):
                c = group.mul(a, b)
                if c not in members:
                    members.add(c)
                    changed = True
            if group.inv(a) not in members:
                members.add(group.inv(a))
                changed = True
    return members


def test_trivial_group():
    g = build_group([[0]])
    assert g.order == 1
    assert g.identity == 0


def test_z2_table():
    g = build_group([[0, 1], [1, 0]])
    assert g.order == 2
    assert g.inv(1) == 1


def test_perturbed_z4_rejected():
    table = cyclic_group(4).cayley.copy()
    # swap two full rows: stays a latin square, breaks associativity
    table[[1, 3], :] = table[[3, 1], :]
    witness = brute_force_associative(table.tolist())
    assert witness is not None
    with pytest.raises(NotAGroup) as err:
        build_group(table)
    assert err.value.axiom == "associativity"
    g, h, k = err.value.witness
    assert table[table[g, h], k] != table[g, table[h, k]]


def test_out_of_range_rejected():
    with pytest.raises(NotAGroup):
        build_group([[0, 1], [1, 7]])


def test_not_latin_square_rejected():
    with pytest.raises(NotAGroup):
        build_group([[0, 0], [1, 1]])


def test_klein_four_self_inverse():
    g = klein_four_group()
    assert g.order == 4
    for x in g.elements():
        assert g.inv(x) == x


def test_z3z3_product():
    g = direct_product(cyclic_group(3), cyclic_group(3))
    assert g.order == 9
    assert g.identity == 0


def test_z2z3_element_order():
    g = direct_product(cyclic_group(2), cyclic_group(3))
    # brute force order of (1,1), index 1*3+1 = 4
    x, n = 4, 1
    y = x
    while y != g.identity:
        y = g.mul(y, x)
        n += 1
    assert n == 6
    assert g.element_order(4) == 6


def test_associativity_exact_on_corpus(corpus_groups):
    for group in corpus_groups.values():
        left = group.cayley[group.cayley, :]
        right = group.cayley[:, group.cayley]
        assert np.array_equal(left, right)


def test_double_inverse_is_identity(corpus_groups):
    for group in corpus_groups.values():
        for g in group.elements():
            assert group.inv(group.inv(g)) == g


def test_subgroup_closure_empty():
    g = cyclic_group(4)
    sub = subgroup_closure(g, [])
    assert sub.members == (0,)


def test_subgroup_closure_z4():
    g = cyclic_group(4)
    sub = subgroup_closure(g, [2])
    assert sub.members == (0, 2)


def test_subgroup_closure_s3():
    g = symmetric_group_3()
    transposition = g.labels.index("(01)")
    three_cycle = g.labels.index("(012)")
    sub = subgroup_closure(g, [transposition, three_cycle])
    assert sub.members == tuple(range(6))
    assert brute_force_closure(g, [transposition, three_cycle]) == set(range(6))


def test_subgroup_invariants_exhaustive(corpus_groups):
    for group in corpus_groups.values():
        for sub in all_subgroups(group):
            members = set(sub.members)
            assert group.identity in members
            for a in members:
                assert group.inv(a) in members
                for b in members:
                    assert group.mul(a, b) in members


def test_all_subgroups_counts():
    assert len(all_subgroups(cyclic_group(4))) == 3
    assert len(all_subgroups(klein_four_group())) == 5
    assert len(all_subgroups(symmetric_group_3())) == 6
    assert len(all_subgroups(quaternion_group())) == 6
    assert len(all_subgroups(dihedral_group_4())) == 10


def test_folner_trivial_and_z2():
    assert folner_witness(trivial_group())[0] == 1.0
    a = folner_witness(cyclic_group(2))
    assert np.allclose(a, 2 ** -0.5)
    # sum_h a(g h)* b a(h) = b for a scalar b of any degree
    g2 = cyclic_group(2)
    for b in (1.0, 1.7 - 0.3j):
        for g in g2.elements():
            total = sum(np.conj(a[g2.mul(g, h)]) * b * a[h] for h in g2.elements())
            assert abs(total - b) < 1e-15
    assert abs(np.sum(np.conj(a) * a) - 1.0) < 1e-15


def test_folner_klein_pauli_reproduction(klein, pauli):
    a = folner_witness(klein)
    for b, deg in zip(pauli.basis, pauli.degrees):
        for g in klein.elements():
            total = np.zeros_like(b)
            for h in klein.elements():
                total = total + np.conj(a[klein.mul(g, h)]) * b * a[h]
            assert np.abs(total - b).max() < 1e-15
    assert abs(np.sum(np.conj(a) * a) - 1.0) < 1e-15


def test_free_abelian_backend():
    zn = FreeAbelianGroup(2)
    assert zn.identity == (0, 0)
    assert zn.mul((1, 2), (3, -1)) == (4, 1)
    assert zn.inv((1, -2)) == (-1, 2)
    with pytest.raises(InfiniteGroupUnsupported):
        zn.require_finite()
    with pytest.raises(InfiniteGroupUnsupported):
        folner_witness(zn)


def test_subgroup_rejects_non_closed():
    g = cyclic_group(4)
    with pytest.raises(NotAGroup):
        Subgroup(g, (0, 1))
