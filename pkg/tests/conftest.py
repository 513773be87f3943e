import numpy as np
import pytest

from deformlab.catalog import (
    clock_shift_bundle,
    group_algebra_bundle,
    pauli_bundle,
    product_bicharacter,
)
from deformlab.cocycles import (
    exp_cocycle,
    random_real_coboundary,
    trivial_cocycle,
)
from deformlab.groups import (
    cyclic_group,
    dihedral_group_4,
    direct_product,
    klein_four_group,
    quaternion_group,
    symmetric_group_3,
    trivial_group,
)


@pytest.fixture(scope="session")
def corpus_groups():
    return {
        "trivial": trivial_group(),
        "z2": cyclic_group(2),
        "z4": cyclic_group(4),
        "z2z2": klein_four_group(),
        "z3z3": direct_product(cyclic_group(3), cyclic_group(3), name="Z3xZ3"),
        "s3": symmetric_group_3(),
        "q8": quaternion_group(),
        "d4": dihedral_group_4(),
    }


@pytest.fixture(scope="session")
def klein():
    return klein_four_group()


@pytest.fixture(scope="session")
def klein_bicharacter(klein):
    return product_bicharacter(klein, 2)


@pytest.fixture(scope="session")
def pauli():
    return pauli_bundle()


@pytest.fixture(scope="session")
def corpus_instances(corpus_groups):
    """(label, bundle, [(cname, u1 cocycle)], [(rname, real cocycle)]) rows."""
    rows = []
    for name, group in corpus_groups.items():
        u1 = [("trivial", trivial_cocycle(group))]
        real = []
        if name != "trivial":
            omega0 = random_real_coboundary(group, 1000 + group.order)
            real.append(("coboundary", omega0))
            u1.append(("exp-coboundary", exp_cocycle(omega0, 1.0)))
        if name == "z2z2":
            u1.append(("bicharacter", product_bicharacter(group, 2)))
        if name == "z3z3":
            u1.append(("bicharacter", product_bicharacter(group, 3)))
        if name == "z3z3":
            bundle = clock_shift_bundle()
        else:
            bundle = group_algebra_bundle(group)
        rows.append((name, bundle, u1, real))
    return rows
