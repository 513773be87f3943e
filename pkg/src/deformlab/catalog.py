"""Built-in corpus: groups, cocycles, bundles and triples used by the runner.

Everything here is deterministic; random coboundaries carry their seed in the
construction so repeated runs produce identical objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bundles import FellBundle, plain_lambda_matrix
from .cocycles import (
    BilinearCocycle,
    TwoCocycleReal,
    TwoCocycleU1,
    bilinear_cocycle,
    random_real_coboundary,
    trivial_cocycle,
    zero_real_cocycle,
)
from .groups import (
    FiniteGroup,
    cyclic_group,
    dihedral_group_4,
    direct_product,
    klein_four_group,
    quaternion_group,
    symmetric_group_3,
    trivial_group,
)
from .linalg import unit_root
from .spectral import EquivariantTriple

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _groups() -> dict:
    return {
        "trivial": trivial_group,
        "z2": lambda: cyclic_group(2),
        "z3": lambda: cyclic_group(3),
        "z4": lambda: cyclic_group(4),
        "z2z2": klein_four_group,
        "z3z3": lambda: direct_product(cyclic_group(3), cyclic_group(3), name="Z3xZ3"),
        "z2z3": lambda: direct_product(cyclic_group(2), cyclic_group(3), name="Z2xZ3"),
        "s3": symmetric_group_3,
        "q8": quaternion_group,
        "d4": dihedral_group_4,
    }


BUILTIN_GROUPS = _groups()


def builtin_group(name: str) -> FiniteGroup:
    return BUILTIN_GROUPS[name]()


def product_bicharacter(group: FiniteGroup, modulus: int) -> TwoCocycleU1:
    """w((x1,x2),(y1,y2)) = zeta^{x2 y1} on Z_m x Z_m, zeta = e^{2 pi i / m}.

    The element with index a*m + b is the pair (a, b).
    """
    m = modulus
    n = group.order
    assert n == m * m
    zeta = unit_root(1, m)
    table = np.empty((n, n), dtype=complex)
    for x in range(n):
        x2 = x % m
        for y in range(n):
            y1 = y // m
            table[x, y] = zeta ** ((x2 * y1) % m)
    return TwoCocycleU1(group, table)


def group_algebra_bundle(group: FiniteGroup) -> FellBundle:
    """The group algebra of a finite group, graded by itself."""
    basis = [plain_lambda_matrix(group, g) for g in group.elements()]
    return FellBundle(group, basis, list(group.elements()),
                      name=f"group-algebra-{group.name}")


def pauli_bundle() -> FellBundle:
    """M_2(C) graded by Z2 x Z2 through the Pauli basis."""
    group = klein_four_group()
    basis = [np.eye(2, dtype=complex), PAULI_X, PAULI_Y, PAULI_Z]
    degrees = [0, 2, 3, 1]       # e, (1,0), (1,1), (0,1) with index a*2+b
    return FellBundle(group, basis, degrees, name="pauli")


def clock_shift_bundle() -> FellBundle:
    """M_3(C) graded by Z3 x Z3 through clock and shift words."""
    group = direct_product(cyclic_group(3), cyclic_group(3), name="Z3xZ3")
    zeta = unit_root(1, 3)
    clock = np.diag([1.0 + 0j, zeta, zeta ** 2])
    shift = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        shift[(j + 1) % 3, j] = 1.0
    basis = []
    degrees = []
    for a in range(3):
        for b in range(3):
            word = np.linalg.matrix_power(clock, a) @ np.linalg.matrix_power(shift, b)
            basis.append(word)
            degrees.append(a * 3 + b)
    return FellBundle(group, basis, degrees, name="clock-shift")


def scalar_bundle(group: FiniteGroup) -> FellBundle:
    return FellBundle(group, [np.eye(1, dtype=complex)], [group.identity],
                      name=f"scalar-{group.name}")


def trivially_graded_bundle(group: FiniteGroup, matrices, name: str = "") -> FellBundle:
    degrees = [group.identity] * len(matrices)
    return FellBundle(group, matrices, degrees, name=name or f"trivial-grading-{group.name}")


def diagonal_bundle(group: FiniteGroup, size: int) -> FellBundle:
    mats = [np.diag([1.0 + 0j if i == j else 0.0 for i in range(size)])
            for j in range(size)]
    return trivially_graded_bundle(group, mats, name=f"diagonal-{size}-{group.name}")


def matrix_units_bundle(group: FiniteGroup, size: int) -> FellBundle:
    mats = []
    for i in range(size):
        for j in range(size):
            m = np.zeros((size, size), dtype=complex)
            m[i, j] = 1.0
            mats.append(m)
    return trivially_graded_bundle(group, mats, name=f"full-matrix-{size}-{group.name}")


def regular_triple(group: FiniteGroup) -> EquivariantTriple:
    """Group algebra acting on l2(G) ox C^2 with an off-diagonal operator.

    The grading puts delta_g ox C^2 in degree g; the operator and grading
    unitary act on the spin factor only.
    """
    n = group.order
    basis = [np.kron(plain_lambda_matrix(group, g), np.eye(2)) for g in group.elements()]
    bundle = FellBundle(group, basis, list(group.elements()),
                        name=f"regular-spin-{group.name}")
    h_degrees = [g for g in group.elements() for _ in range(2)]
    dirac = np.kron(np.eye(n), PAULI_X)
    gamma = np.kron(np.eye(n), PAULI_Z)
    return EquivariantTriple(bundle, h_degrees, dirac, gamma,
                             name=f"regular-triple-{group.name}")


def flat_triple() -> EquivariantTriple:
    """Diagonal algebra on C^2 over the trivial group; pairing can be nonzero."""
    group = trivial_group()
    bundle = diagonal_bundle(group, 2)
    return EquivariantTriple(bundle, [0, 0], PAULI_X, PAULI_Z, name="flat-triple")


def bare_regular_triple(group: FiniteGroup) -> EquivariantTriple:
    """Group algebra on l2(G) itself; the even structure is degenerate."""
    bundle = group_algebra_bundle(group)
    h_degrees = list(group.elements())
    dirac = np.zeros((group.order, group.order), dtype=complex)
    gamma = np.eye(group.order, dtype=complex)
    return EquivariantTriple(bundle, h_degrees, dirac, gamma,
                             name=f"bare-regular-{group.name}")


def nc_torus_cocycle(theta: float) -> BilinearCocycle:
    """Z^2 cocycle with  u v = e^{i theta} v u  for the two generators."""
    half = -theta / 2.0
    return bilinear_cocycle(np.array([[0.0, half], [-half, 0.0]]))


@dataclass
class ScenarioInputs:
    """Resolved inputs a scenario's suites operate on."""

    group: Optional[FiniteGroup] = None
    u1_cocycles: list = field(default_factory=list)      # (name, TwoCocycleU1)
    real_cocycles: list = field(default_factory=list)    # (name, TwoCocycleReal)
    bundles: list = field(default_factory=list)          # (name, FellBundle)
    triples: list = field(default_factory=list)          # (name, EquivariantTriple)
    bilinear: list = field(default_factory=list)         # (name, BilinearCocycle)


@dataclass
class BuiltinScenario:
    name: str
    description: str
    suites: tuple
    make: Callable[[int], ScenarioInputs]


def _with_exp(group, real_pairs):
    """Real cocycles plus their exponentials at theta = 1."""
    from .cocycles import exp_cocycle

    u1 = [(f"exp-{name}", exp_cocycle(rc, 1.0)) for name, rc in real_pairs]
    return u1


def _make_trivial(seed: int) -> ScenarioInputs:
    group = trivial_group()
    return ScenarioInputs(
        group=group,
        u1_cocycles=[("trivial", trivial_cocycle(group))],
        real_cocycles=[("zero", zero_real_cocycle(group))],
        bundles=[("scalar", scalar_bundle(group)),
                 ("full-m2", matrix_units_bundle(group, 2))],
        triples=[("flat", flat_triple())],
    )


def _make_cyclic(name: str, seed_base: int):
    def make(seed: int) -> ScenarioInputs:
        group = builtin_group(name)
        real = [("coboundary", random_real_coboundary(group, seed_base + seed))]
        return ScenarioInputs(
            group=group,
            u1_cocycles=[("trivial", trivial_cocycle(group))] + _with_exp(group, real),
            real_cocycles=real,
            bundles=[("group-algebra", group_algebra_bundle(group))],
            triples=[("regular", regular_triple(group)),
                     ("bare", bare_regular_triple(group))],
        )
    return make


def _make_z2z2(seed: int) -> ScenarioInputs:
    group = builtin_group("z2z2")
    real = [("coboundary", random_real_coboundary(group, 31 + seed))]
    return ScenarioInputs(
        group=group,
        u1_cocycles=[("trivial", trivial_cocycle(group)),
                     ("bicharacter", product_bicharacter(group, 2))]
        + _with_exp(group, real),
        real_cocycles=real,
        bundles=[("group-algebra", group_algebra_bundle(group)),
                 ("pauli", pauli_bundle())],
        triples=[("regular", regular_triple(group))],
    )


def _make_z3z3(seed: int) -> ScenarioInputs:
    group = builtin_group("z3z3")
    real = [("coboundary", random_real_coboundary(group, 47 + seed))]
    return ScenarioInputs(
        group=group,
        u1_cocycles=[("trivial", trivial_cocycle(group)),
                     ("bicharacter", product_bicharacter(group, 3))]
        + _with_exp(group, real),
        real_cocycles=real,
        bundles=[("clock-shift", clock_shift_bundle()),
                 ("group-algebra", group_algebra_bundle(group))],
    )


def _make_nonabelian(name: str, seed_base: int):
    def make(seed: int) -> ScenarioInputs:
        group = builtin_group(name)
        real = [("coboundary", random_real_coboundary(group, seed_base + seed))]
        return ScenarioInputs(
            group=group,
            u1_cocycles=[("trivial", trivial_cocycle(group))] + _with_exp(group, real),
            real_cocycles=real,
            bundles=[("group-algebra", group_algebra_bundle(group))],
        )
    return make


def _make_pauli(seed: int) -> ScenarioInputs:
    group = builtin_group("z2z2")
    real = [("coboundary", random_real_coboundary(group, 59 + seed))]
    return ScenarioInputs(
        group=group,
        u1_cocycles=[("bicharacter", product_bicharacter(group, 2))]
        + _with_exp(group, real),
        real_cocycles=real,
        bundles=[("pauli", pauli_bundle())],
    )


def _make_z2_triple(seed: int) -> ScenarioInputs:
    group = builtin_group("z2")
    real = [("coboundary", random_real_coboundary(group, 71 + seed))]
    return ScenarioInputs(
        group=group,
        u1_cocycles=_with_exp(group, real),
        real_cocycles=real,
        bundles=[("group-algebra", group_algebra_bundle(group))],
        triples=[("regular", regular_triple(group))],
    )


def _make_nc_torus(seed: int) -> ScenarioInputs:
    return ScenarioInputs(
        bilinear=[("nc-torus", nc_torus_cocycle(2.0 * np.pi / 5.0))],
    )


ALL_SUITES = ("cocycle", "tga", "deform", "crossed", "k0", "triple")

BUILTINS: dict[str, BuiltinScenario] = {
    "trivial-everything": BuiltinScenario(
        "trivial-everything", "trivial group, trivial twists; all residuals vanish",
        ALL_SUITES, _make_trivial),
    "z2": BuiltinScenario(
        "z2", "order-2 cyclic group with a seeded coboundary twist",
        ALL_SUITES, _make_cyclic("z2", 11)),
    "z4": BuiltinScenario(
        "z4", "order-4 cyclic group with a seeded coboundary twist",
        ALL_SUITES, _make_cyclic("z4", 19)),
    "z2z2-bicharacter": BuiltinScenario(
        "z2z2-bicharacter", "Klein four-group with the sign bicharacter",
        ("cocycle", "tga", "deform", "crossed", "k0"), _make_z2z2),
    "z3z3-bicharacter": BuiltinScenario(
        "z3z3-bicharacter", "Z3 x Z3 with the order-3 bicharacter",
        ("cocycle", "tga", "deform", "crossed", "k0"), _make_z3z3),
    "s3-coboundary": BuiltinScenario(
        "s3-coboundary", "symmetric group S3 with a seeded coboundary twist",
        ("cocycle", "tga", "deform", "crossed", "k0"), _make_nonabelian("s3", 83)),
    "q8-coboundary": BuiltinScenario(
        "q8-coboundary", "quaternion group with a seeded coboundary twist",
        ("cocycle", "tga", "deform", "crossed", "k0"), _make_nonabelian("q8", 97)),
    "d4-coboundary": BuiltinScenario(
        "d4-coboundary", "dihedral group of order 8 with a seeded coboundary twist",
        ("cocycle", "tga", "deform", "crossed", "k0"), _make_nonabelian("d4", 103)),
    "pauli-bundle": BuiltinScenario(
        "pauli-bundle", "M2 graded by the Klein four-group; deformation focus",
        ("cocycle", "deform", "k0"), _make_pauli),
    "z2-triple": BuiltinScenario(
        "z2-triple", "spectral triple over the order-2 regular representation",
        ("cocycle", "triple"), _make_z2_triple),
    "nc-torus-z2": BuiltinScenario(
        "nc-torus-z2", "Z^2 with a bilinear twist; u v = e^{i theta} v u checks",
        ("cocycle", "tga"), _make_nc_torus),
}


def list_builtins() -> list[tuple[str, str]]:
    return [(name, b.description) for name, b in sorted(BUILTINS.items())]
