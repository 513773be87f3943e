"""Discrete groups: finite groups as validated Cayley tables, plus Z^n.

Finite-group elements are dense indices 0..order-1; Z^n elements are integer
tuples.  Tables are validated once at construction and assumed valid by every
downstream module.  Operations that need full matrices on l2 of the group
reject the Z^n backend with InfiniteGroupUnsupported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InfiniteGroupUnsupported, NotAGroup


class Group:
    """Minimal shared interface of both element backends."""

    is_finite = False

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    @property
    def identity(self):
        raise NotImplementedError

    def require_finite(self) -> "FiniteGroup":
        if not self.is_finite:
            raise InfiniteGroupUnsupported(
                "operation requires a finite group (full matrices on l2 of the group)"
            )
        return self  # type: ignore[return-value]


class FiniteGroup(Group):
    """Finite group on indices 0..order-1 defined by a Cayley table."""

    is_finite = True

    def __init__(self, cayley, labels: Optional[Sequence[str]] = None, name: str = ""):
        table = np.array(cayley, dtype=np.int64)
        _validate_cayley(table)
        self.cayley = table
        self.cayley.setflags(write=False)
        self.order = int(table.shape[0])
        self._identity = _find_identity(table)
        self.inverse = _find_inverses(table, self._identity)
        self.inverse.setflags(write=False)
        if labels is not None and len(labels) != self.order:
            raise NotAGroup("range", ("labels", len(labels)))
        self.labels = list(labels) if labels is not None else None
        self.name = name or f"group-of-order-{self.order}"

    @property
    def identity(self) -> int:
        return self._identity

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, g: int) -> int:
        n, h = 1, g
        while h != self._identity:
            h = self.mul(h, g)
            n += 1
        return n

    def label(self, g: int) -> str:
        if self.labels is not None:
            return self.labels[g]
        return str(g)

    def label_index(self, label) -> int:
        """Resolve an element given either an index or a display label."""
        if isinstance(label, (int, np.integer)):
            g = int(label)
            if not 0 <= g < self.order:
                raise NotAGroup("range", ("element", g))
            return g
        if self.labels is not None and label in self.labels:
            return self.labels.index(label)
        raise KeyError(f"unknown element label {label!r} in {self.name}")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(self.cayley, other.cayley)

    def __hash__(self) -> int:
        return hash((self.order, self.cayley.tobytes()))


class FreeAbelianGroup(Group):
    """Z^n with integer-tuple elements; identity is the zero vector."""

    is_finite = False

    def __init__(self, rank: int):
        if rank <= 0:
            raise ValueError(f"rank must be positive, got {rank}")
        self.rank = int(rank)
        self.name = f"Z^{self.rank}"

    @property
    def identity(self) -> tuple:
        return (0,) * self.rank

    def mul(self, a, b) -> tuple:
        return tuple(int(x) + int(y) for x, y in zip(a, b, strict=True))

    def inv(self, a) -> tuple:
        return tuple(-int(x) for x in a)

    def basis_vector(self, i: int) -> tuple:
        e = [0] * self.rank
        e[i] = 1
        return tuple(e)

    def __repr__(self) -> str:
        return f"FreeAbelianGroup(rank={self.rank})"


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of a finite group given by its sorted member indices."""

    parent: FiniteGroup
    members: tuple

    def __post_init__(self):
        mem = set(self.members)
        if self.parent.identity not in mem:
            raise NotAGroup("identity", ("subgroup", self.members))
        for a in self.members:
            if self.parent.inv(a) not in mem:
                raise NotAGroup("inverse", ("subgroup", a))
            for b in self.members:
                if self.parent.mul(a, b) not in mem:
                    raise NotAGroup("latin-square", ("subgroup", (a, b)))

    @property
    def order(self) -> int:
        return len(self.members)

    def position(self, g: int) -> int:
        return self.members.index(g)


def build_group(cayley, labels: Optional[Sequence[str]] = None, name: str = "") -> FiniteGroup:
    """Validate a Cayley table and return the finite group it defines."""
    return FiniteGroup(cayley, labels=labels, name=name)


def _validate_cayley(table: np.ndarray) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise NotAGroup("range", ("shape", tuple(table.shape)))
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        bad = np.argwhere((table < 0) | (table >= n))[0]
        raise NotAGroup("range", (int(bad[0]), int(bad[1])))
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(table[i]), full):
            raise NotAGroup("latin-square", ("row", i))
        if not np.array_equal(np.sort(table[:, i]), full):
            raise NotAGroup("latin-square", ("column", i))
    # associativity, vectorized over all triples
    left = table[table, :]          # left[g,h,k]  = (g h) k
    right = table[:, table]         # right[g,h,k] = g (h k)
    if not np.array_equal(left, right):
        g, h, k = np.argwhere(left != right)[0]
        raise NotAGroup("associativity", (int(g), int(h), int(k)))
    _find_identity(table)


def _find_identity(table: np.ndarray) -> int:
    n = table.shape[0]
    full = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], full) and np.array_equal(table[:, e], full):
            return e
    raise NotAGroup("identity")


def _find_inverses(table: np.ndarray, identity: int) -> np.ndarray:
    n = table.shape[0]
    inverse = np.empty(n, dtype=np.int64)
    for g in range(n):
        hits = np.where(table[g] == identity)[0]
        if hits.size != 1 or table[hits[0], g] != identity:
            raise NotAGroup("inverse", (g,))
        inverse[g] = hits[0]
    return inverse


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str = "") -> FiniteGroup:
    """Componentwise product; index of (a, b) is a*|H| + b."""
    ng, nh = g.order, h.order
    table = np.empty((ng * nh, ng * nh), dtype=np.int64)
    for a1 in range(ng):
        for b1 in range(nh):
            row = g.cayley[a1][:, None] * nh + h.cayley[b1][None, :]
            table[a1 * nh + b1] = row.reshape(-1)
    labels = None
    if g.labels is not None and h.labels is not None:
        labels = [f"({g.labels[a]},{h.labels[b]})" for a in range(ng) for b in range(nh)]
    return FiniteGroup(table, labels=labels, name=name or f"{g.name}x{h.name}")


def subgroup_closure(group: FiniteGroup, generators: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing the generators (breadth-first closure)."""
    members = {group.identity}
    frontier = [group.identity]
    gens = [int(x) for x in generators]
    for x in gens:
        if x not in members:
            members.add(x)
            frontier.append(x)
    while frontier:
        a = frontier.pop()
        for b in list(members):
            for c in (group.mul(a, b), group.mul(b, a)):
                if c not in members:
                    members.add(c)
                    frontier.append(c)
        ia = group.inv(a)
        if ia not in members:
            members.add(ia)
            frontier.append(ia)
    return Subgroup(group, tuple(sorted(members)))


def all_subgroups(group: FiniteGroup) -> list[Subgroup]:
    """All subgroups, as closures of generator sets of size <= 3.

    Complete for the desk-scale corpus: a subgroup of order <= 9 needs three
    generators only if it contains (Z_2)^3, which no corpus group does.
    """
    seen = {}
    def record(gens):
        sub = subgroup_closure(group, gens)
        seen.setdefault(sub.members, sub)

    record([])
    for a in group.elements():
        record([a])
        for b in group.elements():
            record([a, b])
            for c in group.elements():
                if group.order <= 12:
                    record([a, b, c])
    return sorted(seen.values(), key=lambda s: (s.order, s.members))


def folner_witness(group: FiniteGroup) -> np.ndarray:
    """Constant averaging function a(g) = order**-1/2.

    For any homogeneous b, sum_h a(g h)* b a(h) = b exactly, and
    sum_g a(g)* a(g) = 1; both are exercised in the graded-algebra checks.
    """
    group.require_finite()
    return np.full(group.order, group.order ** -0.5)


# Named constructions used throughout the corpus.

def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], labels=["e"], name="trivial")


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, labels=[str(i) for i in range(n)], name=f"Z{n}")


def klein_four_group() -> FiniteGroup:
    return direct_product(cyclic_group(2), cyclic_group(2), name="Z2xZ2")


def symmetric_group_3() -> FiniteGroup:
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.empty((n, n), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(3))]
    labels = ["e", "(012)", "(021)", "(12)", "(02)", "(01)"]
    return FiniteGroup(table, labels=labels, name="S3")


def quaternion_group() -> FiniteGroup:
    # elements 1, -1, i, -i, j, -j, k, -k encoded as (sign, axis)
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    def decode(x):
        return (1 if x % 2 == 0 else -1, x // 2)  # axis 0=real,1=i,2=j,3=k
    def encode(sign, axis):
        return 2 * axis + (0 if sign == 1 else 1)
    # quaternion unit multiplication: table over axes with sign
    axis_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    n = 8
    table = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        sx, ax = decode(x)
        for y in range(n):
            sy, ay = decode(y)
            s, a = axis_mul[(ax, ay)]
            table[x, y] = encode(sx * sy * s, a)
    return FiniteGroup(table, labels=labels, name="Q8")


def dihedral_group_4() -> FiniteGroup:
    # r^a s^b with a mod 4, b mod 2; index a + 4 b; s r = r^{-1} s.
    n = 8
    table = np.empty((n, n), dtype=np.int64)
    for a in range(4):
        for b in range(2):
            for c in range(4):
                for d in range(2):
                    aa = (a + (c if b == 0 else -c)) % 4
                    bb = (b + d) % 2
                    table[a + 4 * b, c + 4 * d] = aa + 4 * bb
    labels = [f"r{a}" if b == 0 else f"r{a}s" for b in range(2) for a in range(4)]
    return FiniteGroup(table, labels=labels, name="D4")
