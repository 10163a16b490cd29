"""Indecomposable root systems from Cartan data.

Roots are integer coordinate tuples in the basis of simple roots (Bourbaki
labelling).  The bilinear form comes from the symmetrised Cartan matrix,
scaled once so that the highest root has squared length 2.

Cartan matrix convention: ``cartan[i][j] = 2 (a_i, a_j) / (a_i, a_i)``, so
row ``i`` holds the pairings ``<a_j, a_i^vee>``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from liebound.errors import InputError, InvariantViolation, UnsupportedError

Root = tuple[int, ...]

FAMILIES = "ABCDEFG"

# h^vee per family; kept as a table so the (2rho, theta) computation has
# something independent to be checked against.
_DUAL_COXETER = {
    "A": lambda n: n + 1,
    "B": lambda n: 2 * n - 1,
    "C": lambda n: n + 1,
    "D": lambda n: 2 * n - 2,
    "E": lambda n: {6: 12, 7: 18, 8: 30}[n],
    "F": lambda n: 9,
    "G": lambda n: 4,
}

MAX_ROOTS = 20000


def valid_rank(family: str, rank: int) -> bool:
    return {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 3,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(family, False)


def cartan_matrix(family: str, rank: int) -> list[list[int]]:
    """Bourbaki-labelled Cartan matrix of type ``family``/``rank``."""
    family = family.upper()
    if not valid_rank(family, rank):
        raise InputError(f"no root system of type {family}_{rank}")
    n = rank
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a_ij=-1, a_ji=-1):
        A[i][j], A[j][i] = a_ij, a_ji

    if family in "ABCD":
        for i in range(n - 1):
            link(i, i + 1)
        if family == "B":
            # a_{n-1} long, a_n short
            link(n - 2, n - 1, -1, -2)
        elif family == "C":
            link(n - 2, n - 1, -2, -1)
        elif family == "D":
            A[n - 2][n - 1] = A[n - 1][n - 2] = 0
            link(n - 3, n - 1)
    elif family == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif family == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif family == "G":
        # a_1 short, a_2 long
        link(0, 1, -3, -1)
    return A


def _root_lengths(A: Sequence[Sequence[int]]) -> list[Fraction]:
    """Squared lengths of simple roots, up to a common scalar, from a connected Cartan matrix."""
    n = len(A)
    lengths: list[Fraction | None] = [None] * n
    lengths[0] = Fraction(1)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j == i or A[i][j] == 0:
                continue
            if A[j][i] == 0:
                raise InputError("Cartan matrix is not symmetrizable (a_ij = 0 but a_ji != 0)")
            # (a_i,a_j) = A[i][j] l_i / 2 = A[j][i] l_j / 2
            lj = Fraction(A[i][j]) * lengths[i] / A[j][i]
            if lengths[j] is None:
                lengths[j] = lj
                queue.append(j)
            elif lengths[j] != lj:
                raise InputError("Cartan matrix is not symmetrizable")
    if any(x is None for x in lengths):
        raise InputError("Cartan matrix is decomposable; only indecomposable systems are supported")
    if any(x <= 0 for x in lengths):
        raise InputError("Cartan matrix does not give positive root lengths")
    return lengths  # type: ignore[return-value]


def _validate_cartan(A) -> list[list[int]]:
    try:
        A = [[int(x) for x in row] for row in A]
    except (TypeError, ValueError) as exc:
        raise InputError(f"Cartan matrix must be a square integer matrix: {exc}") from exc
    n = len(A)
    if n == 0 or any(len(row) != n for row in A):
        raise InputError("Cartan matrix must be square and nonempty")
    for i in range(n):
        if A[i][i] != 2:
            raise InputError("Cartan matrix must have 2 on the diagonal")
        for j in range(n):
            if i != j and A[i][j] > 0:
                raise InputError("off-diagonal Cartan entries must be <= 0")
    return A


def _generate_positive_roots(A: list[list[int]]) -> list[Root]:
    """Positive roots by closure under simple-root strings, ordered by height then lex."""
    n = len(A)
    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = set()
        for r in layer:
            for i in range(n):
                # q = how far down the a_i-string through r we can go
                q = 0
                down = list(r)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        q += 1
                    else:
                        break
                pairing = sum(r[j] * A[i][j] for j in range(n))
                if q - pairing > 0:
                    up = list(r)
                    up[i] += 1
                    nxt.add(tuple(up))
        nxt -= roots
        roots |= nxt
        if len(roots) > MAX_ROOTS:
            raise InputError("root generation does not terminate: Cartan matrix is not of finite type")
        layer = sorted(nxt)
    return sorted(roots, key=root_order_key)


def root_order_key(r: Root) -> tuple:
    """Total order on positive roots: by height, then lexicographically with
    larger leading coordinates first (so the simple roots come out as a_1..a_n)."""
    return (sum(r), tuple(-x for x in r))


def height(r: Root) -> int:
    return sum(r)


def neg(r: Root) -> Root:
    return tuple(-x for x in r)


def add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class RootSystem:
    """An indecomposable root system.

    ``family`` is ``None`` for systems built from a custom Cartan matrix;
    classification-backed invariants are then unavailable.
    """

    family: str | None
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[Root, ...]
    symmetrizer: tuple[Fraction, ...]

    @property
    def name(self) -> str:
        return f"{self.family}_{self.rank}" if self.family else f"custom_{self.rank}"

    @property
    def simple_roots(self) -> tuple[Root, ...]:
        return self.positive_roots[: self.rank]

    @cached_property
    def roots(self) -> tuple[Root, ...]:
        """All roots: positive ones in order, then their negatives in the same order."""
        return self.positive_roots + tuple(neg(r) for r in self.positive_roots)

    @cached_property
    def root_set(self) -> frozenset[Root]:
        return frozenset(self.roots)

    def is_root(self, r: Root) -> bool:
        return tuple(r) in self.root_set

    @cached_property
    def gram(self) -> tuple[tuple[Fraction, ...], ...]:
        """``(a_i, a_j)`` for simple roots, normalised so the highest root has length 2."""
        n = self.rank
        return tuple(
            tuple(self.symmetrizer[i] * self.cartan[i][j] / 2 for j in range(n)) for i in range(n)
        )

    def __repr__(self) -> str:
        return f"RootSystem({self.name}, |Phi+|={len(self.positive_roots)})"


def _assemble(family: str | None, A: list[list[int]]) -> RootSystem:
    lengths = _root_lengths(A)
    pos = _generate_positive_roots(A)
    n = len(A)
    theta = pos[-1]
    raw = sum(
        theta[i] * theta[j] * lengths[i] * A[i][j] / 2 for i in range(n) for j in range(n)
    )
    scale = Fraction(2) / raw
    sym = tuple(x * scale for x in lengths)
    return RootSystem(
        family=family,
        rank=n,
        cartan=tuple(tuple(r) for r in A),
        positive_roots=tuple(pos),
        symmetrizer=sym,
    )


@lru_cache(maxsize=None)
def build_root_system(family: str, rank: int) -> RootSystem:
    """Root system of classical/exceptional type, e.g. ``build_root_system("G", 2)``."""
    if not isinstance(family, str) or len(family) != 1 or family.upper() not in FAMILIES:
        raise InputError(f"unknown root system family {family!r}")
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise InputError(f"rank must be an integer, got {rank!r}")
    family = family.upper()
    return _assemble(family, cartan_matrix(family, rank))


def from_cartan(cartan) -> RootSystem:
    """Root system from an arbitrary (finite-type, indecomposable) Cartan matrix."""
    return _assemble(None, _validate_cartan(cartan))


def from_cartan_json(text: str) -> RootSystem:
    try:
        doc = json.loads(text)
        matrix = doc["cartan"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f'expected a JSON document {{"cartan": [[...], ...]}}: {exc}') from exc
    return from_cartan(matrix)


def parse_selector(selector: str) -> RootSystem:
    """``"B:4"`` (or ``"B4"``) -> ``build_root_system("B", 4)``."""
    s = selector.strip().replace("_", ":")
    fam, _, rk = s.partition(":") if ":" in s else (s[:1], None, s[1:])
    try:
        return build_root_system(fam.upper(), int(rk))
    except ValueError as exc:
        raise InputError(f"bad root system selector {selector!r}") from exc


def highest_root(rs: RootSystem) -> Root:
    return rs.positive_roots[-1]


def weyl_vector_doubled(rs: RootSystem) -> Root:
    """Coordinates of 2 rho, the sum of the positive roots."""
    return tuple(sum(col) for col in zip(*rs.positive_roots))


def inner_product(rs: RootSystem, a: Root, b: Root) -> Fraction:
    G = rs.gram
    n = rs.rank
    if len(a) != n or len(b) != n:
        raise InputError(f"root coordinates must have length {n}")
    return sum((a[i] * b[j] * G[i][j] for i in range(n) for j in range(n) if a[i] and b[j]),
               Fraction(0))


def coroot_pairing(rs: RootSystem, a: Root, i: int) -> int:
    """``<a, alpha_i^vee>``, an integer for any ``a`` in the root lattice."""
    return sum(a[j] * rs.cartan[i][j] for j in range(rs.rank))


def simple_reflection(rs: RootSystem, i: int, a: Root) -> Root:
    c = coroot_pairing(rs, a, i)
    return tuple(x - (c if k == i else 0) for k, x in enumerate(a))


def coroot_expansion(rs: RootSystem, r: Root) -> tuple[int, ...]:
    """Integer coefficients of ``h_r`` in the fundamental coroots ``h_1..h_n``.

    ``r^vee = 2r/(r,r)``, and ``alpha_i^vee = 2 alpha_i/(alpha_i, alpha_i)``,
    hence the coefficient of ``alpha_i^vee`` is ``r_i (alpha_i,alpha_i)/(r,r)``.
    """
    rr = inner_product(rs, r, r)
    out = []
    for i in range(rs.rank):
        c = r[i] * rs.gram[i][i] / rr
        if c.denominator != 1:
            raise InvariantViolation(f"non-integral coroot coefficient for {r}")
        out.append(int(c))
    return tuple(out)


def _require_classified(rs: RootSystem, what: str) -> None:
    if rs.family is None:
        raise UnsupportedError(f"{what} is unsupported for a custom Cartan matrix")


def dual_coxeter(rs: RootSystem) -> int:
    """Dual Coxeter number from the classification table."""
    _require_classified(rs, "dual_coxeter")
    return _DUAL_COXETER[rs.family](rs.rank)


def u_invariant(rs: RootSystem) -> int:
    """``(2 rho, theta)`` as an exact integer, cross-checked against ``2 h^vee - 2``."""
    _require_classified(rs, "u_invariant")
    val = inner_product(rs, weyl_vector_doubled(rs), highest_root(rs))
    if val.denominator != 1:
        raise InvariantViolation(f"(2rho, theta) = {val} is not an integer for {rs.name}")
    u = int(val)
    if u != 2 * dual_coxeter(rs) - 2:
        raise InvariantViolation(
            f"{rs.name}: (2rho, theta) = {u} but 2h^vee - 2 = {2 * dual_coxeter(rs) - 2}"
        )
    return u


def special_roots(rs: RootSystem) -> list[Root]:
    """Positive roots ``beta`` with ``theta - beta`` a root."""
    theta = highest_root(rs)
    return [b for b in rs.positive_roots if rs.is_root(sub(theta, b))]


def dim_g(rs: RootSystem) -> int:
    return 2 * len(rs.positive_roots) + rs.rank


def is_nice_prime(rs: RootSystem, p: int) -> bool:
    """``p >= 5``, and ``p`` does not divide ``n+1`` in type A_n."""
    if p < 5:
        return False
    if rs.family == "A" and (rs.rank + 1) % p == 0:
        return False
    return True


@dataclass(frozen=True)
class WeylData:
    two_rho: Root
    u: int
    dual_coxeter: int
    special_roots: tuple[Root, ...]


def weyl_data(rs: RootSystem) -> WeylData:
    u = u_invariant(rs)
    S = tuple(special_roots(rs))
    if len(S) + 2 != u:
        raise InvariantViolation(f"{rs.name}: |S| + 2 = {len(S) + 2} but u = {u}")
    return WeylData(weyl_vector_doubled(rs), u, dual_coxeter(rs), S)


# Ranks covered by the reproduced table.
TABLE_SYSTEMS: tuple[tuple[str, int], ...] = (
    tuple(("A", n) for n in range(1, 9))
    + tuple(("B", n) for n in range(2, 7))
    + tuple(("C", n) for n in range(2, 7))
    + tuple(("D", n) for n in range(3, 9))
    + (("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2))
)
