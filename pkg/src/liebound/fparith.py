"""Exact linear algebra over prime fields F_p.

Matrices are plain ``numpy`` integer arrays with residues in ``[0, p)``;
the modulus travels alongside as an ``int``.  Moduli are capped at 2**16 so
every product of two residues, and every dot product of length below 2**31,
fits in int64 before reduction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from liebound.errors import InputError

MAX_MODULUS = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_modulus(p: int) -> int:
    """Validate ``p`` as an odd prime below ``MAX_MODULUS`` and return it."""
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise InputError(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p == 2 or not is_prime(p):
        raise InputError(f"modulus must be an odd prime, got {p}")
    if p >= MAX_MODULUS:
        raise InputError(f"modulus {p} exceeds the supported bound {MAX_MODULUS}")
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """``inv[a] = a^{-1} mod p`` for ``a`` in ``1..p-1``; ``inv[0] = 0``."""
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    inv.setflags(write=False)
    return inv


def as_fp(a, p: int) -> np.ndarray:
    """Copy ``a`` into a fresh int64 array reduced into ``[0, p)``."""
    return np.mod(np.asarray(a, dtype=np.int64), p)


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``m`` over F_p.

    Returns ``(R, pivots)`` where ``R`` has the same shape as ``m`` (zero rows
    at the bottom) and ``pivots`` lists the pivot column of each nonzero row.
    Pivot rows are normalised to a leading 1, so ``R`` is the unique RREF.
    """
    R = as_fp(m, p)
    if R.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {R.shape}")
    inv = inverse_table(p)
    nrows, ncols = R.shape
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.flatnonzero(R[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = (R[row] * inv[R[row, col]]) % p
        col_vals = R[:, col].copy()
        col_vals[row] = 0
        hit = np.flatnonzero(col_vals)
        if hit.size:
            R[hit] = (R[hit] - np.outer(col_vals[hit], R[row])) % p
        pivots.append(col)
        row += 1
    return R, pivots


def rank(m, p: int) -> int:
    """Rank of ``m`` over F_p."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def nullspace(m, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel ``{x : m x = 0}`` over F_p."""
    m = np.atleast_2d(np.asarray(m, dtype=np.int64))
    ncols = m.shape[1]
    R, pivots = rref(m, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-R[i, f]) % p
    return basis


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_p^d stored by its canonical (RREF) basis.

    Two equal subspaces always compare and hash equal, which is what lets
    orbit families be deduplicated exactly.
    """

    p: int
    d: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x) for row in self.basis)

    def matrix(self) -> np.ndarray:
        """Basis rows as a ``(dim, d)`` int64 array."""
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.d)

    def to_dict(self) -> dict:
        return {"p": self.p, "dim": self.d, "basis": [list(r) for r in self.basis]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Subspace":
        try:
            p, d, rows = int(data["p"]), int(data["dim"]), data["basis"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed subspace document: {exc}") from exc
        return span(rows, d, p)

    @classmethod
    def from_json(cls, text: str) -> "Subspace":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"Subspace(p={self.p}, d={self.d}, dim={self.dim}, basis={list(map(list, self.basis))})"


def _from_rref(R: np.ndarray, npiv: int, d: int, p: int) -> Subspace:
    return Subspace(p, d, tuple(tuple(int(x) for x in R[i]) for i in range(npiv)))


def span(vectors: Iterable[Sequence[int]] | np.ndarray, d: int, p: int) -> Subspace:
    """Canonical subspace spanned by ``vectors`` in F_p^d."""
    rows = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors,
                      dtype=np.int64)
    if rows.size == 0:
        return Subspace(p, d, ())
    rows = rows.reshape(-1, rows.shape[-1])
    if rows.shape[1] != d:
        raise InputError(f"vectors have length {rows.shape[1]}, expected {d}")
    R, pivots = rref(rows, p)
    return _from_rref(R, len(pivots), d, p)


def zero_subspace(d: int, p: int) -> Subspace:
    return Subspace(p, d, ())


def full_space(d: int, p: int) -> Subspace:
    return span(np.eye(d, dtype=np.int64), d, p)


def _check_compatible(s: Subspace, d: int, p: int) -> None:
    if s.d != d or s.p != p:
        raise InputError(f"dimension/modulus mismatch: subspace of F_{s.p}^{s.d} vs F_{p}^{d}")


def contains(s: Subspace, v) -> bool:
    v = as_fp(v, s.p).reshape(-1)
    _check_compatible(s, v.shape[0], s.p)
    if not v.any():
        return True
    if s.dim == 0:
        return False
    # reduce v against the RREF basis using its pivots
    r = v.copy()
    M = s.matrix()
    for row, pc in zip(M, s.pivots):
        if r[pc]:
            r = (r - r[pc] * row) % s.p
    return not r.any()


def subspace_leq(s1: Subspace, s2: Subspace) -> bool:
    """``s1 ⊆ s2``."""
    _check_compatible(s1, s2.d, s2.p)
    return all(contains(s2, row) for row in s1.basis)


def annihilator(s: Subspace) -> Subspace:
    """The subspace ``{f : f(v) = 0 for all v in s}`` of the dual, in dual coordinates."""
    if s.dim == 0:
        return full_space(s.d, s.p)
    return span(nullspace(s.matrix(), s.p), s.d, s.p)


def sum_subspaces(s1: Subspace, s2: Subspace) -> Subspace:
    _check_compatible(s1, s2.d, s2.p)
    return span(list(s1.basis) + list(s2.basis), s1.d, s1.p)


def projective_count(d: int, p: int) -> int:
    """Number of points of P^{d-1}(F_p), i.e. lines through 0 in F_p^d."""
    return (p**d - 1) // (p - 1)


def projective_points(d: int, p: int) -> np.ndarray:
    """All normalised representatives (first nonzero coordinate 1), lexicographically."""
    pts = []
    for lead in range(d - 1, -1, -1):
        tail = d - 1 - lead
        for k in range(p**tail):
            v = [0] * d
            v[lead] = 1
            for j in range(d - 1, lead, -1):
                v[j] = k % p
                k //= p
            pts.append(v)
    return np.array(pts, dtype=np.int64).reshape(-1, d)


def all_subspaces(d: int, p: int) -> list[Subspace]:
    """Every subspace of F_p^d; only sensible for tiny ``p**d``."""
    points = projective_points(d, p)
    seen = {zero_subspace(d, p)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for s in frontier:
            for v in points:
                if contains(s, v):
                    continue
                t = span(list(s.basis) + [v.tolist()], d, p)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (s.dim, s.basis))
