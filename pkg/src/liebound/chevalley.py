"""Chevalley basis structure constants and the adjoint representation mod p.

Basis order (``d = |Phi| + n``):

* indices ``0 .. N-1``: ``e_s`` for the positive roots, in root order;
* indices ``N .. N+n-1``: fundamental coroots ``h_1 .. h_n``;
* indices ``N+n .. d-1``: ``e_{-s}`` for the positive roots, same order.

Signs follow the extraspecial-pair convention: for each non-simple positive
root, the extraspecial pair ``(a, b)`` (``a`` minimal in the root order among
decompositions ``a + b`` with ``a < b``) gets ``N_{a,b} = +(p_{a,b} + 1)``.
Every other constant is then forced by the Chevalley relations
``N_{-r,-s} = -N_{r,s}``, the three-term rule ``N_{r,s}/(t,t) = N_{s,t}/(r,r)``
when ``r + s + t = 0``, and the four-term rule for ``r + s + t + u = 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from liebound import fparith
from liebound.errors import InputError, InvariantViolation
from liebound.fparith import Subspace
from liebound.rootsys import (
    Root,
    RootSystem,
    add,
    coroot_expansion,
    coroot_pairing,
    highest_root,
    inner_product,
    is_nice_prime,
    neg,
    root_order_key,
    special_roots,
    sub,
)


def _string_down(rs: RootSystem, r: Root, s: Root) -> int:
    """``max{i : s - i r in Phi}``."""
    i = 0
    cur = s
    while True:
        cur = sub(cur, r)
        if not rs.is_root(cur):
            return i
        i += 1


class _Constants:
    """Computes ``N_{r,s}`` for all roots from the extraspecial choice."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.pos = rs.positive_roots
        self.pos_set = set(self.pos)
        self.norm = {r: inner_product(rs, r, r) for r in self.pos}
        self.table: dict[tuple[Root, Root], int] = {}
        self._fill()

    def length2(self, r: Root) -> Fraction:
        return self.norm[r if r in self.pos_set else neg(r)]

    def _fill(self) -> None:
        rs = self.rs
        key = root_order_key
        by_sum: dict[Root, list[tuple[Root, Root]]] = {}
        for i, a in enumerate(self.pos):
            for b in self.pos[i + 1:]:
                c = add(a, b)
                if rs.is_root(c):
                    by_sum.setdefault(c, []).append((a, b))
        for xi in self.pos:
            pairs = by_sum.get(xi)
            if not pairs:
                continue
            pairs = sorted(pairs, key=lambda ab: key(ab[0]))
            alpha, beta = pairs[0]
            self._set(alpha, beta, _string_down(rs, alpha, beta) + 1)
            for gamma, delta in pairs[1:]:
                self._set(gamma, delta, self._special(xi, alpha, beta, gamma, delta))

    def _set(self, a: Root, b: Root, n: int) -> None:
        self.table[(a, b)] = n
        self.table[(b, a)] = -n

    def _special(self, xi, alpha, beta, gamma, delta) -> int:
        # four-term rule with (r, s, t, u) = (gamma, delta, -alpha, -beta)
        rs = self.rs
        acc = Fraction(0)
        for left, right, mid in (
            ((delta, neg(alpha)), (gamma, neg(beta)), sub(delta, alpha)),
            ((neg(alpha), gamma), (delta, neg(beta)), sub(gamma, alpha)),
        ):
            if rs.is_root(mid):
                acc -= Fraction(self.N(*left) * self.N(*right)) / self.length2(mid)
        n_ab_neg = -self.table[(alpha, beta)]
        val = acc * self.length2(xi) / n_ab_neg
        if val.denominator != 1:
            raise InvariantViolation(f"non-integral structure constant for {gamma}, {delta}")
        return int(val)

    def N(self, r: Root, s: Root) -> int:
        """``N_{r,s}`` for any roots; zero unless ``r + s`` is a root."""
        rs = self.rs
        t = add(r, s)
        if not rs.is_root(t):
            return 0
        rp, sp = r in self.pos_set, s in self.pos_set
        if rp and sp:
            return self.table[(r, s)]
        if not rp and not sp:
            return -self.table[(neg(r), neg(s))]
        t = neg(t)
        tp = t in self.pos_set
        # r + s + t = 0 and exactly one of r, s is positive
        if tp:
            # the two positive ones among (t, r, s)
            if rp:
                # N_{t,r}/(s,s) = N_{r,s}/(t,t)
                return int(Fraction(self.N(t, r)) * self.length2(t) / self.length2(s))
            # N_{s,t}/(r,r) = N_{r,s}/(t,t)
            return int(Fraction(self.N(s, t)) * self.length2(t) / self.length2(r))
        # t negative: the two negative ones among (r, s, t)
        if rp:
            # N_{s,t}/(r,r)
            return int(Fraction(self.N(s, t)) * self.length2(t) / self.length2(r))
        return int(Fraction(self.N(t, r)) * self.length2(t) / self.length2(s))


@dataclass(frozen=True, eq=False)
class ChevalleyAlgebra:
    """Chevalley basis of the simple Lie algebra attached to ``rs``, over the integers.

    ``brackets[(i, j)]`` is the sparse expansion ``((k, c), ...)`` of
    ``[b_i, b_j]``; pairs with zero bracket are absent.
    """

    rs: RootSystem
    labels: tuple[str, ...]
    brackets: dict
    coroot_expansions: dict

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n_pos(self) -> int:
        return len(self.rs.positive_roots)

    def e(self, r: Root) -> int:
        """Basis index of the root vector ``e_r``."""
        return self._root_index[tuple(r)]

    def h(self, i: int) -> int:
        """Basis index of the fundamental coroot ``h_{i+1}`` (``i`` is 0-based)."""
        return self.n_pos + i

    @cached_property
    def _root_index(self) -> dict:
        pos = self.rs.positive_roots
        idx = {r: k for k, r in enumerate(pos)}
        off = self.n_pos + self.rs.rank
        idx.update({neg(r): off + k for k, r in enumerate(pos)})
        return idx

    @cached_property
    def borel(self) -> tuple[int, ...]:
        """Indices spanning the positive Borel subalgebra (coroots and positive root vectors)."""
        return tuple(range(self.n_pos + self.rs.rank))

    def root_of(self, k: int) -> Root | None:
        N, n = self.n_pos, self.rs.rank
        if k < N:
            return self.rs.positive_roots[k]
        if k < N + n:
            return None
        return neg(self.rs.positive_roots[k - N - n])

    def basis_vector(self, k: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[k] = 1
        return v

    def h_vector(self, r: Root) -> np.ndarray:
        """Coordinates of the coroot ``h_r`` in the basis."""
        v = np.zeros(self.dim, dtype=np.int64)
        for i, c in enumerate(self.coroot_expansions[tuple(r)]):
            v[self.h(i)] = c
        return v

    def N(self, r: Root, s: Root) -> int:
        """``N_{r,s}`` read back from the bracket table."""
        terms = self.brackets.get((self.e(r), self.e(s)), ())
        if not self.rs.is_root(add(r, s)):
            return 0
        tgt = self.e(add(r, s))
        return next((c for k, c in terms if k == tgt), 0)

    @cached_property
    def sparse_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR-like arrays ``(ptr, idx, val)``; pair ``(i, j)`` lives at ``ptr[i*d+j]:ptr[i*d+j+1]``."""
        d = self.dim
        ptr = np.zeros(d * d + 1, dtype=np.int64)
        idx, val = [], []
        for i in range(d):
            for j in range(d):
                terms = self.brackets.get((i, j), ())
                for k, c in terms:
                    idx.append(k)
                    val.append(c)
                ptr[i * d + j + 1] = len(idx)
        return ptr, np.array(idx, dtype=np.int64), np.array(val, dtype=np.int64)

    @cached_property
    def structure_tensor(self) -> np.ndarray:
        """Dense ``C[i, j, k]`` with ``[b_i, b_j] = sum_k C[i,j,k] b_k``."""
        d = self.dim
        C = np.zeros((d, d, d), dtype=np.int64)
        for (i, j), terms in self.brackets.items():
            for k, c in terms:
                C[i, j, k] = c
        return C

    def to_dict(self) -> dict:
        return {
            "type": self.rs.name,
            "ordering": "positive roots by height then reverse-lex; coroots h_1..h_n; negative roots",
            "basis": list(self.labels),
            "brackets": [
                [i, j, [[k, c] for k, c in terms]]
                for (i, j), terms in sorted(self.brackets.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _label(r: Root) -> str:
    return "e[" + ",".join(str(x) for x in r) + "]"


@lru_cache(maxsize=None)
def structure_constants(rs: RootSystem) -> ChevalleyAlgebra:
    """Build the integer Chevalley basis multiplication table for ``rs``."""
    consts = _Constants(rs)
    pos = rs.positive_roots
    n = rs.rank
    N = len(pos)
    roots = list(pos) + [None] * n + [neg(r) for r in pos]
    labels = tuple(
        [_label(r) for r in pos] + [f"h{i + 1}" for i in range(n)] + [_label(neg(r)) for r in pos]
    )
    index = {r: k for k, r in enumerate(roots) if r is not None}
    coroots = {r: coroot_expansion(rs, r) for r in pos}
    coroots.update({neg(r): tuple(-c for c in coroots[r]) for r in pos})

    brackets: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
    for i, r in enumerate(roots):
        if r is None:
            continue
        for j, s in enumerate(roots):
            if s is None:
                continue
            t = add(r, s)
            if not any(t):
                terms = tuple((N + m, c) for m, c in enumerate(coroots[r]) if c)
            elif rs.is_root(t):
                terms = ((index[t], consts.N(r, s)),)
            else:
                continue
            brackets[(i, j)] = terms
        for m in range(n):
            # [h_m, e_r] = <r, a_m^vee> e_r
            c = coroot_pairing(rs, r, m)
            if c:
                brackets[(N + m, i)] = ((i, c),)
                brackets[(i, N + m)] = ((i, -c),)
    return ChevalleyAlgebra(rs, labels, brackets, coroots)


def bracket(alg: ChevalleyAlgebra, x, y) -> np.ndarray:
    """Bilinear extension of the structure constants to coefficient vectors."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    d = alg.dim
    if x.shape != (d,) or y.shape != (d,):
        raise InputError(f"Lie elements must have length {d}")
    out = np.zeros(d, dtype=np.int64)
    xs, ys = np.flatnonzero(x), np.flatnonzero(y)
    for i in xs:
        xi = int(x[i])
        for j in ys:
            terms = alg.brackets.get((int(i), int(j)))
            if terms:
                c = xi * int(y[j])
                for k, v in terms:
                    out[k] += c * v
    return out


def ad_matrix_int(alg: ChevalleyAlgebra, x) -> np.ndarray:
    """Integer matrix of ``ad(x)``: column ``j`` is ``[x, b_j]``."""
    x = np.asarray(x, dtype=np.int64)
    d = alg.dim
    if x.shape != (d,):
        raise InputError(f"Lie elements must have length {d}")
    M = np.zeros((d, d), dtype=np.int64)
    for i in np.flatnonzero(x):
        xi = int(x[i])
        for j in range(d):
            for k, c in alg.brackets.get((int(i), j), ()):
                M[k, j] += xi * c
    return M


def adjoint_matrix(alg: ChevalleyAlgebra, x, p: int) -> np.ndarray:
    p = fparith.check_modulus(p)
    return ad_matrix_int(alg, x) % p


def adjoint_operators(alg: ChevalleyAlgebra, p: int) -> np.ndarray:
    """Stack ``(d, d, d)`` of ``ad(b_i) mod p``."""
    p = fparith.check_modulus(p)
    d = alg.dim
    ops = np.zeros((d, d, d), dtype=np.int64)
    for (i, j), terms in alg.brackets.items():
        for k, c in terms:
            ops[i, k, j] = c
    return ops % p


def adjoint_rep(alg: ChevalleyAlgebra, p: int):
    """The adjoint module over F_p: one operator ``ad(b_i)`` per basis element."""
    from liebound.orbits import LieRep

    return LieRep(p, alg.dim, adjoint_operators(alg, p), f"adjoint:{alg.rs.family or 'custom'}{alg.rs.rank}")


def e_theta_span(alg: ChevalleyAlgebra, p: int) -> tuple[Subspace, Subspace]:
    """Column space of ``ad(e_theta)`` and the predicted span
    ``<e_theta, h_theta> + <e_{theta-beta} : beta special>``."""
    rs = alg.rs
    theta = highest_root(rs)
    A = adjoint_matrix(alg, alg.basis_vector(alg.e(theta)), p)
    col = fparith.span(A.T, alg.dim, p)
    predicted = [alg.basis_vector(alg.e(theta)), alg.h_vector(theta)]
    predicted += [alg.basis_vector(alg.e(sub(theta, b))) for b in special_roots(rs)]
    return col, fparith.span(np.array(predicted) % p, alg.dim, p)


@dataclass(frozen=True)
class ThetaSpanResult:
    subspace: Subspace
    nice: bool
    warning: str | None = None


def bracket_with_e_theta_span(alg: ChevalleyAlgebra, p: int) -> ThetaSpanResult:
    """``[g, e_theta]`` over F_p, checked against the special-root prediction.

    At a nice prime a mismatch raises ``InvariantViolation``.  Other primes
    are allowed and the result carries a warning instead.
    """
    p = fparith.check_modulus(p)
    col, predicted = e_theta_span(alg, p)
    nice = is_nice_prime(alg.rs, p)
    expected_dim = len(special_roots(alg.rs)) + 2
    agrees = col == predicted and col.dim == expected_dim
    if nice and not agrees:
        raise InvariantViolation(
            f"{alg.rs.name}, p={p}: dim [g, e_theta] = {col.dim}, expected {expected_dim}"
        )
    warning = None
    if not nice:
        warning = f"p={p} is not a nice prime for {alg.rs.name}"
        if not agrees:
            warning += f"; [g, e_theta] has dim {col.dim}, not {expected_dim}"
    return ThetaSpanResult(col, nice, warning)


def _jacobi_kernel():
    from numba import njit

    @njit(cache=True, nogil=True)
    def kernel(ptr, idx, val, d, i_lo, i_hi):
        acc = np.zeros(d, dtype=np.int64)
        touched = np.zeros(d, dtype=np.int64)
        bad = 0
        first = np.full(3, -1, dtype=np.int64)
        for i in range(i_lo, i_hi):
            for j in range(d):
                for k in range(d):
                    nt = 0
                    for cyc in range(3):
                        if cyc == 0:
                            a, b, c = i, j, k
                        elif cyc == 1:
                            a, b, c = j, k, i
                        else:
                            a, b, c = k, i, j
                        p0 = ptr[a * d + b]
                        p1 = ptr[a * d + b + 1]
                        for t in range(p0, p1):
                            l = idx[t]
                            cl = val[t]
                            q0 = ptr[l * d + c]
                            q1 = ptr[l * d + c + 1]
                            for s in range(q0, q1):
                                m = idx[s]
                                if acc[m] == 0:
                                    touched[nt] = m
                                    nt += 1
                                acc[m] += cl * val[s]
                    nonzero = False
                    for t in range(nt):
                        m = touched[t]
                        if acc[m] != 0:
                            nonzero = True
                            acc[m] = 0
                    if nonzero:
                        if bad == 0:
                            first[0] = i
                            first[1] = j
                            first[2] = k
                        bad += 1
        return bad, first

    return kernel


_JACOBI = None


def jacobi_check(alg: ChevalleyAlgebra) -> tuple[int, tuple[int, int, int] | None]:
    """Check the Jacobi identity exactly over the integers on every ordered basis triple.

    Returns ``(number_of_failing_triples, first_failing_triple_or_None)``.
    """
    global _JACOBI
    if _JACOBI is None:
        _JACOBI = _jacobi_kernel()
    ptr, idx, val = alg.sparse_arrays
    bad, first = _JACOBI(ptr, idx, val, alg.dim, 0, alg.dim)
    return int(bad), (tuple(int(x) for x in first) if bad else None)


def antisymmetry_check(alg: ChevalleyAlgebra) -> bool:
    """``[b_j, b_i] = -[b_i, b_j]`` and ``[b_i, b_i] = 0`` for the whole table."""
    for (i, j), terms in alg.brackets.items():
        if i == j and terms:
            return False
        other = alg.brackets.get((j, i), ())
        if dict(other) != {k: -c for k, c in terms}:
            return False
    return True
