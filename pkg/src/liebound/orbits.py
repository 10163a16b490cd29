"""Orbit subspaces ``g.v`` and the minimum orbit dimension over F_p.

A representation is given by a spanning set of operators ``X_1..X_m`` acting
on ``V = F_p^d``; the orbit subspace of ``v`` is ``span{X_i v}``.  Only the
linear span of the operators matters, so Lie closure is never checked.

Exhaustive searches walk one normalised representative per projective point
(first nonzero coordinate equal to 1) in lexicographic order.  The index
range is cut into fixed-size chunks that are evaluated independently (in
threads, via numba kernels that release the GIL) and merged in chunk order,
so the result does not depend on the thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from liebound import fparith
from liebound.errors import BudgetExceeded, InputError, InvariantViolation
from liebound.fparith import Subspace

DEFAULT_BUDGET = 1 << 25
CHUNK = 1 << 16
MAX_WITNESSES = 16
RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass(frozen=True, eq=False)
class LieRep:
    """Operators ``rho(x_1), ..., rho(x_m)`` on ``F_p^d``, stacked as an ``(m, d, d)`` array."""

    p: int
    d: int
    operators: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        p = fparith.check_modulus(self.p)
        ops = np.asarray(self.operators, dtype=np.int64)
        if ops.ndim != 3 or ops.shape[1:] != (self.d, self.d) or ops.shape[0] < 1:
            raise InputError(
                f"operators must be a nonempty stack of {self.d}x{self.d} matrices, got shape {ops.shape}"
            )
        ops = np.mod(ops, p)
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def m(self) -> int:
        return self.operators.shape[0]

    def to_dict(self) -> dict:
        return {"p": self.p, "d": self.d, "operators": self.operators.tolist(), "label": self.label}

    @classmethod
    def from_dict(cls, doc: dict) -> "LieRep":
        try:
            return cls(int(doc["p"]), int(doc["d"]), np.asarray(doc["operators"], dtype=np.int64),
                       str(doc.get("label", "custom")))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed representation document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "LieRep":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)


def gl_natural_rep(n: int, p: int) -> LieRep:
    """``gl_n(F_p)`` on ``F_p^n`` via the elementary matrices ``E_ij``."""
    if n < 1:
        raise InputError("n must be >= 1")
    ops = np.zeros((n * n, n, n), dtype=np.int64)
    for k in range(n * n):
        ops[k, k // n, k % n] = 1
    return LieRep(p, n, ops, f"gl:{n}")


def sl_natural_rep(n: int, p: int) -> LieRep:
    """``sl_n(F_p)`` on ``F_p^n``: off-diagonal ``E_ij`` and ``E_ii - E_{i+1,i+1}``.

    ``sl_1`` is the zero algebra; it is represented by a single zero operator.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if n == 1:
        return LieRep(p, 1, np.zeros((1, 1, 1), dtype=np.int64), "sl:1")
    ops = []
    for i in range(n):
        for j in range(n):
            if i != j:
                E = np.zeros((n, n), dtype=np.int64)
                E[i, j] = 1
                ops.append(E)
    for i in range(n - 1):
        H = np.zeros((n, n), dtype=np.int64)
        H[i, i], H[i + 1, i + 1] = 1, -1
        ops.append(H)
    return LieRep(p, n, np.array(ops), f"sl:{n}")


def zero_rep(d: int, p: int) -> LieRep:
    return LieRep(p, d, np.zeros((1, d, d), dtype=np.int64), f"zero:{d}")


def orbit_vectors(rep: LieRep, v) -> np.ndarray:
    """Rows ``X_i v`` for every operator."""
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if v.shape[0] != rep.d:
        raise InputError(f"vector has length {v.shape[0]}, expected {rep.d}")
    return (rep.operators @ (v % rep.p)) % rep.p


def orbit_subspace(rep: LieRep, v) -> Subspace:
    return fparith.span(orbit_vectors(rep, v), rep.d, rep.p)


# -- numba kernels -----------------------------------------------------------


@njit(cache=True, nogil=True)
def _decode(k, d, p, v):
    """Fill ``v`` with the ``k``-th normalised projective representative."""
    for j in range(d):
        v[j] = 0
    block = 1
    offset = 0
    lead = d - 1
    while k >= offset + block:
        offset += block
        block *= p
        lead -= 1
    t = k - offset
    v[lead] = 1
    for j in range(d - 1, lead, -1):
        v[j] = t % p
        t //= p


@njit(cache=True, nogil=True)
def _orbit_echelon(ops, p, inv, v, B, piv):
    """Reduced echelon basis of ``span{X_i v}`` in ``B``; returns its dimension.

    Rows ``B[:r]`` are kept fully reduced (each pivot column is zero in every
    other row) but not sorted by pivot.
    """
    m = ops.shape[0]
    d = ops.shape[1]
    r = 0
    w = np.empty(d, dtype=np.int64)
    for i in range(m):
        if r == d:
            break
        for a in range(d):
            s = 0
            for b in range(d):
                s += ops[i, a, b] * v[b]
            w[a] = s % p
        for q in range(r):
            c = w[piv[q]]
            if c != 0:
                for a in range(d):
                    w[a] = (w[a] - c * B[q, a]) % p
        lead = -1
        for a in range(d):
            if w[a] != 0:
                lead = a
                break
        if lead < 0:
            continue
        s = inv[w[lead]]
        for a in range(d):
            w[a] = (w[a] * s) % p
        for q in range(r):
            c = B[q, lead]
            if c != 0:
                for a in range(d):
                    B[q, a] = (B[q, a] - c * w[a]) % p
        for a in range(d):
            B[r, a] = w[a]
        piv[r] = lead
        r += 1
    return r


@njit(cache=True, nogil=True)
def _dims_range(ops, p, inv, start, stop, out):
    d = ops.shape[1]
    v = np.empty(d, dtype=np.int64)
    B = np.zeros((d, d), dtype=np.int64)
    piv = np.zeros(d, dtype=np.int64)
    for k in range(start, stop):
        _decode(k, d, p, v)
        out[k - start] = _orbit_echelon(ops, p, inv, v, B, piv)


@njit(cache=True, nogil=True)
def _dims_vectors(ops, p, inv, vecs, out):
    d = ops.shape[1]
    B = np.zeros((d, d), dtype=np.int64)
    piv = np.zeros(d, dtype=np.int64)
    for k in range(vecs.shape[0]):
        out[k] = _orbit_echelon(ops, p, inv, vecs[k], B, piv)


@njit(cache=True, nogil=True)
def _rref_range(ops, p, inv, start, stop, out):
    """Canonical RREF of each orbit subspace, rows sorted by pivot, flattened into ``out``."""
    d = ops.shape[1]
    v = np.empty(d, dtype=np.int64)
    B = np.zeros((d, d), dtype=np.int64)
    piv = np.zeros(d, dtype=np.int64)
    for k in range(start, stop):
        _decode(k, d, p, v)
        r = _orbit_echelon(ops, p, inv, v, B, piv)
        order = np.argsort(piv[:r])
        row = out[k - start]
        for a in range(d * d):
            row[a] = 0
        for q in range(r):
            src = order[q]
            for a in range(d):
                row[q * d + a] = B[src, a]


# -- search ------------------------------------------------------------------


@dataclass
class OrbitReport:
    """Result of a minimum orbit-dimension search.

    In ``"sampled"`` mode ``u`` is only an upper bound for the true minimum.
    """

    u: int
    witnesses: list = field(default_factory=list)
    mode: str = "exhaustive"
    vectors_examined: int = 0
    seed: int | None = None
    histogram: dict = field(default_factory=dict)
    sample_min: int | None = None
    rng: str | None = None
    label: str = ""

    @property
    def upper_bound_only(self) -> bool:
        return self.mode == "sampled"

    def to_dict(self) -> dict:
        out = {
            "u": self.u,
            "witnesses": [{"v": list(map(int, v)), "dim": int(dim)} for v, dim in self.witnesses],
            "mode": self.mode,
            "vectors_examined": self.vectors_examined,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "label": self.label,
        }
        if self.mode == "sampled":
            out.update(seed=self.seed, rng=self.rng, sample_min=self.sample_min,
                       note="sampled minimum: u is an upper bound only")
        else:
            out["note"] = "exhaustive over all projective points: u is the exact minimum"
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_budget(rep: LieRep, budget: int) -> int:
    total = fparith.projective_count(rep.d, rep.p)
    if total > budget:
        raise BudgetExceeded(
            f"{total} projective points exceeds the enumeration budget {budget}; "
            "use sampled mode or raise --budget"
        )
    return total


def _chunks(total: int, chunk: int = CHUNK):
    return [(s, min(s + chunk, total)) for s in range(0, total, chunk)]


def _run_chunks(fn, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _merge_minimum(parts):
    """Merge per-chunk ``(min, [(key, dim)...], histogram)`` in chunk order."""
    best = min(p[0] for p in parts)
    witnesses = []
    hist: dict[int, int] = {}
    for mn, wit, h in parts:
        for k, c in h.items():
            hist[k] = hist.get(k, 0) + c
        if mn == best and len(witnesses) < MAX_WITNESSES:
            witnesses.extend(wit[: MAX_WITNESSES - len(witnesses)])
    return best, witnesses, hist


def min_orbit_dim_exhaustive(rep: LieRep, budget: int = DEFAULT_BUDGET, threads: int = 1) -> OrbitReport:
    """Exact ``min{dim g.v : v != 0}`` by walking every projective point."""
    total = _check_budget(rep, budget)
    p, d = rep.p, rep.d
    ops = np.ascontiguousarray(rep.operators)
    inv = fparith.inverse_table(p)

    def work(bounds):
        start, stop = bounds
        out = np.empty(stop - start, dtype=np.int64)
        _dims_range(ops, p, inv, start, stop, out)
        mn = int(out.min())
        hits = np.flatnonzero(out == mn)[:MAX_WITNESSES] + start
        vals, counts = np.unique(out, return_counts=True)
        return mn, [(int(k), mn) for k in hits], dict(zip(vals.tolist(), counts.tolist()))

    best, wit, hist = _merge_minimum(_run_chunks(work, _chunks(total), threads))
    v = np.empty(d, dtype=np.int64)
    witnesses = []
    for k, dim in wit:
        _decode(k, d, p, v)
        witnesses.append((tuple(int(x) for x in v), dim))
    return OrbitReport(best, witnesses, "exhaustive", total, histogram=hist, label=rep.label)


def orbit_dims(rep: LieRep, vectors) -> np.ndarray:
    """``dim g.v`` for each row of ``vectors``."""
    vecs = np.ascontiguousarray(np.mod(np.asarray(vectors, dtype=np.int64).reshape(-1, rep.d), rep.p))
    out = np.empty(vecs.shape[0], dtype=np.int64)
    _dims_vectors(np.ascontiguousarray(rep.operators), rep.p, fparith.inverse_table(rep.p), vecs, out)
    return out


def min_orbit_dim_sampled(
    rep: LieRep,
    samples: int,
    seed: int,
    distinguished=(),
    threads: int = 1,
) -> OrbitReport:
    """Minimum orbit dimension over ``samples`` seeded random vectors plus ``distinguished`` ones.

    Random vectors are drawn in fixed-size blocks from a single PCG64 stream,
    so the draw sequence does not depend on ``threads``.  Zero draws are
    counted but skipped.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    p, d = rep.p, rep.d
    dist = [np.mod(np.asarray(x, dtype=np.int64).reshape(d), p) for x in distinguished]
    if any(not x.any() for x in dist):
        raise InputError("distinguished witnesses must be nonzero")
    rng = np.random.Generator(np.random.PCG64(seed))
    blocks = []
    left = samples
    while left:
        n = min(left, CHUNK)
        blocks.append(rng.integers(0, p, size=(n, d), dtype=np.int64))
        left -= n

    def work(block):
        nonzero = block.any(axis=1)
        vecs = np.ascontiguousarray(block[nonzero])
        if vecs.shape[0] == 0:
            return None
        dims = orbit_dims(rep, vecs)
        mn = int(dims.min())
        hits = np.flatnonzero(dims == mn)[:MAX_WITNESSES]
        vals, counts = np.unique(dims, return_counts=True)
        return mn, [(tuple(int(x) for x in vecs[h]), mn) for h in hits], dict(
            zip(vals.tolist(), counts.tolist())
        )

    parts = [r for r in _run_chunks(work, blocks, threads) if r is not None]
    sample_min = None
    hist: dict[int, int] = {}
    sample_wit: list = []
    if parts:
        sample_min, sample_wit, hist = _merge_minimum(parts)
    dist_dims = orbit_dims(rep, np.array(dist)) if dist else np.array([], dtype=np.int64)
    candidates = [int(x) for x in dist_dims] + ([sample_min] if sample_min is not None else [])
    if not candidates:
        raise InputError("every sampled vector was zero and no distinguished vector was given")
    u = min(candidates)
    witnesses = [(tuple(int(x) for x in v), int(dim)) for v, dim in zip(dist, dist_dims) if dim == u]
    if sample_min == u:
        witnesses += sample_wit[: MAX_WITNESSES - len(witnesses)]
    return OrbitReport(
        u,
        witnesses[:MAX_WITNESSES],
        "sampled",
        samples + len(dist),
        seed=seed,
        histogram=hist,
        sample_min=sample_min,
        rng=RNG_ALGORITHM,
        label=rep.label,
    )


@dataclass
class SubspaceFamily:
    """The distinct orbit subspaces ``g.v`` with the number of projective points giving each."""

    entries: list
    min_dim: int
    label: str = ""

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "min_dim": self.min_dim,
            "count": len(self.entries),
            "entries": [{"subspace": s.to_dict(), "multiplicity": m} for s, m in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def variety_family(rep: LieRep, budget: int = DEFAULT_BUDGET, threads: int = 1) -> SubspaceFamily:
    """All orbit subspaces over the projective points, deduplicated with multiplicities."""
    total = _check_budget(rep, budget)
    p, d = rep.p, rep.d
    ops = np.ascontiguousarray(rep.operators)
    inv = fparith.inverse_table(p)

    def work(bounds):
        start, stop = bounds
        out = np.empty((stop - start, d * d), dtype=np.int64)
        _rref_range(ops, p, inv, start, stop, out)
        rows, counts = np.unique(out, axis=0, return_counts=True)
        return rows, counts

    merged: dict[bytes, list] = {}
    for rows, counts in _run_chunks(work, _chunks(total), threads):
        for row, c in zip(rows, counts):
            key = row.tobytes()
            if key in merged:
                merged[key][1] += int(c)
            else:
                merged[key] = [row, int(c)]
    entries = []
    for row, c in merged.values():
        M = row.reshape(d, d)
        basis = tuple(tuple(int(x) for x in r) for r in M if r.any())
        entries.append((Subspace(p, d, basis), c))
    entries.sort(key=lambda e: (e[0].dim, e[0].basis))
    fam = SubspaceFamily(entries, min(s.dim for s, _ in entries), rep.label)
    if fam.total != total:
        raise InvariantViolation(f"multiplicities sum to {fam.total}, expected {total}")
    return fam


# -- dual action and the derivation-hypothesis equivalence --------------------


def dual_orbit_span(rep: LieRep, W: Subspace) -> Subspace:
    """``g.W`` in ``V*`` under ``(x.f)(v) = -f(x.v)``; functionals are row vectors."""
    if W.d != rep.d or W.p != rep.p:
        raise InputError("subspace does not live in the dual of this representation")
    if W.dim == 0:
        return fparith.zero_subspace(rep.d, rep.p)
    F = W.matrix()
    rows = (-(F @ rep.operators)) % rep.p  # (m, dimW, d)
    return fparith.span(rows.reshape(-1, rep.d), rep.d, rep.p)


def trapped_vectors(rep: LieRep, U: Subspace) -> np.ndarray:
    """Projective representatives ``v`` with ``g.v`` inside ``U``, by direct enumeration of V."""
    if U.d != rep.d or U.p != rep.p:
        raise InputError("subspace dimension/modulus does not match the representation")
    pts = fparith.projective_points(rep.d, rep.p)
    images = np.einsum("iab,nb->nia", rep.operators, pts) % rep.p  # (N, m, d)
    ok = np.array(
        [all(fparith.contains(U, w) for w in imgs) for imgs in images], dtype=bool
    )
    return pts[ok]


@dataclass(frozen=True)
class DerHypResult:
    gW_full: bool
    exists_trapped_v: bool


def derhyp_equivalence(rep: LieRep, U: Subspace, budget: int = DEFAULT_BUDGET) -> DerHypResult:
    """Compare ``g.(U^perp) = V*`` with "no nonzero ``v`` has ``g.v`` inside ``U``".

    The two sides are computed independently (a rank computation in ``V*`` and an
    enumeration of ``V``) and must disagree in truth value.
    """
    _check_budget(rep, budget)
    W = fparith.annihilator(U)
    full = dual_orbit_span(rep, W).dim == rep.d
    trapped = len(trapped_vectors(rep, U)) > 0
    if full == trapped:
        raise InvariantViolation(
            f"gW_full={full} but exists_trapped_v={trapped} for U={U!r}"
        )
    return DerHypResult(full, trapped)
