"""Graded polynomial rings ``F_p[v_1..v_d]``, deformed derivations and homogeneous ideals.

``B1`` is the subring generated by the p-th powers ``v_i^p``; monomials lie
in it exactly when every exponent is divisible by ``p``.

Ideal membership works one degree at a time: a homogeneous ``f`` of degree
``e`` lies in a homogeneous ideal iff it is in the span of ``m * g`` for
generators ``g`` and monomials ``m`` of degree ``e - deg g``.  Those spans are
reduced to echelon form with sparse row operations keyed by leading monomial.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb
from typing import Callable, Iterable

import numpy as np

from liebound import fparith
from liebound.errors import BudgetExceeded, InputError

Monomial = tuple[int, ...]

DEFAULT_PIECE_BUDGET = 100_000
DEFAULT_WINDOW = (1, 4)


class GradedPoly:
    """Sparse polynomial over F_p in ``nvars`` variables.

    Coefficients are stored as a dict ``exponent tuple -> residue``; zero
    coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "p", "terms")

    def __init__(self, nvars: int, p: int, terms: dict | None = None):
        self.nvars = nvars
        self.p = p
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise InputError(f"bad exponent vector {mono} for {nvars} variables")
            c = int(c) % p
            if c:
                clean[mono] = (clean.get(mono, 0) + c) % p
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    # construction helpers
    @classmethod
    def zero(cls, nvars: int, p: int) -> "GradedPoly":
        return cls(nvars, p)

    @classmethod
    def constant(cls, c: int, nvars: int, p: int) -> "GradedPoly":
        return cls(nvars, p, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int, p: int, power: int = 1) -> "GradedPoly":
        """``v_{i+1}^power`` (``i`` is 0-based)."""
        e = [0] * nvars
        e[i] = power
        return cls(nvars, p, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Monomial, p: int, c: int = 1) -> "GradedPoly":
        return cls(len(exps), p, {tuple(exps): c})

    def _new(self, terms: dict) -> "GradedPoly":
        out = GradedPoly.__new__(GradedPoly)
        out.nvars, out.p, out.terms = self.nvars, self.p, terms
        return out

    def _check(self, other: "GradedPoly") -> None:
        if not isinstance(other, GradedPoly) or other.nvars != self.nvars or other.p != self.p:
            raise InputError("polynomials live in different rings")

    # arithmetic
    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        self._check(other)
        p = self.p
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = (t.get(m, 0) + c) % p
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return self._new(t)

    def __neg__(self) -> "GradedPoly":
        return self._new({m: (-c) % self.p for m, c in self.terms.items()})

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        return self + (-other)

    def scale(self, c: int) -> "GradedPoly":
        c %= self.p
        if not c:
            return self._new({})
        return self._new({m: (a * c) % self.p for m, a in self.terms.items()})

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        p = self.p
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = (t.get(m, 0) + c1 * c2) % p
        return self._new({m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "GradedPoly":
        result = GradedPoly.constant(1, self.nvars, self.p)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedPoly) and (self.nvars, self.p, self.terms) == (
            other.nvars, other.p, other.terms)

    def __hash__(self):
        return hash((self.nvars, self.p, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # grading
    @property
    def degrees(self) -> set[int]:
        return {sum(m) for m in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    @property
    def degree(self) -> int | None:
        """Total degree of a homogeneous nonzero polynomial; ``None`` for zero."""
        degs = self.degrees
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError("polynomial is not homogeneous")
        return next(iter(degs))

    def homogeneous_part(self, e: int) -> "GradedPoly":
        return self._new({m: c for m, c in self.terms.items() if sum(m) == e})

    def partial(self, i: int) -> "GradedPoly":
        """``d/dv_{i+1}``."""
        p = self.p
        t = {}
        for m, c in self.terms.items():
            if m[i] == 0:
                continue
            nc = (c * m[i]) % p
            if nc:
                mm = list(m)
                mm[i] -= 1
                t[tuple(mm)] = nc
        return self._new(t)

    def frobenius(self, r: int = 1) -> "GradedPoly":
        """``f^(p^r)``; coefficients are in F_p so this just scales exponents."""
        q = self.p**r
        return self._new({tuple(e * q for e in m): c for m, c in self.terms.items()})

    def in_b1(self) -> bool:
        return all(e % self.p == 0 for m in self.terms for e in m)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in graded-lex order, largest first."""
        return sorted(self.terms.items(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"GradedPoly({format_poly(self)!r}, nvars={self.nvars}, p={self.p})"


# -- text grammar --------------------------------------------------------------

_FACTOR = re.compile(r"^v(\d+)(?:\^(\d+))?$")


def format_poly(f: GradedPoly) -> str:
    """``c*v1^e1*...`` terms joined by ``+``, graded-lex descending; ``0`` for zero."""
    if not f.terms:
        return "0"
    parts = []
    for m, c in f.sorted_terms():
        factors = [str(c)]
        for i, e in enumerate(m):
            if e == 1:
                factors.append(f"v{i + 1}")
            elif e > 1:
                factors.append(f"v{i + 1}^{e}")
        parts.append("*".join(factors))
    return "+".join(parts)


def parse_poly(text: str, nvars: int, p: int) -> GradedPoly:
    """Inverse of :func:`format_poly`; also accepts omitted ``1*`` coefficients."""
    text = text.replace(" ", "")
    if not text:
        raise InputError("empty polynomial")
    terms: dict = {}
    for term in text.split("+"):
        if not term:
            raise InputError(f"empty term in {text!r}")
        coeff = 1
        exps = [0] * nvars
        for k, factor in enumerate(term.split("*")):
            if factor.isdigit():
                if k != 0:
                    raise InputError(f"coefficient must lead the term: {term!r}")
                coeff = int(factor)
                if coeff >= p:
                    raise InputError(f"coefficient {coeff} not in [0, {p})")
                continue
            mt = _FACTOR.match(factor)
            if not mt:
                raise InputError(f"cannot parse factor {factor!r}")
            i = int(mt.group(1))
            if not 1 <= i <= nvars:
                raise InputError(f"variable v{i} out of range 1..{nvars}")
            exps[i - 1] += int(mt.group(2) or 1)
        m = tuple(exps)
        terms[m] = (terms.get(m, 0) + coeff) % p
    return GradedPoly(nvars, p, terms)


# -- deformed derivations --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeformedDerivation:
    """The derivation of ``Sym(V)`` sending ``v`` to ``phi(v)^(p^r)``.

    ``phi`` acts on the variables by columns: ``phi(v_i) = sum_j phi[j, i] v_j``.
    """

    phi: np.ndarray
    r: int
    p: int

    def __post_init__(self):
        phi = fparith.as_fp(self.phi, self.p)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise InputError("phi must be a square matrix")
        if self.r < 0:
            raise InputError("r must be >= 0")
        object.__setattr__(self, "phi", phi)

    @property
    def nvars(self) -> int:
        return self.phi.shape[0]

    def image_of_variable(self, i: int) -> GradedPoly:
        """``phi(v_i)^(p^r)``, expanded using Frobenius (coefficients are already in F_p)."""
        q = self.p**self.r
        d = self.nvars
        terms = {}
        for j in range(d):
            c = int(self.phi[j, i])
            if c:
                e = [0] * d
                e[j] = q
                terms[tuple(e)] = c
        return GradedPoly(d, self.p, terms)


def apply_deformed(D: DeformedDerivation, f: GradedPoly) -> GradedPoly:
    """``D(f) = sum_i (df/dv_i) * phi(v_i)^(p^r)``."""
    if f.nvars != D.nvars or f.p != D.p:
        raise InputError("derivation and polynomial live in different rings")
    out = GradedPoly.zero(f.nvars, f.p)
    for i in range(f.nvars):
        df = f.partial(i)
        if df:
            out = out + df * D.image_of_variable(i)
    return out


# -- homogeneous ideals ------------------------------------------------------------


def monomials_of_degree(nvars: int, e: int) -> list[Monomial]:
    if e < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(nvars), e):
        m = [0] * nvars
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return out


def piece_dimension(nvars: int, e: int) -> int:
    return comb(e + nvars - 1, nvars - 1) if e >= 0 else 0


class _Echelon:
    """Sparse row echelon basis over F_p; rows are dicts keyed by monomial.

    ``key`` orders monomials; each stored row has a distinct leading (maximal)
    monomial and coefficient 1 there.
    """

    def __init__(self, p: int, key: Callable = lambda m: m):
        self.p = p
        self.key = key
        self.rows: dict[Monomial, dict] = {}

    def _lead(self, row: dict) -> Monomial:
        return max(row, key=self.key)

    def reduce(self, row: dict) -> dict:
        p = self.p
        row = dict(row)
        while row:
            lm = self._lead(row)
            piv = self.rows.get(lm)
            if piv is None:
                return row
            c = row[lm]
            for m, a in piv.items():
                s = (row.get(m, 0) - c * a) % p
                if s:
                    row[m] = s
                else:
                    row.pop(m, None)
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        lm = self._lead(row)
        inv = pow(row[lm], self.p - 2, self.p)
        self.rows[lm] = {m: (c * inv) % self.p for m, c in row.items()}
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)

    @property
    def dim(self) -> int:
        return len(self.rows)


@dataclass
class HomIdeal:
    """Ideal generated by nonzero homogeneous polynomials."""

    generators: list
    nvars: int = field(init=False)
    p: int = field(init=False)
    budget: int = DEFAULT_PIECE_BUDGET

    def __post_init__(self):
        gens = list(self.generators)
        if not gens:
            raise InputError("an ideal needs at least one generator (use the zero polynomial's absence)")
        first = gens[0]
        for g in gens:
            first._check(g)
            if not g:
                raise InputError("generators must be nonzero")
            if not g.is_homogeneous:
                raise InputError(f"generator {g} is not homogeneous")
        self.generators = gens
        self.nvars = first.nvars
        self.p = first.p

    @classmethod
    def parse(cls, texts: Iterable[str], nvars: int, p: int, **kw) -> "HomIdeal":
        return cls([parse_poly(t, nvars, p) for t in texts], **kw)

    @classmethod
    def from_json(cls, text: str, nvars: int, p: int, **kw) -> "HomIdeal":
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        if not isinstance(items, list) or not all(isinstance(t, str) for t in items):
            raise InputError("an ideal is a JSON list of polynomial strings")
        return cls.parse(items, nvars, p, **kw)

    def to_json(self) -> str:
        return json.dumps([format_poly(g) for g in self.generators])

    @property
    def is_monomial(self) -> bool:
        return all(len(g.terms) == 1 for g in self.generators)

    def _check_piece(self, e: int) -> None:
        size = piece_dimension(self.nvars, e)
        if size > self.budget:
            raise BudgetExceeded(
                f"degree-{e} piece has {size} monomials, over the budget of {self.budget}"
            )

    def piece(self, e: int, key: Callable = lambda m: m) -> _Echelon:
        """Echelon basis of the degree-``e`` part of the ideal."""
        self._check_piece(e)
        ech = _Echelon(self.p, key)
        for g in self.generators:
            dg = g.degree
            for m in monomials_of_degree(self.nvars, e - dg):
                ech.add({tuple(a + b for a, b in zip(m, gm)): c for gm, c in g.terms.items()})
        return ech


def hom_membership(J: HomIdeal, f: GradedPoly) -> bool:
    """Exact test of ``f in J`` for homogeneous ``f``."""
    J.generators[0]._check(f)
    if not f:
        return True
    e = f.degree
    if J.is_monomial:
        gens = [next(iter(g.terms)) for g in J.generators]
        return all(any(all(a >= b for a, b in zip(m, g)) for g in gens) for m in f.terms)
    return J.piece(e).contains(f.terms)


@dataclass(frozen=True)
class ClosureReport:
    result: bool
    window: tuple[int, int]
    failures: tuple = ()
    note: str = "windowed check over r in [r0, r1]; approximates the 'for all large r' condition"


def s_closure_test(J: HomIdeal, Y: GradedPoly, reps, r_window=DEFAULT_WINDOW) -> ClosureReport:
    """Whether ``phi^[p^r](Y)`` lies in ``J`` for every ``phi`` in ``reps`` and ``r`` in the window."""
    r0, r1 = r_window
    if r0 < 1 or r1 < r0:
        raise InputError(f"bad r window {r_window}")
    J.generators[0]._check(Y)
    if not Y.is_homogeneous:
        raise InputError("Y must be homogeneous")
    failures = []
    for k, phi in enumerate(reps):
        for r in range(r0, r1 + 1):
            image = apply_deformed(DeformedDerivation(phi, r, J.p), Y)
            if not hom_membership(J, image):
                failures.append((k, r))
    return ClosureReport(not failures, (r0, r1), tuple(failures))


def d_stability_check(J: HomIdeal) -> bool:
    """``D(J) in J`` for all derivations, i.e. every partial of every generator lies in ``J``."""
    return all(hom_membership(J, g.partial(i)) for g in J.generators for i in range(J.nvars))


def b1_decompose(f: GradedPoly) -> dict[Monomial, GradedPoly]:
    """Split ``f = sum_alpha b_alpha v^alpha`` with ``alpha in [0, p-1]^d`` and ``b_alpha in B1``."""
    p = f.p
    parts: dict[Monomial, dict] = {}
    for m, c in f.terms.items():
        alpha = tuple(e % p for e in m)
        parts.setdefault(alpha, {})[tuple(e - a for e, a in zip(m, alpha))] = c
    return {a: GradedPoly(f.nvars, p, t) for a, t in sorted(parts.items())}


def b1_recombine(parts: dict[Monomial, GradedPoly], nvars: int, p: int) -> GradedPoly:
    out = GradedPoly.zero(nvars, p)
    for alpha, b in parts.items():
        out = out + b * GradedPoly.monomial(alpha, p)
    return out


def _b1_first(p: int):
    # elimination order: monomials outside B1 outrank every B1 monomial
    return lambda m: (any(e % p for e in m), m)


@dataclass(frozen=True)
class ControlReport:
    result: bool
    degree_bound: int
    dims: tuple = ()
    first_failure: int | None = None
    note: str = "truncated check: graded pieces compared up to degree_bound only"


def control_check(J: HomIdeal, degree_bound: int) -> ControlReport:
    """Compare ``J_e`` with ``((J cap B1) B)_e`` for every degree ``e <= degree_bound``."""
    maxdeg = max(g.degree for g in J.generators)
    if degree_bound < maxdeg:
        raise InputError(f"degree_bound must be >= max generator degree {maxdeg}")
    p, d = J.p, J.nvars
    key = _b1_first(p)
    b1_parts: dict[int, list[dict]] = {}
    dims = []
    first_failure = None
    for e in range(degree_bound + 1):
        ech = J.piece(e, key)
        if e % p == 0:
            # rows led by a B1 monomial are supported on B1 monomials only
            b1_rows = [row for lm, row in ech.rows.items() if not any(x % p for x in lm)]
            if b1_rows:
                b1_parts[e] = b1_rows
        gen = _Echelon(p)
        for e1, rows in b1_parts.items():
            for mono in monomials_of_degree(d, e - e1):
                for row in rows:
                    gen.add({tuple(a + b for a, b in zip(mono, m)): c for m, c in row.items()})
        dims.append((e, ech.dim, gen.dim))
        if ech.dim != gen.dim and first_failure is None:
            first_failure = e
    return ControlReport(first_failure is None, degree_bound, tuple(dims), first_failure)
