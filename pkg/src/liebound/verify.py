"""Named invariant suites run by ``liebound verify``.

Each suite returns a list of :class:`Check` records; a suite passes when every
check does.  The reference table below is typed in by
hand, and is deliberately not derived from any code in this package.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from liebound import chevalley, fparith, gradedsym, orbits, rootsys
from liebound.gradedsym import DeformedDerivation, GradedPoly, HomIdeal

# (dim G, u) per family as functions of the rank
REFERENCE_TABLE = {
    "A": (lambda n: n * n + 2 * n, lambda n: 2 * n),
    "B": (lambda n: 2 * n * n + n, lambda n: 4 * n - 4),
    "C": (lambda n: 2 * n * n + n, lambda n: 2 * n),
    "D": (lambda n: 2 * n * n - n, lambda n: 4 * n - 6),
    "E": (lambda n: {6: 78, 7: 133, 8: 248}[n], lambda n: {6: 22, 7: 34, 8: 58}[n]),
    "F": (lambda n: 52, lambda n: 16),
    "G": (lambda n: 14, lambda n: 6),
}

JACOBI_FAST = (
    [("A", n) for n in range(1, 5)]
    + [("B", n) for n in range(2, 5)]
    + [("C", n) for n in range(2, 5)]
    + [("D", n) for n in range(3, 5)]
    + [("F", 4), ("G", 2)]
)
JACOBI_SLOW = [("E", 6), ("E", 7), ("E", 8)]
ADTHETA_PRIMES = (5, 7, 11)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def table_row(family: str, rank: int) -> dict:
    """One row of the reproduced table, with the identity checks folded in."""
    rs = rootsys.build_root_system(family, rank)
    w = rootsys.weyl_data(rs)  # raises on u != 2h-2 or |S|+2 != u
    return {
        "system": rs.name,
        "dim_G": rootsys.dim_g(rs),
        "u": w.u,
        "dual_coxeter": w.dual_coxeter,
        "special_roots": len(w.special_roots),
    }


def suite_table(systems=rootsys.TABLE_SYSTEMS) -> list[Check]:
    out = []
    for fam, n in systems:
        row = table_row(fam, n)
        dim_ref, u_ref = (f(n) for f in REFERENCE_TABLE[fam])
        ok = (
            row["dim_G"] == dim_ref
            and row["u"] == u_ref
            and row["u"] == 2 * row["dual_coxeter"] - 2
            and row["u"] == row["special_roots"] + 2
        )
        out.append(Check(f"table {row['system']}", ok,
                         f"dim={row['dim_G']}/{dim_ref} u={row['u']}/{u_ref} "
                         f"h={row['dual_coxeter']} |S|={row['special_roots']}"))
    return out


def structure_constant_magnitudes(alg: chevalley.ChevalleyAlgebra) -> set[int]:
    return {
        abs(alg.N(r, s))
        for r in alg.rs.roots
        for s in alg.rs.roots
        if alg.rs.is_root(rootsys.add(r, s))
    }


def suite_jacobi(slow: bool = False) -> list[Check]:
    out = []
    systems = JACOBI_FAST + (JACOBI_SLOW if slow else [])
    for fam, n in systems:
        rs = rootsys.build_root_system(fam, n)
        alg = chevalley.structure_constants(rs)
        bad, first = chevalley.jacobi_check(alg)
        out.append(Check(f"jacobi {rs.name}", bad == 0,
                         f"{bad} failing triples" + (f", first {first}" if first else "")))
        out.append(Check(f"antisymmetry {rs.name}", chevalley.antisymmetry_check(alg)))
        mags = structure_constant_magnitudes(alg)
        laced = len(set(rs.symmetrizer)) == 1
        ok = mags <= {1, 2, 3} and (3 not in mags or fam == "G") and (max(mags, default=1) == 1) == laced
        if rs.rank == 1:
            ok = not mags
        out.append(Check(f"N magnitudes {rs.name}", ok, f"values {sorted(mags)}"))
    return out


def suite_adtheta(primes=ADTHETA_PRIMES, systems=rootsys.TABLE_SYSTEMS) -> list[Check]:
    out = []
    for fam, n in systems:
        rs = rootsys.build_root_system(fam, n)
        alg = chevalley.structure_constants(rs)
        u = rootsys.u_invariant(rs)
        theta = alg.basis_vector(alg.e(rootsys.highest_root(rs)))
        for p in primes:
            if not rootsys.is_nice_prime(rs, p):
                continue
            r = fparith.rank(chevalley.adjoint_matrix(alg, theta, p), p)
            out.append(Check(f"rank ad(e_theta) {rs.name} p={p}", r == u, f"rank={r} u={u}"))
    return out


def random_operator_sets(count: int, p: int, max_d: int, seed: int):
    """Seeded random ``LieRep`` values with ``d`` cycling through ``1..max_d``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    reps = []
    for k in range(count):
        d = 1 + k % max_d
        m = int(rng.integers(1, 4))
        ops = rng.integers(0, p, size=(m, d, d))
        # thin out entries so that degenerate (trapping) actions show up too
        ops *= rng.random((m, d, d)) < 0.5
        reps.append(orbits.LieRep(p, d, ops, f"random:{k}"))
    return reps


def suite_derhyp(count: int = 100, p: int = 3, max_d: int = 3, seed: int = 0) -> list[Check]:
    subspaces = {d: fparith.all_subspaces(d, p) for d in range(1, max_d + 1)}
    total = agree = trapped = 0
    failures = []
    for rep in random_operator_sets(count, p, max_d, seed):
        for U in subspaces[rep.d]:
            W = fparith.annihilator(U)
            full = orbits.dual_orbit_span(rep, W).dim == rep.d
            has = len(orbits.trapped_vectors(rep, U)) > 0
            total += 1
            trapped += has
            if full != has:
                agree += 1
            elif len(failures) < 5:
                failures.append((rep.label, U.basis))
    return [Check("derhyp equivalence", agree == total,
                  f"{agree}/{total} cases agree ({trapped} with a trapped v)"
                  + (f"; failures {failures}" if failures else ""))]


def random_poly(rng, nvars: int, p: int, max_deg: int, nterms: int, degree: int | None = None) -> GradedPoly:
    """Seeded random polynomial; homogeneous of ``degree`` when given."""
    terms = {}
    for _ in range(nterms):
        if degree is None:
            e = int(rng.integers(0, max_deg + 1))
        else:
            e = degree
        cuts = np.sort(rng.integers(0, e + 1, size=nvars - 1))
        exps = np.diff(np.concatenate(([0], cuts, [e])))
        terms[tuple(int(x) for x in exps)] = int(rng.integers(1, p))
    return GradedPoly(nvars, p, terms)


def _random_derivation(rng, nvars: int, p: int) -> DeformedDerivation:
    return DeformedDerivation(rng.integers(0, p, size=(nvars, nvars)), int(rng.integers(0, 3)), p)


def membership_oracle_piece(J: HomIdeal, e: int) -> tuple[set, list]:
    """All elements of ``J`` in degree ``e``, by enumerating every coefficient choice.

    Returns the set of reachable coefficient tuples (indexed like the returned
    monomial list).  Only feasible for tiny ``p``, ``nvars`` and ``e``.
    """
    p, d = J.p, J.nvars
    products = []
    for g in J.generators:
        for m in gradedsym.monomials_of_degree(d, e - g.degree):
            products.append(g * GradedPoly.monomial(m, p))
    monos = gradedsym.monomials_of_degree(d, e)
    index = {m: i for i, m in enumerate(monos)}
    vecs = np.zeros((len(products), len(monos)), dtype=np.int64)
    for k, f in enumerate(products):
        for m, c in f.terms.items():
            vecs[k, index[m]] = c
    combos = np.array(list(itertools.product(range(p), repeat=len(products))), dtype=np.int64)
    if not products:
        return {tuple([0] * len(monos))}, monos
    reached = {tuple(int(x) for x in row) for row in np.unique((combos @ vecs) % p, axis=0)}
    return reached, monos


def suite_graded(seed: int = 0, leibniz_pairs: int = 1000, frob: int = 200, decomp: int = 200) -> list[Check]:
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []

    ok = True
    for _ in range(leibniz_pairs):
        d = int(rng.integers(1, 4))
        p = int(rng.choice([3, 5, 7]))
        D = _random_derivation(rng, d, p)
        f = random_poly(rng, d, p, 4, 4)
        g = random_poly(rng, d, p, 4, 4)
        lhs = gradedsym.apply_deformed(D, f * g)
        rhs = f * gradedsym.apply_deformed(D, g) + g * gradedsym.apply_deformed(D, f)
        ok &= lhs == rhs
    out.append(Check("Leibniz rule", ok, f"{leibniz_pairs} random pairs"))

    ok = True
    for _ in range(frob):
        d = int(rng.integers(1, 4))
        p = int(rng.choice([3, 5]))
        D = _random_derivation(rng, d, p)
        f = random_poly(rng, d, p, 3, 3)
        ok &= not gradedsym.apply_deformed(D, f**p)
    out.append(Check("D(f^p) = 0", ok, f"{frob} random f"))

    ok = True
    for _ in range(frob):
        d = int(rng.integers(1, 4))
        p = int(rng.choice([3, 5]))
        D = _random_derivation(rng, d, p)
        e = int(rng.integers(0, 6))
        f = random_poly(rng, d, p, e, 4, degree=e)
        img = gradedsym.apply_deformed(D, f)
        ok &= (not img) or (img.is_homogeneous and img.degree == e - 1 + p**D.r)
    out.append(Check("degree law", ok, f"{frob} random homogeneous f"))

    ok = True
    for _ in range(decomp):
        d = int(rng.integers(1, 4))
        p = int(rng.choice([3, 5, 7]))
        f = random_poly(rng, d, p, 3 * p, 6)
        parts = gradedsym.b1_decompose(f)
        ok &= all(b.in_b1() and max(a) < p for a, b in parts.items())
        ok &= gradedsym.b1_recombine(parts, d, p) == f
    out.append(Check("B1 decomposition round trip", ok, f"{decomp} random f"))

    out.append(_membership_vs_oracle(rng))
    out.extend(_control_examples())
    return out


def _membership_vs_oracle(rng, instances: int = 12) -> Check:
    p, d = 3, 2
    compared = mismatched = 0
    for _ in range(instances):
        ngens = int(rng.integers(1, 3))
        gens = []
        while len(gens) < ngens:
            g = random_poly(rng, d, p, 0, int(rng.integers(1, 3)), degree=int(rng.integers(1, 3)))
            if g:
                gens.append(g)
        J = HomIdeal(gens)
        for e in range(0, 5):
            reached, monos = membership_oracle_piece(J, e)
            for coeffs in itertools.product(range(p), repeat=len(monos)):
                f = GradedPoly(d, p, dict(zip(monos, coeffs)))
                compared += 1
                if gradedsym.hom_membership(J, f) != (coeffs in reached):
                    mismatched += 1
    return Check("hom_membership vs exhaustive oracle (F_3, d=2, deg<=4)", mismatched == 0,
                 f"{compared} polynomials compared, {mismatched} mismatches")


def _control_examples() -> list[Check]:
    P = gradedsym.HomIdeal.parse
    cases = [
        ("(v1^p), bound 2p", P(["v1^5"], 2, 5), 10, True),
        ("(v1), bound 10", P(["v1"], 2, 5), 10, False),
        ("(v1^p, v2^p), bound 2p", P(["v1^5", "v2^5"], 2, 5), 10, True),
        ("(v1^3) over F_3, bound 6", P(["v1^3"], 2, 3), 6, True),
    ]
    out = []
    for name, J, bound, expected in cases:
        got = gradedsym.control_check(J, bound).result
        out.append(Check(f"control_check {name}", got == expected, f"got {got}, expected {expected}"))
    return out


SUITES = {
    "table": lambda **kw: suite_table(),
    "jacobi": lambda slow=False, **kw: suite_jacobi(slow),
    "adtheta": lambda **kw: suite_adtheta(),
    "derhyp": lambda **kw: suite_derhyp(),
    "graded": lambda **kw: suite_graded(),
}


def run_suite(name: str, slow: bool = False) -> tuple[list[Check], float]:
    names = list(SUITES) if name == "all" else [name]
    t0 = time.perf_counter()
    checks = []
    for n in names:
        checks.extend(SUITES[n](slow=slow))
    return checks, time.perf_counter() - t0
