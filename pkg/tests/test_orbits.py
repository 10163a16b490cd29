import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liebound import chevalley as C
from liebound import fparith as F
from liebound import orbits as O
from liebound import rootsys as R
from liebound.errors import BudgetExceeded, InputError


def adjoint(sel, p):
    return C.adjoint_rep(C.structure_constants(R.parse_selector(sel)), p)


def brute_min(rep):
    """min over every nonzero vector (not just projective representatives)."""
    best = None
    for v in itertools.product(range(rep.p), repeat=rep.d):
        if any(v):
            r = F.rank(rep.operators @ np.array(v) % rep.p, rep.p)
            best = r if best is None else min(best, r)
    return best


def random_rep(seed, p=3, dmax=3, mmax=3):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, dmax + 1))
    m = int(rng.integers(1, mmax + 1))
    return O.LieRep(p, d, rng.integers(0, p, size=(m, d, d)))


def test_orbit_subspace_examples():
    gl2 = O.gl_natural_rep(2, 5)
    assert O.orbit_subspace(gl2, (0, 0)).dim == 0
    for v in [(1, 0), (3, 4), (0, 2)]:
        assert O.orbit_subspace(gl2, v) == F.full_space(2, 5)
    sl2 = adjoint("A:1", 5)
    assert O.orbit_subspace(sl2, (1, 0, 0)).basis == ((1, 0, 0), (0, 1, 0))


@given(st.integers(0, 10_000), st.integers(1, 2))
@settings(max_examples=50, deadline=None)
def test_orbit_scalar_invariant(seed, c):
    rep = random_rep(seed)
    v = np.random.default_rng(seed + 1).integers(0, 3, size=rep.d)
    assert O.orbit_subspace(rep, v) == O.orbit_subspace(rep, c * v)


@pytest.mark.parametrize("seed", range(20))
def test_exhaustive_matches_brute(seed):
    rep = random_rep(seed, p=3, dmax=4)
    rpt = O.min_orbit_dim_exhaustive(rep)
    assert rpt.u == brute_min(rep)
    assert rpt.vectors_examined == F.projective_count(rep.d, 3)
    assert sum(rpt.histogram.values()) == rpt.vectors_examined
    for v, dim in rpt.witnesses:
        assert O.orbit_subspace(rep, v).dim == dim == rpt.u


@pytest.mark.parametrize("sel,u", [("A:1", 2), ("A:2", 4)])
def test_adjoint_small(sel, u):
    rpt = O.min_orbit_dim_exhaustive(adjoint(sel, 5))
    assert rpt.u == u == R.u_invariant(R.parse_selector(sel))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gl_natural(n):
    rpt = O.min_orbit_dim_exhaustive(O.gl_natural_rep(n, 5))
    assert rpt.u == n
    assert rpt.histogram == {n: F.projective_count(n, 5)}


def test_gl1_operator():
    assert O.gl_natural_rep(1, 5).operators.tolist() == [[[1]]]
    assert O.gl_natural_rep(2, 5).m == 4


def test_sl2_natural():
    assert O.min_orbit_dim_exhaustive(O.sl_natural_rep(2, 5)).u == 2
    assert O.min_orbit_dim_exhaustive(O.sl_natural_rep(1, 5)).u == 0


def test_zero_rep():
    rep = O.zero_rep(3, 5)
    assert O.min_orbit_dim_exhaustive(rep).u == 0
    rpt = O.min_orbit_dim_sampled(rep, 100, seed=1)
    assert rpt.u == 0 and rpt.histogram == {0: sum(rpt.histogram.values())}


def test_exhaustive_thread_identity():
    rep = adjoint("A:2", 5)  # 97656 points, more than one chunk
    one = O.min_orbit_dim_exhaustive(rep, threads=1).to_dict()
    four = O.min_orbit_dim_exhaustive(rep, threads=4).to_dict()
    assert one == four


def test_sampled_consistent_with_exhaustive():
    rep = adjoint("A:2", 5)
    ex = O.min_orbit_dim_exhaustive(rep)
    sm = O.min_orbit_dim_sampled(rep, 20_000, seed=3)
    assert sm.u >= ex.u
    assert set(sm.histogram) <= set(ex.histogram)
    assert sm.upper_bound_only and not ex.upper_bound_only


def test_sampled_deterministic_and_thread_free():
    rep = adjoint("B:2", 5)
    a = O.min_orbit_dim_sampled(rep, 150_000, seed=7, threads=1).to_dict()
    b = O.min_orbit_dim_sampled(rep, 150_000, seed=7, threads=3).to_dict()
    c = O.min_orbit_dim_sampled(rep, 150_000, seed=8).to_dict()
    assert a == b
    assert a["histogram"] != c["histogram"]
    assert a["rng"] == O.RNG_ALGORITHM and a["seed"] == 7


def test_sampled_single_sample():
    rep = adjoint("G:2", 5)
    a = O.min_orbit_dim_sampled(rep, 1, seed=11)
    assert a.to_dict() == O.min_orbit_dim_sampled(rep, 1, seed=11).to_dict()
    assert a.vectors_examined == 1


def test_sampled_distinguished_witness():
    alg = C.structure_constants(R.parse_selector("G:2"))
    rep = C.adjoint_rep(alg, 5)
    e_theta = alg.basis_vector(alg.e(R.highest_root(alg.rs)))
    rpt = O.min_orbit_dim_sampled(rep, 5000, seed=42, distinguished=[e_theta])
    assert rpt.u == 6
    assert rpt.witnesses[0] == (tuple(int(x) for x in e_theta), 6)
    with pytest.raises(InputError):
        O.min_orbit_dim_sampled(rep, 10, seed=0, distinguished=[np.zeros(14)])
    with pytest.raises(InputError):
        O.min_orbit_dim_sampled(rep, 0, seed=0)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        O.min_orbit_dim_exhaustive(adjoint("B:2", 5), budget=1000)
    with pytest.raises(BudgetExceeded):
        O.variety_family(O.gl_natural_rep(3, 5), budget=10)


def test_variety_examples():
    fam = O.variety_family(O.gl_natural_rep(2, 3))
    assert [(s, m) for s, m in fam.entries] == [(F.full_space(2, 3), 4)]
    assert fam.min_dim == 2
    fam = O.variety_family(O.zero_rep(2, 3))
    assert [(s.dim, m) for s, m in fam.entries] == [(0, 4)]
    assert O.variety_family(adjoint("A:1", 5)).min_dim == 2


@pytest.mark.parametrize("seed", range(15))
def test_variety_matches_direct(seed):
    rep = random_rep(seed, dmax=3)
    fam = O.variety_family(rep)
    direct = {}
    for v in F.projective_points(rep.d, rep.p):
        s = O.orbit_subspace(rep, v)
        direct[s] = direct.get(s, 0) + 1
    assert dict(fam.entries) == direct
    assert fam.total == F.projective_count(rep.d, rep.p)
    assert fam.min_dim == O.min_orbit_dim_exhaustive(rep).u


def test_derhyp_examples():
    gl = O.gl_natural_rep(2, 3)
    res = O.derhyp_equivalence(gl, F.zero_subspace(2, 3))
    assert res.gW_full and not res.exists_trapped_v
    z = O.zero_rep(2, 3)
    for U in F.all_subspaces(2, 3):
        res = O.derhyp_equivalence(z, U)
        assert not res.gW_full and res.exists_trapped_v


@pytest.mark.parametrize("seed", range(10))
def test_derhyp_random(seed):
    rep = random_rep(seed)
    for U in F.all_subspaces(rep.d, 3):
        res = O.derhyp_equivalence(rep, U)
        assert res.gW_full == (not res.exists_trapped_v)


def test_dual_action_sign():
    rep = O.gl_natural_rep(2, 5)
    W = F.span([(1, 0)], 2, 5)
    # (E_11 . f)(v) = -f(E_11 v) gives -e_1^*, spanning the same line
    assert F.contains(O.dual_orbit_span(rep, W), (4, 0))


def test_rep_json_round_trip():
    rep = O.sl_natural_rep(2, 7)
    back = O.LieRep.from_json(__import__("json").dumps(rep.to_dict()))
    assert (back.operators == rep.operators).all() and back.label == rep.label


@pytest.mark.parametrize("doc", ['{"p": 5, "d": 2}', '{"p": 5, "d": 2, "operators": [[1, 0]]}',
                                 '{"p": 4, "d": 1, "operators": [[[1]]]}', 'not json'])
def test_rep_bad_input(doc):
    with pytest.raises(InputError):
        O.LieRep.from_json(doc)
