from fractions import Fraction

import pytest

from liebound import rootsys as R
from liebound.errors import InputError, UnsupportedError

POSITIVE_COUNT = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E": lambda n: {6: 36, 7: 63, 8: 120}[n],
    "F": lambda n: 24,
    "G": lambda n: 6,
}


def weyl_orbit_roots(rs):
    """All roots as the Weyl orbit of the simple roots (independent of root strings)."""
    seen = set(rs.simple_roots)
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for i in range(rs.rank):
                b = R.simple_reflection(rs, i, a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


@pytest.mark.parametrize("family,rank", R.TABLE_SYSTEMS)
def test_roots_match_weyl_orbit(family, rank):
    rs = R.build_root_system(family, rank)
    assert set(rs.roots) == weyl_orbit_roots(rs)
    assert len(rs.positive_roots) == POSITIVE_COUNT[family](rank)


@pytest.mark.parametrize("family,rank,count", [("A", 1, 2), ("G", 2, 12), ("B", 3, 18)])
def test_root_counts(family, rank, count):
    assert len(R.build_root_system(family, rank).roots) == count


@pytest.mark.parametrize("sel,theta", [("A:1", (1,)), ("A:2", (1, 1)), ("G:2", (3, 2)),
                                       ("B:3", (1, 2, 2)), ("E:8", (2, 3, 4, 6, 5, 4, 3, 2))])
def test_highest_root(sel, theta):
    rs = R.parse_selector(sel)
    assert R.highest_root(rs) == theta
    # theta + alpha_i is never a root
    for a in rs.simple_roots:
        assert not rs.is_root(R.add(theta, a))


@pytest.mark.parametrize("sel,two_rho", [("A:1", (1,)), ("A:2", (2, 2)), ("B:2", (3, 4))])
def test_weyl_vector(sel, two_rho):
    assert R.weyl_vector_doubled(R.parse_selector(sel)) == two_rho


def test_simple_roots_first_in_order():
    rs = R.build_root_system("D", 5)
    assert rs.positive_roots[: rs.rank] == rs.simple_roots
    heights = [R.height(r) for r in rs.positive_roots]
    assert heights == sorted(heights)


@pytest.mark.parametrize("family,rank", R.TABLE_SYSTEMS)
def test_theta_normalized(family, rank):
    rs = R.build_root_system(family, rank)
    t = R.highest_root(rs)
    assert R.inner_product(rs, t, t) == 2


def test_inner_product_examples():
    a2 = R.build_root_system("A", 2)
    assert R.inner_product(a2, (1, 0), (0, 1)) == -1
    g2 = R.build_root_system("G", 2)
    assert R.inner_product(g2, (1, 0), (1, 0)) == Fraction(2, 3)


@pytest.mark.parametrize("family,rank", [("B", 3), ("C", 3), ("F", 4), ("G", 2), ("E", 6)])
def test_weyl_invariance(family, rank):
    rs = R.build_root_system(family, rank)
    roots = rs.roots
    for i in range(rank):
        for a in roots[::3]:
            for b in roots[::5]:
                sa, sb = R.simple_reflection(rs, i, a), R.simple_reflection(rs, i, b)
                assert R.inner_product(rs, sa, sb) == R.inner_product(rs, a, b)


@pytest.mark.parametrize("family,rank", [("B", 4), ("G", 2), ("F", 4)])
def test_closure_idempotent(family, rank):
    rs = R.build_root_system(family, rank)
    again = R.from_cartan(rs.cartan)
    assert again.positive_roots == rs.positive_roots


def test_d3_is_a3():
    d3, a3 = R.build_root_system("D", 3), R.build_root_system("A", 3)
    assert len(d3.positive_roots) == len(a3.positive_roots)
    assert R.u_invariant(d3) == R.u_invariant(a3) == 6


@pytest.mark.parametrize("sel,u", [("G:2", 6), ("B:4", 12), ("E:8", 58), ("A:3", 6)])
def test_u_invariant(sel, u):
    assert R.u_invariant(R.parse_selector(sel)) == u


@pytest.mark.parametrize("sel,h", [("A:3", 4), ("G:2", 4), ("E:7", 18)])
def test_dual_coxeter(sel, h):
    assert R.dual_coxeter(R.parse_selector(sel)) == h


@pytest.mark.parametrize("sel,n", [("A:1", 0), ("G:2", 4), ("E:8", 56)])
def test_special_roots(sel, n):
    assert len(R.special_roots(R.parse_selector(sel))) == n


@pytest.mark.parametrize("sel,d", [("A:2", 8), ("F:4", 52), ("D:4", 28)])
def test_dim_g(sel, d):
    assert R.dim_g(R.parse_selector(sel)) == d


@pytest.mark.parametrize("sel,p,nice", [("A:4", 5, False), ("A:4", 7, True), ("G:2", 3, False),
                                        ("B:3", 5, True), ("A:6", 7, False)])
def test_nice_prime(sel, p, nice):
    assert R.is_nice_prime(R.parse_selector(sel), p) is nice


@pytest.mark.parametrize("family,rank", R.TABLE_SYSTEMS)
def test_weyl_data_identities(family, rank):
    wd = R.weyl_data(R.build_root_system(family, rank))
    assert wd.u == 2 * wd.dual_coxeter - 2 == len(wd.special_roots) + 2


def test_coroot_expansion_theta_b2():
    rs = R.build_root_system("B", 2)
    # theta = a1 + 2a2 is long, a2 short: theta^vee = a1^vee + a2^vee
    assert R.coroot_expansion(rs, (1, 2)) == (1, 1)


def test_custom_cartan():
    rs = R.from_cartan_json('{"cartan": [[2, -1], [-3, 2]]}')
    assert rs.family is None
    assert len(rs.positive_roots) == 6
    with pytest.raises(UnsupportedError):
        R.u_invariant(rs)
    with pytest.raises(UnsupportedError):
        R.dual_coxeter(rs)


@pytest.mark.parametrize("family,rank", [("A", 0), ("B", 1), ("C", 1), ("D", 2), ("E", 5),
                                         ("E", 9), ("F", 3), ("G", 3), ("X", 2)])
def test_invalid_rank(family, rank):
    with pytest.raises(InputError):
        R.build_root_system(family, rank)


@pytest.mark.parametrize("cartan", [[[2, 1], [1, 2]], [[2, -1], [0, 2]], [[2, -2], [-2, 2]],
                                    [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], [[2]] * 2])
def test_invalid_cartan(cartan):
    with pytest.raises(InputError):
        R.from_cartan(cartan)


@pytest.mark.parametrize("sel", ["B", "B:x", "Q:3", ""])
def test_bad_selector(sel):
    with pytest.raises(InputError):
        R.parse_selector(sel)
