"""Verification: domination, locating, periodic matchings, window checks."""

import random
from fractions import Fraction

import pytest

from kinglpds.grid import neighbors
from kinglpds.pattern import (
    FiniteWindow,
    LatticeBasis,
    PeriodicPattern,
    XDescriptor,
    catalog,
    lx_pattern,
    truncate,
)
from kinglpds.verify import (
    check_domination,
    check_locating,
    find_perfect_matching,
    verify_lpds,
    verify_window,
)


# -- independent matching oracle ---------------------------------------------
# Exhaustive backtracking count of perfect matchings on the loop-free quotient
# (simple graph on member residues).  Written before looking at the outputs of
# find_perfect_matching; existence must agree.

def _quotient(pattern):
    base = sorted(pattern.base)
    reduce = pattern.basis.reduce
    adj = {r: set() for r in base}
    for r in base:
        for n in neighbors(r):
            q = reduce(n)
            if q != r and q in adj:
                adj[r].add(q)
                adj[q].add(r)
    return base, adj


def count_perfect_matchings(nodes, adj):
    def rec(free):
        if not free:
            return 1
        v = min(free)
        rest = free - {v}
        return sum(rec(rest - {w}) for w in adj[v] if w in rest)
    return rec(frozenset(nodes))


_BASES = [
    ((4, 0), (0, 4)),
    ((3, 1), (0, 4)),
    ((2, 1), (-3, 3)),
    ((6, 0), (0, 2)),
    ((5, 0), (0, 3)),
]


def test_matching_existence_matches_oracle_on_catalog():
    for name in ("L1", "L2"):
        p = catalog(name)
        nodes, adj = _quotient(p)
        assert count_perfect_matchings(nodes, adj) > 0
        mres = find_perfect_matching(p, allow_refinement=False)
        assert mres.matching is not None
        mres.matching.validate(p)
        assert len(mres.matching.pairs()) == len(p.base) // 2


def test_matching_existence_matches_oracle_on_random_patterns():
    rng = random.Random(20260822)
    for _ in range(120):
        u, v = _BASES[rng.randrange(len(_BASES))]
        basis = LatticeBasis(u, v)
        cells = basis.domain_cells()
        size = rng.randrange(2, len(cells) + 1)
        pts = rng.sample(cells, size)
        p = PeriodicPattern.make(basis, pts)
        nodes, adj = _quotient(p)
        oracle_has = count_perfect_matchings(nodes, adj) > 0
        mres = find_perfect_matching(p, allow_refinement=False)
        assert (mres.matching is not None) == oracle_has
        if mres.matching is not None:
            mres.matching.validate(p)
        else:
            assert mres.obstruction
            assert mres.witnesses


def test_l2_quotient_matching_is_unique():
    nodes, adj = _quotient(catalog("L2"))
    assert count_perfect_matchings(nodes, adj) == 1


# -- full periodic verification ----------------------------------------------

def test_catalog_patterns_are_valid():
    for name in ("L1", "L2"):
        r = verify_lpds(catalog(name))
        assert r.valid
        assert r.density == Fraction(2, 9)
        assert not r.violations
    for bits in ("0", "10", "101"):
        r = verify_lpds(lx_pattern(XDescriptor.from_bits(bits)))
        assert r.valid
        assert r.density == Fraction(2, 9)


def test_machine_line_exact():
    assert verify_lpds(catalog("L1")).machine_line() == (
        "verdict dominated=true locating=true paired=true"
        " density=2/9 DS1=2/9 DS2=0/1"
    )
    assert verify_lpds(catalog("L2")).machine_line() == (
        "verdict dominated=true locating=true paired=true"
        " density=2/9 DS1=1/9 DS2=1/9"
    )


def test_split_densities():
    c1 = verify_lpds(catalog("L1")).classification
    assert (c1.d_far, c1.d_close) == (Fraction(2, 9), 0)
    c2 = verify_lpds(catalog("L2")).classification
    assert (c2.d_far, c2.d_close) == (Fraction(1, 9), Fraction(1, 9))
    assert c2.density == Fraction(2, 9)


def test_undominated_pattern_reported():
    iso = PeriodicPattern.make(LatticeBasis((10, 0), (0, 10)), [(0, 0), (1, 1)])
    assert check_domination(iso)
    r = verify_lpds(iso)
    assert not r.valid and not r.dominating
    assert {c.kind for c in r.violations} == {"undominated"}
    # the diagonal pair itself still matches
    assert r.paired is True


def test_locating_check_requires_domination():
    iso = PeriodicPattern.make(LatticeBasis((10, 0), (0, 10)), [(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        check_locating(iso)


def test_dominating_but_not_locating():
    # full columns at x % 3 == 0: (2,0) and (4,0) see the same members
    cols = PeriodicPattern.make(LatticeBasis((3, 0), (0, 1)), [(0, 0)])
    r = verify_lpds(cols)
    assert r.dominating and not r.locating and not r.valid
    assert any(
        c.kind == "unlocatable-pair" and set(c.witnesses) == {(2, 0), (4, 0)}
        for c in r.violations
    )


# -- index-2 refinement ------------------------------------------------------

def test_refinement_lifts_odd_quotient():
    stripes = PeriodicPattern.make(LatticeBasis((1, 0), (0, 2)), [(0, 0)])
    bare = find_perfect_matching(stripes, allow_refinement=False)
    assert bare.matching is None
    assert "odd member count 1" in bare.obstruction
    assert bare.witnesses == ((0, 0),)

    lifted = find_perfect_matching(stripes)
    assert lifted.matching is not None
    assert lifted.lifted_basis is not None
    assert abs(lifted.lifted_basis.det) == 2 * abs(stripes.basis.det)

    r = verify_lpds(stripes)
    assert r.valid
    assert r.density == Fraction(1, 2)
    assert r.lifted_basis is not None


def test_refinement_respects_opt_out():
    stripes = PeriodicPattern.make(LatticeBasis((1, 0), (0, 2)), [(0, 0)])
    r = verify_lpds(stripes, allow_refinement=False)
    assert r.paired is False
    assert any(c.kind == "unpairable" for c in r.violations)


# -- finite windows ----------------------------------------------------------

def test_window_of_valid_pattern_is_clean():
    for name in ("L1", "L2"):
        w = truncate(catalog(name), -5, 5, -5, 5)
        r = verify_window(w)
        assert r.valid
        assert not r.violations
        assert r.machine_line().endswith("DS1=n/a DS2=n/a")


def test_window_too_small():
    with pytest.raises(ValueError):
        verify_window(FiniteWindow(0, 3, 0, 6, frozenset()))


def test_window_pairing_three_valued():
    # a lone interior member can never be paired
    stranded = verify_window(FiniteWindow(0, 6, 0, 6, frozenset({(3, 3)})))
    assert stranded.paired is False
    assert any(c.kind == "unpairable" for c in stranded.violations)
    # three in a row: saturation fails but nobody is stranded -> undecided
    row = verify_window(
        FiniteWindow(0, 6, 0, 6, frozenset({(2, 3), (3, 3), (4, 3)}))
    )
    assert row.paired is None
    assert "paired=n/a" in row.machine_line()


def test_window_flags_planted_hole():
    w = truncate(catalog("L1"), -5, 5, -5, 5)
    holed = FiniteWindow(-5, 5, -5, 5, frozenset(set(w.points) - {(0, 0)}))
    r = verify_window(holed)
    assert not r.valid
    kinds = {c.kind for c in r.violations}
    assert "undominated" in kinds or "unlocatable-pair" in kinds
