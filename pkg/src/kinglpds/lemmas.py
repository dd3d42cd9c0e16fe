"""Mechanical checks of the local structure claims behind the charge rules.

Each claim says: around a member with a fixed partner (or around two members
in a fixed relative position), every assignment of membership to nearby cells
either satisfies a stated conclusion or already contains a visible violation
of the defining properties.  The checkers enumerate all assignments over a
window, so a "holds" verdict is an exhaustive case analysis, not a sample.

A configuration only counts as a refutation when the conclusion fails AND no
violation certificate is fully visible inside the window, AND the visible
members admit the matching the pairing property demands.  Certificates are
conservative: an equal-neighborhood pair needs both cells plus the symmetric
difference of their neighborhoods decided and member-free (cells shared by
both neighborhoods cannot separate them, so they may stay unknown); an
undominated cell needs its whole closed neighborhood decided and member-free.
Cells outside the window are unknown, and a real extension could only add
members there, which breaks certificates but never creates them — so relying
only on in-window certificates errs on the side of reporting counterexamples,
never on the side of a false "holds".

The rate claims are not geometric: they quantify over count vectors
(pair kind, i0, p0..p3) allowed by the structure lemmas, so they are checked
by direct enumeration of those vectors with exact arithmetic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import networkx as nx

from .grid import Point, chebyshev, closed_neighborhood, common_neighbors, neighbors
from .pattern import FiniteWindow

HALF = Fraction(1, 2)


@dataclass
class LemmaVerdict:
    target: str
    verdict: str  # "holds" | "counterexample" | "inconclusive"
    configs_examined: int
    elapsed_ms: float
    witness: str | None = None

    def line(self) -> str:
        if self.verdict == "holds":
            return (
                f"{self.target} holds configs={self.configs_examined}"
                f" elapsed={int(self.elapsed_ms)}ms"
            )
        return f"{self.target} {self.verdict}"


# ---------------------------------------------------------------------------
# window enumeration engine
# ---------------------------------------------------------------------------

class _Found(Exception):
    pass


class _Budget(Exception):
    pass


class _WindowSearch:
    """DFS over in/out assignments of a square window, center-outward.

    Hooks: ``safe(engine)`` prunes a branch once the claim can no longer be
    refuted in any completion; ``fails(engine)`` decides the conclusion at a
    fully assigned leaf.  Certificate locks prune any branch whose decided
    cells already force a visible violation in every completion.
    """

    def __init__(
        self,
        radius: int,
        forced_in: list[Point],
        forced_out: list[Point],
        forced_pairs: list[tuple[Point, Point]],
        node_budget: int | None = None,
        early_cells: list[Point] | None = None,
    ):
        self.radius = radius
        self.cells = sorted(
            ((x, y) for x in range(-radius, radius + 1) for y in range(-radius, radius + 1)),
            key=lambda p: (max(abs(p[0]), abs(p[1])), p[1], p[0]),
        )
        self.index = {p: i for i, p in enumerate(self.cells)}
        self.early = [] if early_cells is None else [self.index[p] for p in early_cells]
        self.nbr_idx = [
            [self.index[n] for n in neighbors(p) if n in self.index] for p in self.cells
        ]
        self.forced_pairs = forced_pairs
        self.node_budget = node_budget
        self.configs = 0
        self.witness: FiniteWindow | None = None

        self.in_mask = 0
        self.out_mask = 0
        self.ncount = [0] * len(self.cells)
        for p in forced_in:
            i = self.index[p]
            self.in_mask |= 1 << i
            for j in self.nbr_idx[i]:
                self.ncount[j] += 1
        for p in forced_out:
            self.out_mask |= 1 << (self.index[p])

        decided = self.in_mask | self.out_mask
        free = [i for i in range(len(self.cells)) if not (decided >> i) & 1]
        # claim-relevant cells first lets prunes and locks fire at shallow
        # depth; the remaining cells keep the center-outward order
        free_set = set(free)
        early = [i for i in self.early if i in free_set]
        early_set = set(early)
        self.order = early + [i for i in free if i not in early_set]
        self._build_locks()

    # -- certificate locks ---------------------------------------------------

    def _build_locks(self) -> None:
        full_open = [
            i for i, p in enumerate(self.cells) if len(self.nbr_idx[i]) == 8
        ]
        locks: list[int] = []
        for a_pos, i in enumerate(full_open):
            u = self.cells[i]
            nu = set(neighbors(u))
            for j in full_open[a_pos + 1:]:
                w = self.cells[j]
                if chebyshev(u, w) > 2:
                    continue
                dep = (1 << i) | (1 << j)
                for p in nu.symmetric_difference(neighbors(w)):
                    dep |= 1 << self.index[p]
                locks.append(dep)
        for i in full_open:
            dep = 0
            for p in closed_neighborhood(self.cells[i]):
                dep |= 1 << self.index[p]
            locks.append(dep)
        self.locks = locks
        self.locks_by_cell: list[list[int]] = [[] for _ in self.cells]
        for dep in locks:
            rest = dep
            while rest:
                low = rest & -rest
                self.locks_by_cell[low.bit_length() - 1].append(dep)
                rest ^= low

    def _locked_now(self) -> bool:
        out = self.out_mask
        return any((out & dep) == dep for dep in self.locks)

    # -- state reads for hooks ----------------------------------------------

    def is_in(self, i: int) -> bool:
        return bool((self.in_mask >> i) & 1)

    def is_out(self, i: int) -> bool:
        return bool((self.out_mask >> i) & 1)

    # -- leaf handling -------------------------------------------------------

    def _extendable(self) -> bool:
        """Can the visible members be matched as pairing demands?

        Members whose whole neighborhood is inside the window need an adjacent
        member partner here and now; others could pair with the unknown
        exterior.  Forced pairs are honored verbatim.
        """
        members = [self.cells[i] for i in range(len(self.cells)) if self.is_in(i)]
        prepaired = {p for pair in self.forced_pairs for p in pair}
        inner = self.radius - 1
        required = [
            p
            for p in members
            if max(abs(p[0]), abs(p[1])) <= inner and p not in prepaired
        ]
        if not required:
            return True
        g = nx.Graph()
        free = [p for p in members if p not in prepaired]
        g.add_nodes_from(free)
        req = set(required)
        for a_pos, p in enumerate(free):
            for q in free[a_pos + 1:]:
                if chebyshev(p, q) == 1:
                    g.add_edge(p, q, weight=(p in req) + (q in req))
        mates = nx.max_weight_matching(g)
        saturated = {v for e in mates for v in e}
        return all(p in saturated for p in required)

    def _leaf(self, fails: Callable) -> None:
        if not fails(self):
            return
        if not self._extendable():
            return
        pts = frozenset(self.cells[i] for i in range(len(self.cells)) if self.is_in(i))
        r = self.radius
        self.witness = FiniteWindow(-r, r, -r, r, pts)
        raise _Found

    # -- search --------------------------------------------------------------

    def run(self, safe: Callable, fails: Callable) -> tuple[str, FiniteWindow | None]:
        if self._locked_now():
            return "holds", None
        if safe(self):
            return "holds", None
        try:
            self._dfs(0, safe, fails)
        except _Found:
            return "counterexample", self.witness
        except _Budget:
            return "inconclusive", None
        return "holds", None

    def _dfs(self, pos: int, safe: Callable, fails: Callable) -> None:
        self.configs += 1
        if self.node_budget is not None and self.configs > self.node_budget:
            raise _Budget
        if pos == len(self.order):
            self._leaf(fails)
            return
        i = self.order[pos]
        bit = 1 << i

        self.out_mask |= bit
        locked = any(
            (self.out_mask & dep) == dep for dep in self.locks_by_cell[i]
        )
        if not locked and not safe(self):
            self._dfs(pos + 1, safe, fails)
        self.out_mask ^= bit

        self.in_mask |= bit
        nc = self.ncount
        for j in self.nbr_idx[i]:
            nc[j] += 1
        if not safe(self):
            self._dfs(pos + 1, safe, fails)
        for j in self.nbr_idx[i]:
            nc[j] -= 1
        self.in_mask ^= bit


def _run_case(
    radius: int,
    forced_in: list[Point],
    forced_pairs: list[tuple[Point, Point]],
    make_hooks: Callable[[_WindowSearch], tuple[Callable, Callable]],
    node_budget: int | None = None,
    early_cells: list[Point] | None = None,
) -> tuple[str, int, FiniteWindow | None]:
    engine = _WindowSearch(radius, forced_in, [], forced_pairs, node_budget, early_cells)
    safe, fails = make_hooks(engine)
    verdict, witness = engine.run(safe, fails)
    return verdict, engine.configs, witness


# ---------------------------------------------------------------------------
# structure lemma, parts 1-3
# ---------------------------------------------------------------------------

_FAR_PARTNER = (1, 1)
_CLOSE_PARTNER = (1, 0)
_CENTER = (0, 0)


def _pendants_of(v: Point, m: Point) -> list[Point]:
    return sorted(set(neighbors(v)) - closed_neighborhood(m))


def _part1_hooks(v: Point, m: Point):
    def make(engine: _WindowSearch):
        pend = [engine.index[p] for p in _pendants_of(v, m)]
        nc = engine.ncount

        def safe(e: _WindowSearch) -> bool:
            can = sum(1 for i in pend if not e.is_in(i) and nc[i] == 1)
            return can <= 1

        def fails(e: _WindowSearch) -> bool:
            return sum(1 for i in pend if e.is_out(i) and nc[i] == 1) >= 2

        return safe, fails

    return make


def _part2_hooks(v: Point, m: Point):
    def make(engine: _WindowSearch):
        intv = [engine.index[p] for p in common_neighbors(v, m)]
        nc = engine.ncount
        assert all(nc[i] >= 2 for i in intv), "interval cells must see the fixed pair"

        def safe(e: _WindowSearch) -> bool:
            can2 = sum(1 for i in intv if not e.is_in(i) and nc[i] == 2)
            return can2 <= 1

        def fails(e: _WindowSearch) -> bool:
            t1 = any(e.is_out(i) and nc[i] == 1 for i in intv)
            t2 = sum(1 for i in intv if e.is_out(i) and nc[i] == 2)
            return t1 or t2 >= 2

        return safe, fails

    return make


def _part3_hooks(v: Point, m: Point):
    def make(engine: _WindowSearch):
        pend = [engine.index[p] for p in _pendants_of(v, m)]
        nc = engine.ncount

        def safe(e: _WindowSearch) -> bool:
            return any(e.is_in(i) or nc[i] >= 3 for i in pend)

        def fails(e: _WindowSearch) -> bool:
            return all(e.is_out(i) and nc[i] <= 2 for i in pend)

        return safe, fails

    return make


def check_lemma1(part: int, node_budget: int | None = None) -> LemmaVerdict:
    """Exhaustively confirm one part of the per-member structure lemma.

    Part 1: at most one pendant of any member has a unique member neighbor.
    Part 2: no common neighbor of a pair has a unique member neighbor, and at
            most one has exactly two.
    Part 3: a diagonally paired member has a pendant that is a member or has
            three or more member neighbors.

    Parts 1-2 need only the pair kind, so one diagonal and one orthogonal
    partner position cover everything up to symmetry; part 3 concerns
    diagonal pairs only and needs the larger window because refutations are
    excluded by certificates among second-ring cells.
    """
    cases: list[tuple[Point, int, Callable]]
    if part == 1:
        cases = [(_FAR_PARTNER, 2, _part1_hooks), (_CLOSE_PARTNER, 2, _part1_hooks)]
    elif part == 2:
        cases = [(_FAR_PARTNER, 2, _part2_hooks), (_CLOSE_PARTNER, 2, _part2_hooks)]
    elif part == 3:
        cases = [(_FAR_PARTNER, 3, _part3_hooks)]
    else:
        raise ValueError(f"unknown part {part}")

    start = time.perf_counter()
    total = 0
    for m, radius, hooks in cases:
        verdict, configs, witness = _run_case(
            radius,
            [_CENTER, m],
            [(_CENTER, m)],
            hooks(_CENTER, m),
            node_budget,
        )
        total += configs
        if verdict != "holds":
            return LemmaVerdict(
                f"lemma1.{part}",
                verdict,
                total,
                1000 * (time.perf_counter() - start),
                witness=None if witness is None else _render_witness(witness),
            )
    return LemmaVerdict(
        f"lemma1.{part}", "holds", total, 1000 * (time.perf_counter() - start)
    )


def _render_witness(w: FiniteWindow) -> str:
    from .pattern import serialize_window

    return serialize_window(w)


# ---------------------------------------------------------------------------
# rate claims (count-vector enumeration)
# ---------------------------------------------------------------------------

def _count_vectors() -> list[tuple[str, int, int, int, int, int]]:
    """All (kind, i0, p0, p1, p2, p3) allowed by the structure lemma.

    Diagonal pairs have 5 pendants and 2 common neighbors, orthogonal pairs 3
    and 4.  Part 1 caps p1 at one; part 3 forces p0 + p3 >= 1 for diagonal
    pairs (a member-or-interval pendant, or a tier-3 one).
    """
    out = []
    for kind, np_, ni in (("far", 5, 2), ("close", 3, 4)):
        for i0 in range(ni + 1):
            for p0 in range(np_ + 1):
                for p1 in range(min(1, np_ - p0) + 1):
                    for p2 in range(np_ - p0 - p1 + 1):
                        p3 = np_ - p0 - p1 - p2
                        if kind == "far" and p0 + p3 < 1:
                            continue
                        out.append((kind, i0, p0, p1, p2, p3))
    return out


def _rate_from_counts(kind: str, i0: int, p1: int, p2: int, p3: int) -> Fraction:
    start = Fraction(9, 2) if kind == "far" else Fraction(5)
    ni = 2 if kind == "far" else 4
    ch3 = start - Fraction(ni - i0, 2) - p1 - Fraction(p2, 2)
    if p3 == 0:
        return HALF
    return min((ch3 - 1) / p3, HALF)


def check_r_claims() -> list[LemmaVerdict]:
    """Confirm the two facts about the round-2 rate by count enumeration.

    Half-rate: the rate is exactly 1/2 for orthogonal pairs, for members with
    a member-or-interval pendant or a member common neighbor, and for members
    with no tier-1 pendant.  Lower bound: the rate is always at least
    (p3 - 1) / (2 p3).
    """
    start = time.perf_counter()
    vectors = _count_vectors()

    half_bad = None
    for kind, i0, p0, p1, p2, p3 in vectors:
        if kind == "close" or p0 + i0 >= 1 or p1 == 0:
            if _rate_from_counts(kind, i0, p1, p2, p3) != HALF:
                half_bad = (kind, i0, p0, p1, p2, p3)
                break
    elapsed = 1000 * (time.perf_counter() - start)
    half = LemmaVerdict(
        "r-half",
        "holds" if half_bad is None else "counterexample",
        len(vectors),
        elapsed,
        witness=None if half_bad is None else f"counts {half_bad}",
    )

    start2 = time.perf_counter()
    low_bad = None
    for kind, i0, p0, p1, p2, p3 in vectors:
        if p3 == 0:
            continue
        if _rate_from_counts(kind, i0, p1, p2, p3) < Fraction(p3 - 1, 2 * p3):
            low_bad = (kind, i0, p0, p1, p2, p3)
            break
    low = LemmaVerdict(
        "r-lowerbound",
        "holds" if low_bad is None else "counterexample",
        len(vectors),
        1000 * (time.perf_counter() - start2),
        witness=None if low_bad is None else f"counts {low_bad}",
    )
    return [half, low]


# ---------------------------------------------------------------------------
# adjacent-members rate sum
# ---------------------------------------------------------------------------

def _rotate90(p: Point) -> Point:
    return (-p[1], p[0])


def _adjacent_sum_case(
    v1: Point, m1: Point, v2: Point, m2: Point, node_budget: int | None
) -> tuple[str, int, FiniteWindow | None]:
    # decide claim-relevant cells first: pendants and intervals of both
    # members (in-branches prune instantly there), then the cells that fix
    # pendant tiers; certificate locks then kill every branch early
    core: list[Point] = []
    for v, m in ((v1, m1), (v2, m2)):
        for p in _pendants_of(v, m) + sorted(common_neighbors(v, m)):
            if p not in core:
                core.append(p)
    rim: list[Point] = []
    for v, m in ((v1, m1), (v2, m2)):
        for p in _pendants_of(v, m):
            for q in neighbors(p):
                if q not in core and q not in rim:
                    rim.append(q)
    early = core + sorted(
        rim, key=lambda p: (max(abs(p[0]), abs(p[1])), p[1], p[0])
    )

    def make(engine: _WindowSearch):
        idx = engine.index
        nc = engine.ncount
        def_i = frozenset(
            idx[p] for p in set(common_neighbors(v1, m1)) | set(common_neighbors(v2, m2))
        )
        sides = []
        for v, m in ((v1, m1), (v2, m2)):
            sides.append(
                (
                    [idx[p] for p in _pendants_of(v, m)],
                    [idx[p] for p in common_neighbors(v, m)],
                )
            )

        def side_rate(e: _WindowSearch, pend, intv) -> Fraction:
            i0 = sum(1 for i in intv if e.is_in(i))
            p = [0, 0, 0, 0]
            for i in pend:
                if e.is_in(i) or i in def_i:
                    p[0] += 1
                else:
                    p[min(nc[i], 3)] += 1
            return _rate_from_counts("far", i0, p[1], p[2], p[3])

        def side_grant(e: _WindowSearch, pend, intv) -> Fraction:
            if any(e.is_in(i) for i in pend) or any(e.is_in(i) for i in intv):
                return HALF
            p3min = sum(
                1 for i in pend if e.is_out(i) and nc[i] >= 3 and i not in def_i
            )
            can_t1 = sum(1 for i in pend if not e.is_in(i) and nc[i] == 1)
            if p3min >= 2 and can_t1 <= 1:
                return Fraction(1, 4)
            return Fraction(0)

        def safe(e: _WindowSearch) -> bool:
            return sum(side_grant(e, *s) for s in sides) >= HALF

        def fails(e: _WindowSearch) -> bool:
            return sum(side_rate(e, *s) for s in sides) < HALF

        return safe, fails

    return _run_case(
        3,
        [v1, m1, v2, m2],
        [(v1, m1), (v2, m2)],
        make,
        node_budget,
        early_cells=early,
    )


def check_adjacent_sum(node_budget: int | None = None) -> LemmaVerdict:
    """Members two apart on a grid line have round-2 rates summing to >= 1/2.

    Only outward diagonal partners are enumerated: an orthogonal partner gives
    its member rate 1/2 outright, and a partner adjacent to the other member
    hands that member a member pendant-or-interval, which also forces 1/2;
    rates are never negative, so those cases cannot refute the claim.  Both
    the horizontal placement and its 90-degree rotation are checked.
    """
    start = time.perf_counter()
    total = 0
    for rotate in (False, True):
        tf = _rotate90 if rotate else (lambda p: p)
        v1, v2 = tf((1, 0)), tf((-1, 0))
        for m1_raw in ((2, 1), (2, -1)):
            for m2_raw in ((-2, 1), (-2, -1)):
                m1, m2 = tf(m1_raw), tf(m2_raw)
                verdict, configs, witness = _adjacent_sum_case(
                    v1, m1, v2, m2, node_budget
                )
                total += configs
                if verdict != "holds":
                    return LemmaVerdict(
                        "adjacent-sum",
                        verdict,
                        total,
                        1000 * (time.perf_counter() - start),
                        witness=None if witness is None else _render_witness(witness),
                    )
    return LemmaVerdict(
        "adjacent-sum", "holds", total, 1000 * (time.perf_counter() - start)
    )


# ---------------------------------------------------------------------------
# everything
# ---------------------------------------------------------------------------

def check_all(node_budget: int | None = None) -> list[LemmaVerdict]:
    out = [check_lemma1(part, node_budget) for part in (1, 2, 3)]
    out.extend(check_r_claims())
    out.append(check_adjacent_sum(node_budget))
    return out
