"""Deciding the three defining properties of a candidate set.

A valid set must be dominating (every vertex has a member in its closed
neighborhood), locating (distinct non-members have distinct sets of member
neighbors), and paired (the induced subgraph on members admits a perfect
matching).  For a periodic pattern all three checks run on the quotient by the
period lattice, which makes them exhaustive for the infinite grid.

Locality of the locating check: if two non-members have equal nonempty member
neighborhoods, a shared member is within distance 1 of both, so the vertices
are within Chebyshev distance 2.  Equal-empty neighborhoods cannot occur once
domination holds, and a vertex never collides with its own lattice translate
(a finite nonempty set is not invariant under a nonzero translation), so only
nearby distinct-residue pairs need comparison.  The check therefore refuses to
run before domination has been established.

Pairing runs on the loop-free quotient graph of member residues; a perfect
matching there lifts to a periodic perfect matching of the infinite induced
subgraph.  A residue adjacent only to its own translates cannot be matched at
the given period, so on failure the search is retried on the three index-2
sublattices, where such loops become ordinary edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .grid import (
    Point,
    chebyshev,
    closed_neighborhood,
    common_neighbors,
    neighbors,
)
from .pattern import FiniteWindow, LatticeBasis, PeriodicPattern


# ---------------------------------------------------------------------------
# certificates and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ViolationCertificate:
    """A concrete witness that one of the three properties fails."""

    kind: str  # "undominated" | "unlocatable-pair" | "unpairable"
    witnesses: tuple[Point, ...]
    detail: str = ""

    def line(self) -> str:
        pts = " ".join(f"({x},{y})" for x, y in self.witnesses)
        return f"violation {self.kind} {pts}" + (f" {self.detail}" if self.detail else "")


def _frac(f: Fraction | None) -> str:
    if f is None:
        return "n/a"
    return f"{f.numerator}/{f.denominator}"


@dataclass
class VerificationReport:
    dominating: bool
    locating: bool
    paired: bool | None
    matching: "Matching | None" = None
    lifted_basis: LatticeBasis | None = None
    violations: list[ViolationCertificate] = field(default_factory=list)
    classification: "Classification | None" = None
    density: Fraction | None = None

    @property
    def valid(self) -> bool:
        return self.dominating and self.locating and self.paired is True

    def machine_line(self) -> str:
        cls = self.classification
        d1 = cls.d_far if cls else None
        d2 = cls.d_close if cls else None
        paired = "n/a" if self.paired is None else str(self.paired).lower()
        return (
            f"verdict dominated={str(self.dominating).lower()}"
            f" locating={str(self.locating).lower()}"
            f" paired={paired}"
            f" density={_frac(self.density)}"
            f" DS1={_frac(d1)} DS2={_frac(d2)}"
        )

    def lines(self) -> list[str]:
        out = [self.machine_line()]
        out.extend(c.line() for c in sorted(self.violations, key=lambda c: (c.kind, c.witnesses)))
        return out


# ---------------------------------------------------------------------------
# membership helper
# ---------------------------------------------------------------------------

class _Members:
    """Memoized membership oracle over world points for one pattern."""

    def __init__(self, pattern: PeriodicPattern):
        self._contains = pattern.contains
        self._cache: dict[Point, bool] = {}

    def __call__(self, p: Point) -> bool:
        hit = self._cache.get(p)
        if hit is None:
            hit = self._cache[p] = self._contains(p)
        return hit


# ---------------------------------------------------------------------------
# domination
# ---------------------------------------------------------------------------

def check_domination(pattern: PeriodicPattern) -> list[ViolationCertificate]:
    """Certificates for every undominated residue class (empty list = dominating)."""
    member = _Members(pattern)
    certs = []
    for cell in pattern.basis.domain_cells():
        if not any(member(n) for n in closed_neighborhood(cell)):
            certs.append(ViolationCertificate("undominated", (cell,)))
    return certs


# ---------------------------------------------------------------------------
# locating
# ---------------------------------------------------------------------------

_BALL2_OFFSETS = [
    (dx, dy)
    for dx in range(-2, 3)
    for dy in range(-2, 3)
    if (dx, dy) != (0, 0)
]


def _normalize_pair(basis: LatticeBasis, u: Point, w: Point) -> tuple[Point, Point]:
    """Translation-canonical form of an unordered vertex pair."""
    p, q = sorted((u, w))
    anchor = basis.reduce(p)
    dx, dy = anchor[0] - p[0], anchor[1] - p[1]
    return (anchor, (q[0] + dx, q[1] + dy))


def check_locating(pattern: PeriodicPattern) -> list[ViolationCertificate]:
    """Certificates for all colliding non-member pairs, up to translation.

    Requires domination (raises ValueError otherwise): it justifies both the
    distance-2 locality and skipping same-residue pairs.
    """
    if check_domination(pattern):
        raise ValueError("requires domination")
    member = _Members(pattern)
    basis = pattern.basis
    seen: set[tuple[Point, Point]] = set()
    certs = []
    for u in basis.domain_cells():
        if member(u):
            continue
        nu = {n for n in neighbors(u) if member(n)}
        for dx, dy in _BALL2_OFFSETS:
            w = (u[0] + dx, u[1] + dy)
            if member(w) or basis.reduce(w) == u:
                continue
            nw = {n for n in neighbors(w) if member(n)}
            if nu == nw:
                key = _normalize_pair(basis, u, w)
                if key not in seen:
                    seen.add(key)
                    certs.append(ViolationCertificate("unlocatable-pair", key))
    return certs


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------

@dataclass
class Matching:
    """A periodic perfect matching, stored per member residue.

    ``partner[r] = (q, off)`` means the vertex at residue representative r is
    matched with the world vertex q + off; every translate pairs accordingly.
    """

    partner: dict[Point, tuple[Point, Point]]

    def world_partner(self, r: Point) -> Point:
        q, off = self.partner[r]
        return (q[0] + off[0], q[1] + off[1])

    def pairs(self) -> list[tuple[Point, Point]]:
        """Each matched pair once, as (residue, world partner)."""
        out = []
        for r in sorted(self.partner):
            q, off = self.partner[r]
            if r < q:
                out.append((r, self.world_partner(r)))
        return out

    def validate(self, pattern: PeriodicPattern) -> None:
        assert set(self.partner) == set(pattern.base), "matching must cover all residues"
        for r, (q, off) in self.partner.items():
            assert r != q, f"residue {r} matched to its own translate"
            w = (q[0] + off[0], q[1] + off[1])
            assert chebyshev(r, w) == 1, f"pair {r}-{w} not adjacent"
            back_q, back_off = self.partner[q]
            assert back_q == r and back_off == (-off[0], -off[1]), "partner map is not an involution"


@dataclass
class MatchingResult:
    matching: Matching | None
    pattern: PeriodicPattern  # the pattern the matching lives on (possibly refined)
    lifted_basis: LatticeBasis | None = None
    obstruction: str | None = None
    witnesses: tuple[Point, ...] = ()


def _quotient_graph(pattern: PeriodicPattern) -> nx.Graph:
    """Loop-free graph on member residues; edge offsets chosen lex-least."""
    basis = pattern.basis
    g = nx.Graph()
    g.add_nodes_from(pattern.base)
    offsets: dict[tuple[Point, Point], list[Point]] = {}
    for r in pattern.base:
        for n in neighbors(r):
            q = basis.reduce(n)
            if q == r or q not in pattern.base:
                continue
            off = (n[0] - q[0], n[1] - q[1])
            offsets.setdefault((r, q), []).append(off)
    for (r, q), offs in offsets.items():
        if r < q:
            g.add_edge(r, q, offset=min(offs))
    return g


def _refinements(basis: LatticeBasis) -> list[tuple[LatticeBasis, Point]]:
    """The three index-2 sublattices with a coset representative for each."""
    u, v = basis.u, basis.v
    double = lambda w: (2 * w[0], 2 * w[1])
    return [
        (LatticeBasis(double(u), v), u),
        (LatticeBasis(u, double(v)), v),
        (LatticeBasis((u[0] + v[0], u[1] + v[1]), (u[0] - v[0], u[1] - v[1])), u),
    ]


def _match_at_period(pattern: PeriodicPattern) -> tuple[Matching | None, tuple[Point, ...]]:
    if len(pattern.base) % 2:
        return None, tuple(sorted(pattern.base))
    g = _quotient_graph(pattern)
    mates = nx.max_weight_matching(g, maxcardinality=True)
    if 2 * len(mates) != len(pattern.base):
        matched = {v for e in mates for v in e}
        return None, tuple(sorted(set(pattern.base) - matched))
    partner: dict[Point, tuple[Point, Point]] = {}
    for r, q in mates:
        edge_r, edge_q = (r, q) if r < q else (q, r)
        off = g.edges[edge_r, edge_q]["offset"]
        partner[edge_r] = (edge_q, off)
        partner[edge_q] = (edge_r, (-off[0], -off[1]))
    return Matching(partner), ()


def find_perfect_matching(
    pattern: PeriodicPattern, allow_refinement: bool = True
) -> MatchingResult:
    """Perfect matching on the loop-free quotient, with index-2 fallback.

    When the quotient at the given period has no perfect matching (odd member
    count, or members reachable only through their own translates), the three
    index-2 sublattices are tried with base points replicated; success there is
    reported through ``lifted_basis``.
    """
    matching, witnesses = _match_at_period(pattern)
    if matching is not None:
        matching.validate(pattern)
        return MatchingResult(matching, pattern)
    if allow_refinement:
        for refined_basis, rep in _refinements(pattern.basis):
            pts = [p for p in pattern.base] + [
                (p[0] + rep[0], p[1] + rep[1]) for p in pattern.base
            ]
            refined = PeriodicPattern.make(refined_basis, pts)
            m2, _ = _match_at_period(refined)
            if m2 is not None:
                m2.validate(refined)
                return MatchingResult(m2, refined, lifted_basis=refined_basis)
    reason = (
        f"odd member count {len(pattern.base)} in fundamental domain"
        if len(pattern.base) % 2
        else "no perfect matching on the loop-free quotient"
    )
    if allow_refinement:
        reason += " or its index-2 refinements"
    return MatchingResult(None, pattern, obstruction=reason, witnesses=witnesses)


# ---------------------------------------------------------------------------
# taxonomy
# ---------------------------------------------------------------------------

@dataclass
class PairInfo:
    """Everything the discharge pipelines need about one matched member."""

    member: Point
    partner: Point  # world coordinates
    kind: str  # "far" (diagonal pair) | "close" (orthogonal pair)
    pendants: tuple[Point, ...]  # neighbors of the member not seen by its partner
    intervals: tuple[Point, ...]  # common neighbors of the pair
    pendant_split: dict[int, tuple[Point, ...]]  # 0: in S or interval; 1..3: by tier
    interval_members: tuple[Point, ...]  # intervals that are themselves members

    @property
    def p0(self) -> int:
        return len(self.pendant_split[0])

    @property
    def p1(self) -> int:
        return len(self.pendant_split[1])

    @property
    def p2(self) -> int:
        return len(self.pendant_split[2])

    @property
    def p3(self) -> int:
        return len(self.pendant_split[3])

    @property
    def i0(self) -> int:
        return len(self.interval_members)


@dataclass
class NonMemberInfo:
    vertex: Point
    member_neighbors: int
    in_interval: bool

    @property
    def tier(self) -> int:
        return min(self.member_neighbors, 3)


@dataclass
class Classification:
    """Per-residue taxonomy of a verified pattern under a fixed matching."""

    pattern: PeriodicPattern
    pairs: dict[Point, PairInfo]
    nonmembers: dict[Point, NonMemberInfo]
    interval_residues: frozenset[Point]
    d_far: Fraction
    d_close: Fraction

    @property
    def density(self) -> Fraction:
        return self.d_far + self.d_close

    def tier3_outside_interval(self) -> list[Point]:
        return sorted(
            v for v, info in self.nonmembers.items() if info.tier == 3 and not info.in_interval
        )

    def taxonomy_violations(self) -> list[str]:
        """Structural facts that hold in every valid pattern, checked directly.

        Per member: at most one pendant with a single member neighbor; no
        interval vertex with fewer than two member neighbors; at most one
        interval vertex with exactly two; every far-paired member has a pendant
        that is a member or has at least three member neighbors.
        """
        member = _Members(self.pattern)
        tier = lambda u: sum(member(n) for n in neighbors(u))
        problems = []
        for v, info in self.pairs.items():
            pendant_t1 = [u for u in info.pendants if not member(u) and tier(u) == 1]
            if len(pendant_t1) > 1:
                problems.append(f"{v}: {len(pendant_t1)} pendants with a unique member neighbor")
            interval_t = [tier(u) for u in info.intervals if not member(u)]
            if any(t < 2 for t in interval_t):
                problems.append(f"{v}: interval vertex with fewer than 2 member neighbors")
            if sum(t == 2 for t in interval_t) > 1:
                problems.append(f"{v}: several interval vertices with exactly 2 member neighbors")
            if info.kind == "far":
                if not any(member(u) or tier(u) >= 3 for u in info.pendants):
                    problems.append(f"{v}: far pair with no pendant in the member-or-tier-3 class")
        return problems


def classify(pattern: PeriodicPattern, matching: Matching) -> Classification:
    member = _Members(pattern)
    basis = pattern.basis

    interval_residues = set()
    raw: dict[Point, tuple[Point, str, tuple[Point, ...], tuple[Point, ...]]] = {}
    for v in pattern.base:
        mv = matching.world_partner(v)
        common = common_neighbors(v, mv)
        kind = "far" if len(common) == 2 else "close"
        pend = tuple(sorted(set(neighbors(v)) - closed_neighborhood(mv)))
        intv = tuple(sorted(common))
        expected = (5, 2) if kind == "far" else (3, 4)
        assert (len(pend), len(intv)) == expected, f"pendant/interval split broken at {v}"
        raw[v] = (mv, kind, pend, intv)
        for u in intv:
            interval_residues.add(basis.reduce(u))

    tier = lambda u: sum(member(n) for n in neighbors(u))
    in_interval = lambda u: basis.reduce(u) in interval_residues

    pairs: dict[Point, PairInfo] = {}
    far = close = 0
    for v, (mv, kind, pend, intv) in raw.items():
        split: dict[int, list[Point]] = {0: [], 1: [], 2: [], 3: []}
        for u in pend:
            if member(u) or in_interval(u):
                split[0].append(u)
            else:
                split[min(tier(u), 3)].append(u)
        pairs[v] = PairInfo(
            member=v,
            partner=mv,
            kind=kind,
            pendants=pend,
            intervals=intv,
            pendant_split={k: tuple(pts) for k, pts in split.items()},
            interval_members=tuple(u for u in intv if member(u)),
        )
        if kind == "far":
            far += 1
        else:
            close += 1

    nonmembers = {
        cell: NonMemberInfo(cell, tier(cell), in_interval(cell))
        for cell in basis.domain_cells()
        if not member(cell)
    }
    cells = basis.cells
    return Classification(
        pattern=pattern,
        pairs=pairs,
        nonmembers=nonmembers,
        interval_residues=frozenset(interval_residues),
        d_far=Fraction(far, cells),
        d_close=Fraction(close, cells),
    )


# ---------------------------------------------------------------------------
# full verification
# ---------------------------------------------------------------------------

def verify_lpds(pattern: PeriodicPattern, allow_refinement: bool = True) -> VerificationReport:
    """Compose domination, locating, and pairing; classify on success."""
    violations = list(check_domination(pattern))
    dominating = not violations
    locating = False
    if dominating:
        loc = check_locating(pattern)
        locating = not loc
        violations.extend(loc)

    mres = find_perfect_matching(pattern, allow_refinement=allow_refinement)
    paired = mres.matching is not None
    if not paired:
        violations.append(
            ViolationCertificate("unpairable", mres.witnesses, detail=mres.obstruction or "")
        )

    classification = None
    if paired:
        classification = classify(mres.pattern, mres.matching)

    return VerificationReport(
        dominating=dominating,
        locating=locating,
        paired=paired,
        matching=mres.matching,
        lifted_basis=mres.lifted_basis,
        violations=violations,
        classification=classification,
        density=pattern.density,
    )


# ---------------------------------------------------------------------------
# finite windows
# ---------------------------------------------------------------------------

def _window_interior(window: FiniteWindow) -> list[Point]:
    return window.interior()


def verify_window(window: FiniteWindow) -> VerificationReport:
    """Partial verification of a finite truncation.

    Only vertices whose full neighborhood is visible can support a verdict:
    domination is checked for interior cells, locating for interior pairs at
    Chebyshev distance at most 2.  Pairing is three-valued: True when a
    matching inside the window saturates every interior member, False when
    some interior member has no adjacent member at all (no extension can fix
    that), and None ("not evaluated") when saturation fails only in ways the
    hidden exterior could repair.
    """
    if window.width < 5 or window.height < 5:
        raise ValueError("window too small: need at least 5x5")
    pts = window.points
    interior = _window_interior(window)
    interior_set = set(interior)
    violations: list[ViolationCertificate] = []

    for u in interior:
        if not any(n in pts for n in closed_neighborhood(u)):
            violations.append(ViolationCertificate("undominated", (u,)))
    dominating = not violations

    nonmember_interior = [u for u in interior if u not in pts]
    loc_certs = []
    for i, u in enumerate(nonmember_interior):
        nu = {n for n in neighbors(u) if n in pts}
        for w in nonmember_interior[i + 1:]:
            if chebyshev(u, w) > 2:
                continue
            nw = {n for n in neighbors(w) if n in pts}
            if nu == nw:
                loc_certs.append(ViolationCertificate("unlocatable-pair", (u, w)))
    locating = not loc_certs
    violations.extend(loc_certs)

    # Pairing: interior members must be saturated by a matching among members.
    members = sorted(pts)
    required = [v for v in members if v in interior_set]
    paired: bool | None
    stranded = [
        v for v in required if not any(n in pts for n in neighbors(v))
    ]
    if stranded:
        paired = False
        for v in stranded:
            violations.append(
                ViolationCertificate("unpairable", (v,), detail="no adjacent member")
            )
    else:
        g = nx.Graph()
        g.add_nodes_from(members)
        for i, v in enumerate(members):
            for w in members[i + 1:]:
                if chebyshev(v, w) == 1:
                    g.add_edge(v, w, weight=(v in interior_set) + (w in interior_set))
        mates = nx.max_weight_matching(g)
        saturated = {v for e in mates for v in e}
        paired = True if all(v in saturated for v in required) else None

    return VerificationReport(
        dominating=dominating,
        locating=locating,
        paired=paired,
        violations=violations,
        density=window.density,
    )
