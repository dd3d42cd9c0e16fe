"""Exact minimum-cardinality search over periodic patterns on a fixed lattice.

The search assigns membership to the residues of the fundamental domain in
row-major order, deepening over even target cardinalities, so the first
feasible cardinality is the exact minimum.  Constraint checks fire at
deadlines: the last residue index on which a constraint depends.  Domination
and locating checks are exact at their deadlines (separation of a vertex pair
is translation invariant, so one representative per pair orbit suffices);
pairing is enforced by a necessary isolation check during search and settled
by full verification at leaves.  A matching is required at the pattern's own
period (no lattice refinement), which keeps search and oracle answers
directly comparable.

Odd cardinalities are skipped outright: members are perfectly matched inside
the fundamental domain, so their count per domain is even.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .grid import chebyshev, closed_neighborhood, neighbors
from .pattern import (
    LatticeBasis,
    PeriodicPattern,
    serialize_pattern,
    translation_canonical,
)
from .verify import verify_lpds

MAX_DOMAIN = 64
MAX_ORACLE_DOMAIN = 16


@dataclass(frozen=True)
class SearchConfig:
    basis: LatticeBasis
    max_cardinality: int | None = None
    symmetry_reduction: bool = True
    node_budget: int | None = None
    workers: int = 1
    allow_large: bool = False


@dataclass
class SearchResult:
    status: str  # "optimumFound" | "infeasible" | "budgetExceeded"
    min_cardinality: int | None
    min_density: Fraction | None
    optima: tuple[PeriodicPattern, ...]
    nodes_explored: int
    reason: str | None = None

    def summary_line(self) -> str:
        if self.status == "optimumFound":
            d = self.min_density
            return (
                f"optimum k={self.min_cardinality}"
                f" density={d.numerator}/{d.denominator}"
                f" patterns={len(self.optima)} nodes={self.nodes_explored}"
            )
        if self.status == "infeasible":
            return f"infeasible {self.reason} nodes={self.nodes_explored}"
        return f"budget-exceeded nodes={self.nodes_explored}"


# ---------------------------------------------------------------------------
# constraint tables
# ---------------------------------------------------------------------------

_BALL2_POSITIVE = tuple(
    (dx, dy)
    for dx in range(-2, 3)
    for dy in range(-2, 3)
    if (dx, dy) > (0, 0)
)


@lru_cache(maxsize=64)
def _tables(basis: LatticeBasis):
    domain = basis.domain_cells()
    index = {c: i for i, c in enumerate(domain)}
    n = len(domain)

    def red(p) -> int:
        return index[basis.reduce(p)]

    dom_dl: list[list[int]] = [[] for _ in range(n)]
    for c in domain:
        mask = 0
        for p in closed_neighborhood(c):
            mask |= 1 << red(p)
        dom_dl[mask.bit_length() - 1].append(mask)

    loc_dl: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for u in domain:
        ui = index[u]
        for d in _BALL2_POSITIVE:
            w = (u[0] + d[0], u[1] + d[1])
            wi = red(w)
            if wi == ui:
                continue
            sep = 0
            for p in set(neighbors(u)) ^ set(neighbors(w)):
                sep |= 1 << red(p)
            pair_mask = (1 << ui) | (1 << wi)
            if (pair_mask, sep) in seen:
                continue
            seen.add((pair_mask, sep))
            deadline = max(ui, wi, sep.bit_length() - 1)
            loc_dl[deadline].append((pair_mask, sep))

    pair_dl: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for c in domain:
        ci = index[c]
        nbr = 0
        internal = False
        for p in neighbors(c):
            pi = red(p)
            if pi == ci:
                internal = True
                break
            nbr |= 1 << pi
        if internal:
            continue
        deadline = max(ci, nbr.bit_length() - 1)
        pair_dl[deadline].append((1 << ci, nbr))

    return domain, dom_dl, loc_dl, pair_dl


# ---------------------------------------------------------------------------
# fixed-cardinality DFS
# ---------------------------------------------------------------------------

class _BudgetHit(Exception):
    pass


@dataclass
class _KSearch:
    basis: LatticeBasis
    k: int
    symmetry: bool
    node_budget: int | None = None
    base_nodes: int = 0
    nodes: int = 0
    solutions: list[tuple] = field(default_factory=list)
    cut_depth: int | None = None
    frontier: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        self.domain, self.dom_dl, self.loc_dl, self.pair_dl = _tables(self.basis)
        self.n = len(self.domain)

    def _alive(self, pos: int, in_mask: int, out_mask: int) -> bool:
        for m in self.dom_dl[pos]:
            if not in_mask & m:
                return False
        for pair_mask, sep in self.loc_dl[pos]:
            if (out_mask & pair_mask) == pair_mask and not in_mask & sep:
                return False
        for cbit, nbr in self.pair_dl[pos]:
            if in_mask & cbit and not in_mask & nbr:
                return False
        return True

    def _leaf(self, in_mask: int) -> None:
        base = tuple(self.domain[i] for i in range(self.n) if (in_mask >> i) & 1)
        pattern = PeriodicPattern.make(self.basis, base)
        if verify_lpds(pattern, allow_refinement=False).valid:
            self.solutions.append(base)

    def _dfs(self, pos: int, in_mask: int, out_mask: int, count: int) -> None:
        self.nodes += 1
        if (
            self.node_budget is not None
            and self.base_nodes + self.nodes > self.node_budget
        ):
            raise _BudgetHit
        if pos == self.n:
            if count == self.k:
                self._leaf(in_mask)
            return
        if count + (self.n - pos) < self.k:
            return
        if self.cut_depth is not None and pos == self.cut_depth:
            self.frontier.append((pos, in_mask, out_mask, count))
            return
        self.branch(pos, in_mask, out_mask, count)

    def branch(self, pos: int, in_mask: int, out_mask: int, count: int) -> None:
        if count < self.k:
            im = in_mask | (1 << pos)
            if self._alive(pos, im, out_mask):
                self._dfs(pos + 1, im, out_mask, count + 1)
        if not (self.symmetry and pos == 0):
            om = out_mask | (1 << pos)
            if self._alive(pos, in_mask, om):
                self._dfs(pos + 1, in_mask, om, count)

    def run(self) -> None:
        self._dfs(0, 0, 0, 0)


def _search_unit(args) -> tuple[int, list[tuple]]:
    u, v, k, symmetry, state = args
    sub = _KSearch(LatticeBasis(u, v), k, symmetry)
    sub.branch(*state)
    return sub.nodes, sub.solutions


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _collect_optima(
    basis: LatticeBasis, bases: list[tuple]
) -> tuple[PeriodicPattern, ...]:
    canon: dict[str, PeriodicPattern] = {}
    for base in bases:
        tc = translation_canonical(PeriodicPattern.make(basis, base))
        canon[serialize_pattern(tc)] = tc
    return tuple(canon[key] for key in sorted(canon))


def minimum_lpds(config: SearchConfig) -> SearchResult:
    """Find the minimum members-per-domain over patterns with this lattice.

    Returns every optimum up to translation.  With ``symmetry_reduction`` the
    first residue is forced in, which loses no translation class because any
    nonempty pattern can be translated to occupy residue zero.
    """
    basis = config.basis
    cells = basis.cells
    if cells > MAX_DOMAIN and not config.allow_large:
        raise ValueError(
            f"fundamental domain has {cells} cells; beyond {MAX_DOMAIN} pass"
            " allow_large=True"
        )
    limit = cells if config.max_cardinality is None else min(config.max_cardinality, cells)

    workers = max(1, config.workers)
    if config.node_budget is not None:
        workers = 1  # keep the budget and the node count exact

    nodes_total = 0
    for k in range(2, limit + 1, 2):
        top = _KSearch(
            basis,
            k,
            config.symmetry_reduction,
            node_budget=config.node_budget,
            base_nodes=nodes_total,
        )
        try:
            if workers > 1:
                top.cut_depth = max(1, min(top.n - 1, 8))
                top.run()
                units = [
                    (basis.u, basis.v, k, config.symmetry_reduction, state)
                    for state in top.frontier
                ]
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    for sub_nodes, sub_solutions in pool.map(
                        _search_unit, units, chunksize=8
                    ):
                        top.nodes += sub_nodes
                        top.solutions.extend(sub_solutions)
            else:
                top.run()
        except _BudgetHit:
            return SearchResult(
                "budgetExceeded",
                None,
                None,
                (),
                nodes_total + top.nodes,
                reason=f"node budget {config.node_budget} exhausted",
            )
        nodes_total += top.nodes
        if top.solutions:
            optima = _collect_optima(basis, top.solutions)
            return SearchResult(
                "optimumFound",
                k,
                Fraction(k, cells),
                optima,
                nodes_total,
            )
    return SearchResult(
        "infeasible",
        None,
        None,
        (),
        nodes_total,
        reason=f"no valid pattern with at most {limit} members per domain",
    )


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def brute_force_oracle(
    basis: LatticeBasis, max_cardinality: int | None = None
) -> SearchResult:
    """Reference answer by checking every even-size subset, smallest first.

    Deliberately structure-free so it shares no pruning logic with
    ``minimum_lpds``; restricted to tiny domains.
    """
    cells = basis.cells
    if cells > MAX_ORACLE_DOMAIN:
        raise ValueError(
            f"oracle limited to {MAX_ORACLE_DOMAIN} cells, basis has {cells}"
        )
    domain = basis.domain_cells()
    limit = cells if max_cardinality is None else min(max_cardinality, cells)
    examined = 0
    for k in range(2, limit + 1, 2):
        found: list[tuple] = []
        for combo in itertools.combinations(domain, k):
            examined += 1
            pattern = PeriodicPattern.make(basis, combo)
            if verify_lpds(pattern, allow_refinement=False).valid:
                found.append(combo)
        if found:
            return SearchResult(
                "optimumFound",
                k,
                Fraction(k, cells),
                _collect_optima(basis, found),
                examined,
            )
    return SearchResult(
        "infeasible",
        None,
        None,
        (),
        examined,
        reason=f"no valid pattern with at most {limit} members per domain",
    )
