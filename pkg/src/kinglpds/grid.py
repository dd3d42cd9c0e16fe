"""King-grid geometry.

Vertices are integer points; two vertices are adjacent exactly when their
Euclidean distance is at most sqrt(2), i.e. when their Chebyshev distance is 1.
Graph distance on this grid coincides with Chebyshev distance, so the distance-k
ball is the (2k+1) x (2k+1) square.
"""

from __future__ import annotations

Point = tuple[int, int]

_NEIGHBOR_STEPS: tuple[Point, ...] = (
    (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1),
)
_DIAGONAL_STEPS: tuple[Point, ...] = ((-1, -1), (-1, 1), (1, -1), (1, 1))


def chebyshev(p: Point, q: Point) -> int:
    """Chebyshev distance; equals the graph distance on the king grid."""
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def adjacent(p: Point, q: Point) -> bool:
    return chebyshev(p, q) == 1


def neighbors(p: Point) -> set[Point]:
    """The 8 vertices at Chebyshev distance exactly 1 from p."""
    x, y = p
    return {(x + dx, y + dy) for dx, dy in _NEIGHBOR_STEPS}


def closed_neighborhood(p: Point) -> set[Point]:
    out = neighbors(p)
    out.add(p)
    return out


def k_neighborhood(p: Point, k: int) -> set[Point]:
    """All vertices at graph distance <= k: a square with (2k+1)^2 points."""
    if k < 0:
        raise ValueError("k must be >= 0")
    x, y = p
    return {(x + dx, y + dy) for dx in range(-k, k + 1) for dy in range(-k, k + 1)}


def sqrt2_neighbors(p: Point) -> set[Point]:
    """The 4 diagonal neighbors of p (Euclidean distance sqrt(2))."""
    x, y = p
    return {(x + dx, y + dy) for dx, dy in _DIAGONAL_STEPS}


def opposite_sqrt2(p: Point, q: Point) -> Point:
    """The diagonal neighbor of p opposite to q.

    q must be a diagonal neighbor of p; the result is the unique diagonal
    neighbor of p at Euclidean distance 2*sqrt(2) from q.
    """
    if q not in sqrt2_neighbors(p):
        raise ValueError(f"{q} is not a diagonal neighbor of {p}")
    return (2 * p[0] - q[0], 2 * p[1] - q[1])


def common_neighbors(p: Point, q: Point) -> set[Point]:
    return neighbors(p) & neighbors(q)
