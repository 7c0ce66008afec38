"""Exact polygon algebra for Newton and Hodge polygons.

Vertices are exact rationals with strictly increasing abscissae and strictly increasing
slopes (collinear points are merged). Comparisons evaluate both polygons at the union of
their vertex abscissae; the difference of two piecewise-linear functions is linear between
those points, so this is exact for rational as well as integer breakpoints.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import InvalidFunctionError

Point = tuple[Fraction, Fraction]


class WidthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SlopeMultiset:
    """(slope, horizontal length) pairs, slopes ascending and distinct."""

    runs: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def of(cls, slopes: Iterable[Fraction | int]) -> SlopeMultiset:
        """Each listed slope with horizontal length 1."""
        counts: dict[Fraction, Fraction] = {}
        for s in slopes:
            f = Fraction(s)
            counts[f] = counts.get(f, Fraction(0)) + 1
        return cls(tuple(sorted(counts.items())))

    @property
    def width(self) -> Fraction:
        return sum((length for _, length in self.runs), Fraction(0))

    def length_of(self, s: Fraction | int) -> Fraction:
        return dict(self.runs).get(Fraction(s), Fraction(0))

    def to_polygon(self) -> Polygon:
        pts: list[Point] = [(Fraction(0), Fraction(0))]
        for s, length in self.runs:
            x, y = pts[-1]
            pts.append((x + length, y + s * length))
        return Polygon(tuple(pts))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise ValueError("a polygon needs at least one vertex")
        xs = [x for x, _ in self.vertices]
        if any(b <= a for a, b in zip(xs, xs[1:], strict=False)):
            raise ValueError("vertex abscissae must be strictly increasing")
        sl = self._slopes()
        if any(b <= a for a, b in zip(sl, sl[1:], strict=False)):
            raise ValueError("polygon is not lower convex")

    def _slopes(self) -> list[Fraction]:
        v = self.vertices
        return [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(v, v[1:], strict=False)]

    @property
    def width(self) -> Fraction:
        return self.vertices[-1][0] - self.vertices[0][0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def height_at(self, x: Fraction | int) -> Fraction:
        x = Fraction(x)
        v = self.vertices
        if not v[0][0] <= x <= v[-1][0]:
            raise ValueError(f"x={x} outside [{v[0][0]}, {v[-1][0]}]")
        for (x0, y0), (x1, y1) in zip(v, v[1:], strict=False):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return v[-1][1]

    def slopes(self) -> SlopeMultiset:
        v = self.vertices
        runs = tuple(
            ((y1 - y0) / (x1 - x0), x1 - x0)
            for (x0, y0), (x1, y1) in zip(v, v[1:], strict=False)
        )
        return SlopeMultiset(runs)

    def shrink(self, factor: int) -> Polygon:
        """Both axes divided by `factor`."""
        return Polygon(tuple((x / factor, y / factor) for x, y in self.vertices))

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": [
                [x.numerator, x.denominator, y.numerator, y.denominator]
                for x, y in self.vertices
            ]
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Polygon:
        return cls(
            tuple((Fraction(a, b), Fraction(c, d)) for a, b, c, d in data["vertices"])
        )

    def __str__(self) -> str:
        return " ".join(f"({x},{y})" for x, y in self.vertices)


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[tuple[Fraction | int, Fraction | int | None]]) -> Polygon:
    """Greatest lower convex minorant of the finite points; `None` heights are +inf."""
    if not points:
        raise ValueError("lower_hull of an empty point set")
    xs = [Fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("abscissae must be distinct")
    finite = sorted((Fraction(x), Fraction(y)) for x, y in points if y is not None)
    if not finite:
        raise ValueError("lower_hull needs at least one finite point")
    hull: list[Point] = []
    for pt in finite:
        # pop while the turn is not strictly counter-clockwise (merges collinear points)
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return Polygon(tuple(hull))


def hull_of_heights(heights: Sequence[Fraction | int | None]) -> Polygon:
    """lower_hull of (m, heights[m]) for m = 0..n."""
    return lower_hull(list(enumerate(heights)))


def hodge_polygon(ell: int, orders: Sequence[int]) -> Polygon:
    """Slopes 0 and 1 (ell-1 times each) and i/d_j for 1 <= i < d_j, each of length 1."""
    problems = []
    if ell < 1:
        problems.append(f"ell must be >= 1, got {ell}")
    if len(orders) != ell:
        problems.append(f"{len(orders)} pole orders given for ell = {ell}")
    if any(d < 1 for d in orders):
        problems.append("pole orders must be positive")
    if not problems and sum(orders) + ell - 2 < 1:
        problems.append("degree d = sum(d_j) + ell - 2 must be >= 1")
    if problems:
        raise InvalidFunctionError(problems)
    slopes: list[Fraction] = [Fraction(0)] * (ell - 1) + [Fraction(1)] * (ell - 1)
    for d in orders:
        slopes.extend(Fraction(i, d) for i in range(1, d))
    return SlopeMultiset.of(slopes).to_polygon()


def _abscissae(p: Polygon, q: Polygon) -> list[Fraction]:
    if p.vertices[0][0] != q.vertices[0][0] or p.width != q.width:
        raise WidthMismatchError(f"width {p.width} vs {q.width}")
    return sorted({x for x, _ in p.vertices} | {x for x, _ in q.vertices})


def lies_above(p: Polygon, q: Polygon) -> bool:
    return all(p.height_at(x) >= q.height_at(x) for x in _abscissae(p, q))


def max_gap(p: Polygon, q: Polygon) -> Fraction:
    """Largest vertical distance p(x) - q(x)."""
    return max(p.height_at(x) - q.height_at(x) for x in _abscissae(p, q))


def slope_run_length(p: Polygon, s: Fraction | int) -> Fraction:
    return p.slopes().length_of(s)


def is_symmetric(p: Polygon) -> bool:
    """Slope multiset invariant under s -> 1 - s."""
    runs = dict(p.slopes().runs)
    return all(runs.get(1 - s) == length for s, length in runs.items())
