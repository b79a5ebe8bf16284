"""Point classes over the tiling, coordinate changes, regions, and sampling.

The countable class Q is the set of all jump-segment midpoints of all placed
copies; the co-countable class P is kept symbolic, as the complement of all
copy images, and queried through exact membership predicates. The arctan
compression and the fan map are the only places floating point appears, and
nothing computed there flows back into exact set definitions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DepthInsufficient, NotInCantor, NotOrdered, NotSpanning, UnknownCopy
from .exact import Address, cantor_member, endpoint_one, endpoint_zero, rational_to_str
from .tiling import ConstructionState, pointwise_below, vertical_trace

Point = tuple[Fraction, Fraction]


def xi_map(point: tuple[Fraction | float, Fraction | float]) -> tuple[Fraction | float, float]:
    """Compress the second coordinate into (0, 1) via arctan; floating.

    Strictly increasing in r; the first coordinate passes through unchanged.
    Rendering/sampling boundary only.
    """
    c, r = point
    return (c, math.atan(float(r)) / math.pi + 0.5)


def nabla_map(point: tuple[Fraction | float, Fraction | float]) -> tuple[Fraction | float, Fraction | float]:
    """The fan map (c, y) -> ((y(2c - 1) + 1) / 2, y); exact on exact inputs.

    Collapses the whole y = 0 slice to the vertex (1/2, 0) and is injective
    above it.
    """
    c, y = point
    if isinstance(c, Fraction) and isinstance(y, Fraction):
        return ((y * (2 * c - 1) + 1) / 2, y)
    cf, yf = float(c), float(y)
    return ((yf * (2 * cf - 1) + 1) / 2, yf)


def fan_point(point: tuple[Fraction | float, Fraction | float]) -> tuple[float, float]:
    """nabla after xi, as floats: the rendered/fan position of a model point."""
    c, y = xi_map(point)
    x, y = nabla_map((float(c), y))
    return (float(x), float(y))

VERTEX = (0.5, 0.0)


@dataclass(frozen=True)
class QPoint:
    copy_id: int
    jump_index: int
    point: Point


class SpaceModel:
    """A construction state with its derived countable point class."""

    def __init__(self, state: ConstructionState):
        self.state = state
        self.q_points: list[QPoint] = []
        for cid, copy in enumerate(state.copies):
            for m in range(state.n_jumps):
                self.q_points.append(QPoint(cid, m, copy.midpoint_global(m)))
        self._q_index: dict[Point, QPoint] = {qp.point: qp for qp in self.q_points}

    def classify(self, point: Point) -> str:
        """'Q', 'P', or 'not-in-Y' (the point lies on a copy off its midpoint)."""
        c, _ = point
        if not (0 <= c <= 1) or not cantor_member(c):
            raise NotInCantor(f"{c} is not in the Cantor set")
        if point in self._q_index:
            return "Q"
        for cid in self.state.spanning_ids(c):
            if self.state.copies[cid].classify(point) == "on":
                return "not-in-Y"
        return "P"

    def in_y(self, point: Point) -> bool:
        return self.classify(point) != "not-in-Y"

    def owner_of(self, point: Point) -> QPoint | None:
        return self._q_index.get(point)


def assemble(state: ConstructionState) -> SpaceModel:
    """Derive the countable class and membership predicates from a state."""
    return SpaceModel(state)


@dataclass(frozen=True)
class Region:
    """A basis region with its finite exact boundary point set.

    kind 'betweenCopies': the open set of Y-points strictly between two
    vertically ordered copies over one column. kind 'belowCopies': Y-points
    below a finite family of copies whose columns cover C.
    """

    kind: str
    column: Address | None
    supports: tuple[int, ...]
    boundary: tuple[Point, ...]
    model: SpaceModel = field(repr=False, compare=False)

    def contains(self, point: Point) -> bool:
        c, h = point
        if not (0 <= c <= 1) or not cantor_member(c):
            return False
        if self.kind == "betweenCopies":
            if not (endpoint_zero(self.column) <= c <= endpoint_one(self.column)):
                return False
            lower = self.model.state.copies[self.supports[0]]
            upper = self.model.state.copies[self.supports[1]]
            below_top = lower.fiber(c)[2]
            above_bot = upper.fiber(c)[1]
            if not below_top < h < above_bot:
                return False
            return self.model.in_y(point)
        if self.kind == "belowCopies":
            for cid in self.supports:
                copy = self.model.state.copies[cid]
                if copy.spans(c):
                    if not h < copy.fiber(c)[1]:
                        return False
                    return self.model.in_y(point)
            return False
        raise ValueError(f"unknown region kind {self.kind}")


def region_between(model: SpaceModel, lower_id: int, upper_id: int, column: Address) -> Region:
    """The Y-points strictly between two copies over one column.

    The boundary within Y is exactly the midpoint images of the two copies
    over the column: every such midpoint is a two-sided limit of region
    points, and no other Y-point lies on the region's frontier.
    """
    state = model.state
    try:
        lower, upper = state.copies[lower_id], state.copies[upper_id]
    except IndexError as exc:
        raise UnknownCopy(str(exc)) from exc
    left, right = endpoint_zero(column), endpoint_one(column)
    for copy in (lower, upper):
        if not copy.rect.address.is_prefix_of(column):
            raise NotSpanning(f"copy {copy.key} does not span column {column}")
    if not pointwise_below(lower, upper, left, right):
        raise NotOrdered(
            f"copy {lower.key} is not strictly below copy {upper.key} over {column}"
        )
    boundary: list[Point] = []
    for cid in (lower_id, upper_id):
        copy = state.copies[cid]
        for c, mid in copy.midpoints_global():
            if left <= c <= right:
                boundary.append((c, mid))
    return Region("betweenCopies", column, (lower_id, upper_id), tuple(boundary), model)


def _rational_at_most_tan(eps: Fraction) -> Fraction:
    """An exact rational lower bound for tan(pi (eps - 1/2)).

    eps = 1/2 maps to exactly 0; otherwise a float evaluation minus a guard
    margin is floored onto a dyadic grid. Any rational at or below the true
    value is sound (it only shrinks the neighborhood), so one-sided float
    error is acceptable here.
    """
    if eps == Fraction(1, 2):
        return Fraction(0)
    approx = math.tan(math.pi * (float(eps) - 0.5))
    guarded = approx - max(1e-9, abs(approx) * 1e-12)
    scale = 2 ** 40
    return Fraction(math.floor(guarded * scale), scale)


def vertex_neighborhood(model: SpaceModel, eps: Fraction) -> Region:
    """A below-copies region realizing a small fan neighborhood of the vertex.

    Finds a finite cover of C by columns of copies lying entirely below the
    rational bound r <= tan(pi (eps - 1/2)); per covered column the highest
    qualifying copy is chosen. DepthInsufficient when no such cover exists
    at the built depth.
    """
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    state = model.state
    r_bound = _rational_at_most_tan(eps)
    best: dict[tuple[int, ...], int] = {}
    for cid, copy in enumerate(state.copies):
        if copy.max_height < r_bound:
            bits = copy.rect.address.bits
            cur = best.get(bits)
            if cur is None or copy.max_height > state.copies[cur].max_height:
                best[bits] = cid

    chosen: list[int] = []

    def cover(bits: tuple[int, ...]) -> None:
        if bits in best:
            chosen.append(best[bits])
            return
        if len(bits) >= state.depth:
            raise DepthInsufficient(
                f"no copy below {r_bound} over column '{''.join(map(str, bits))}'"
                f" at depth {state.depth}"
            )
        cover(bits + (0,))
        cover(bits + (1,))

    cover(())
    boundary: list[Point] = []
    for cid in chosen:
        boundary.extend(state.copies[cid].midpoints_global())
    return Region("belowCopies", None, tuple(chosen), tuple(boundary), model)


@dataclass
class CloudPoint:
    tag: str  # vertex | q | p-sample
    xy: tuple[float, float]
    source: Point | None


class PointCloud:
    """Deterministic floating sample of the fan image of the model."""

    def __init__(self, points: list[CloudPoint]):
        self.points = points

    def __len__(self) -> int:
        return len(self.points)

    def coordinates(self) -> list[tuple[float, float]]:
        return [p.xy for p in self.points]

    def to_csv(self) -> str:
        lines = ["x,y,tag"]
        for p in self.points:
            lines.append(f"{p.xy[0]:.17g},{p.xy[1]:.17g},{p.tag}")
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "points": [
                {
                    "tag": p.tag,
                    "x": f"{p.xy[0]:.17g}",
                    "y": f"{p.xy[1]:.17g}",
                    "source": None
                    if p.source is None
                    else [rational_to_str(p.source[0]), rational_to_str(p.source[1])],
                }
                for p in self.points
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":")) + "\n"


def sample_points(model: SpaceModel, grid_depth: int, fiber_count: int) -> PointCloud:
    """The vertex, every Q-point, and per-fiber P-samples, in fan coordinates.

    Fibers are the Cantor endpoints at `grid_depth`; each contributes the
    midpoints of its `fiber_count` longest trace gaps (ties broken low
    first). All choices are exact, so the cloud is deterministic.
    """
    state = model.state
    if grid_depth < state.depth:
        raise ValueError("grid_depth must be at least the construction depth")
    points: list[CloudPoint] = [CloudPoint("vertex", VERTEX, None)]
    for qp in model.q_points:
        points.append(CloudPoint("q", fan_point(qp.point), qp.point))
    fibers: list[Fraction] = []
    for bits in _all_bits(grid_depth):
        sigma = Address(bits)
        fibers.append(endpoint_zero(sigma))
        fibers.append(endpoint_one(sigma))
    fibers = sorted(set(fibers))
    lo, hi = state.range_low, state.range_high
    for c in fibers:
        if any(state.copies[cid].dset.table.pos_if_jump(state.copies[cid].to_local_c(c)) is not None
               for cid in state.spanning_ids(c)):
            continue  # jump column; cannot happen for endpoints, kept as a guard
        crossings = [h for h, _ in vertical_trace(state, c, lo, hi)]
        gaps: list[tuple[Fraction, Fraction, Fraction]] = []
        cursor = lo
        for h in crossings:
            if h > cursor:
                gaps.append((h - cursor, cursor, h))
            cursor = h
        if hi > cursor:
            gaps.append((hi - cursor, cursor, hi))
        gaps.sort(key=lambda g: (-g[0], g[1]))
        for length, g_lo, g_hi in gaps[:fiber_count]:
            mid = (g_lo + g_hi) / 2
            points.append(CloudPoint("p-sample", fan_point((c, mid)), (c, mid)))
    return PointCloud(points)


def _all_bits(length: int):
    import itertools

    return itertools.product((0, 1), repeat=length)


def fiber_isolation_witnesses(model: SpaceModel) -> list[tuple[QPoint, str]]:
    """Violations of Q-point fiber isolation; empty on a sound strict build.

    For each Q-point the owning jump segment minus its midpoint must carry
    no Y-point: the owner's segment points are excluded from Y by
    construction, so the check is that no *other* copy meets the closed
    segment.
    """
    state = model.state
    bad: list[tuple[QPoint, str]] = []
    for qp in model.q_points:
        owner = state.copies[qp.copy_id]
        c = qp.point[0]
        jump = owner.dset.table.jump_by_index(qp.jump_index)
        seg_lo, seg_hi = owner.to_global_h(jump.low), owner.to_global_h(jump.high)
        for cid in state.spanning_ids(c):
            if cid == qp.copy_id:
                continue
            kind, lo, hi = state.copies[cid].fiber(c)
            if hi >= seg_lo and lo <= seg_hi:
                bad.append((qp, f"copy {state.copies[cid].key} meets segment on {c}"))
    return bad


def fset_columns(model: SpaceModel, band_lo: Fraction, band_hi: Fraction) -> list[Fraction]:
    """Columns whose whole fiber across the band is covered by one jump segment.

    These are the only columns where the band meets Y in Q-points alone
    (single points cannot cover an interval, and distinct copies' segments
    do not overlap), so the set is finite: one candidate per jump segment
    containing the band.
    """
    if not band_lo < band_hi:
        raise ValueError("need band_lo < band_hi")
    out: list[Fraction] = []
    for copy in model.state.copies:
        for c, lo, hi in copy.jumps_global():
            if lo <= band_lo and band_hi <= hi:
                out.append(c)
    return sorted(set(out))
