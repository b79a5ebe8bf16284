"""Deterministic SVG emission of the construction's figures.

Exact rational geometry is converted to decimal only at emission, at a
fixed precision of twelve digits, and elements are written in a fixed order
(stage, then index, then piece position), so equal inputs produce byte
identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .decomp import Earring
from .errors import UnknownFigure
from .exact import addresses_of_length, endpoint_one, endpoint_zero
from .spaceset import fan_point
from .tiling import ConstructionState, PlacedCopy
from .verify import stage_fan_diameters

PRECISION = 12
FIGURE_KINDS = ("tiling", "fan", "earring")


def _fmt(x: float) -> str:
    s = f"{x:.{PRECISION}f}"
    return s


@dataclass(frozen=True)
class RenderOptions:
    """Rendering knobs; the Cantor drawing depth is visual only."""

    width: int = 900
    height: int = 600
    margin: int = 20
    stage_low: int = 0
    stage_high: int | None = None
    draw_rects: bool = True
    draw_copies: bool = True
    draw_midpoints: bool = False
    cantor_depth: int = 6
    stroke_rect: float = 0.8
    stroke_copy: float = 1.2


def default_options() -> RenderOptions:
    return RenderOptions()


class _Canvas:
    """Maps model coordinates into the SVG viewport (y grows downward)."""

    def __init__(self, opts: RenderOptions, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        self.opts = opts
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo, y_hi
        self.sx = (opts.width - 2 * opts.margin) / (x_hi - x_lo)
        self.sy = (opts.height - 2 * opts.margin) / (y_hi - y_lo)

    def x(self, v: float) -> str:
        return _fmt(self.opts.margin + (v - self.x_lo) * self.sx)

    def y(self, v: float) -> str:
        return _fmt(self.opts.margin + (self.y_hi - v) * self.sy)

    def line(self, x1, y1, x2, y2, cls: str, width: float) -> str:
        return (
            f'<line class="{cls}" x1="{self.x(x1)}" y1="{self.y(y1)}" '
            f'x2="{self.x(x2)}" y2="{self.y(y2)}" stroke-width="{width}" />'
        )

    def rect(self, x1, y1, x2, y2, cls: str, width: float) -> str:
        return (
            f'<rect class="{cls}" x="{self.x(x1)}" y="{self.y(y2)}" '
            f'width="{_fmt((x2 - x1) * self.sx)}" height="{_fmt((y2 - y1) * self.sy)}" '
            f'stroke-width="{width}" fill="none" />'
        )

    def circle(self, x, y, r: float, cls: str) -> str:
        return f'<circle class="{cls}" cx="{self.x(x)}" cy="{self.y(y)}" r="{_fmt(r)}" />'


def _document(opts: RenderOptions, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opts.width}" height="{opts.height}" '
        f'viewBox="0 0 {opts.width} {opts.height}" version="1.1">\n'
        "<style>line,rect,circle,path{stroke:#1a1a1a}.frame{stroke:#888}"
        ".rect{stroke:#b55}.copy{stroke:#137}.spoke{stroke:#bbb}"
        ".vertex{fill:#d22}.midpoint{fill:#d22}.qpoint{fill:#d22}.loop{fill:none}</style>\n"
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _cantor_segments(lo: Fraction, hi: Fraction, depth: int) -> list[tuple[Fraction, Fraction]]:
    """Depth-`depth` basic intervals clipped to [lo, hi], left to right."""
    out = []
    for sigma in addresses_of_length(depth):
        left, right = endpoint_zero(sigma), endpoint_one(sigma)
        a, b = max(left, lo), min(right, hi)
        if a <= b:
            out.append((a, b))
    return out


def _stage_range(state: ConstructionState, opts: RenderOptions) -> range:
    hi = state.depth if opts.stage_high is None else min(opts.stage_high, state.depth)
    return range(max(opts.stage_low, 0), hi + 1)


def render_tiling(state: ConstructionState, options: RenderOptions | None = None) -> str:
    """C x R view: rectangle outlines (stages >= 1) and the copy images.

    The stage-0 rectangle is the ambient frame of the picture and is drawn
    as the background border rather than as a tiling outline.
    """
    opts = options or default_options()
    stages = _stage_range(state, opts)
    y_lo = float(-max(stages.stop - 1, 0)) - 0.25 if stages else -0.25
    y_hi = float(max(stages.stop - 1, 0) + 1) + 0.25 if stages else 1.25
    canvas = _Canvas(opts, -0.05, 1.05, y_lo, y_hi)
    body = [canvas.rect(0.0, 0.0, 1.0, 1.0, "frame", 0.6)]
    if opts.draw_rects:
        for stage in state.stages:
            if stage.n not in stages or stage.n == 0:
                continue
            for rect in stage.rects:
                body.append(
                    canvas.rect(
                        float(rect.left),
                        float(rect.bottom),
                        float(rect.right),
                        float(rect.top),
                        "rect",
                        opts.stroke_rect,
                    )
                )
    if opts.draw_copies:
        for stage in state.stages:
            if stage.n not in stages:
                continue
            for copy in stage.copies:
                body.append(f'<g class="copy" id="copy-{copy.stage}-{copy.index}">')
                depth = max(opts.cantor_depth - copy.stage, 0)
                for lo, hi, v in copy.plateaus_global():
                    for a, b in _plateau_segments(copy, lo, hi, depth):
                        body.append(
                            canvas.line(float(a), float(v), float(b), float(v), "copy", opts.stroke_copy)
                        )
                for c, lo, hi in copy.jumps_global():
                    body.append(
                        canvas.line(float(c), float(lo), float(c), float(hi), "copy", opts.stroke_copy)
                    )
                body.append("</g>")
                if opts.draw_midpoints:
                    for c, mid in copy.midpoints_global():
                        body.append(canvas.circle(float(c), float(mid), 1.6, "midpoint"))
    return _document(opts, body)


def _plateau_segments(copy: PlacedCopy, lo: Fraction, hi: Fraction, depth: int):
    """Visible sub-segments of one plateau at the configured drawing depth."""
    if lo == hi:
        return [(lo, hi)]
    local_lo, local_hi = copy.to_local_c(lo), copy.to_local_c(hi)
    return [
        (copy.to_global_c(a), copy.to_global_c(b))
        for a, b in _cantor_segments(local_lo, local_hi, depth)
        if a < b
    ]


def render_fan(state: ConstructionState, options: RenderOptions | None = None) -> str:
    """Fan view: spokes, the vertex, copy images and midpoints through the fan map."""
    opts = options or default_options()
    canvas = _Canvas(opts, -0.05, 1.05, -0.05, 1.05)
    body = ['<g class="spokes">']
    spoke_cs: list[Fraction] = []
    for sigma in addresses_of_length(min(opts.cantor_depth, 8)):
        spoke_cs.extend((endpoint_zero(sigma), endpoint_one(sigma)))
    for c in sorted(set(spoke_cs)):
        # nabla maps the top corner (c, 1) to (c, 1): spokes end at the top edge
        body.append(canvas.line(0.5, 0.0, float(c), 1.0, "spoke", 0.5))
    body.append("</g>")
    stages = _stage_range(state, opts)
    for stage in state.stages:
        if stage.n not in stages:
            continue
        for copy in stage.copies:
            body.append(f'<g class="copy" id="copy-{copy.stage}-{copy.index}">')
            depth = max(opts.cantor_depth - copy.stage, 0)
            for lo, hi, v in copy.plateaus_global():
                for a, b in _plateau_segments(copy, lo, hi, depth):
                    pa, pb = fan_point((a, v)), fan_point((b, v))
                    body.append(canvas.line(pa[0], pa[1], pb[0], pb[1], "copy", opts.stroke_copy))
            for c, lo, hi in copy.jumps_global():
                pa, pb = fan_point((c, lo)), fan_point((c, hi))
                body.append(canvas.line(pa[0], pa[1], pb[0], pb[1], "copy", opts.stroke_copy))
            body.append("</g>")
            if opts.draw_midpoints:
                for c, mid in copy.midpoints_global():
                    p = fan_point((c, mid))
                    body.append(canvas.circle(p[0], p[1], 1.4, "qpoint"))
    diameters = {str(k): f"{v:.9f}" for k, v in sorted(stage_fan_diameters(state).items())}
    body.append(
        "<metadata>" + json.dumps({"stage_fan_diameters": diameters}, sort_keys=True) + "</metadata>"
    )
    body.append(canvas.circle(0.5, 0.0, 3.0, "vertex"))
    return _document(opts, body)


def render_earring(earring: Earring, options: RenderOptions | None = None) -> str:
    """Loops as tangent circles through one base point, scaled by exact height."""
    opts = options or default_options()
    if not earring.loops:
        return _document(opts, [])
    scale = max(float(loop.height) for loop in earring.loops)
    canvas = _Canvas(opts, -0.1, 1.1, -0.65, 0.65)
    body = [f'<g class="earring" id="earring-{earring.copy_key.replace(":", "-")}">']
    for loop in earring.loops:
        radius = float(loop.height) / scale / 2
        body.append(
            f'<circle class="loop" cx="{canvas.x(radius)}" cy="{canvas.y(0.0)}" '
            f'r="{_fmt(radius * canvas.sx)}" stroke-width="1.0" />'
        )
    body.append("</g>")
    body.append(canvas.circle(0.0, 0.0, 2.5, "vertex"))
    return _document(opts, body)


def render_figure(state: ConstructionState, kind: str, options: RenderOptions | None = None,
                  earring: Earring | None = None) -> str:
    if kind == "tiling":
        return render_tiling(state, options)
    if kind == "fan":
        return render_fan(state, options)
    if kind == "earring":
        if earring is None:
            raise ValueError("earring figure needs an earring")
        return render_earring(earring, options)
    raise UnknownFigure(f"unknown figure kind {kind!r} (known: {', '.join(FIGURE_KINDS)})")


def figure_filename(kind: str, depth: int, n_jumps: int) -> str:
    return f"figure-{kind}-K{depth}-N{n_jumps}.svg"
