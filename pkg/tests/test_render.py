import xml.etree.ElementTree as ET
import pytest

from fanforge import build
from fanforge.decomp import collapse_E
from fanforge.errors import UnknownFigure
from fanforge.render import (
    RenderOptions,
    figure_filename,
    render_earring,
    render_fan,
    render_figure,
    render_tiling,
)
from fanforge.spaceset import assemble

SVG = "{http://www.w3.org/2000/svg}"


def _classes(doc, tag, cls):
    root = ET.fromstring(doc)
    return [el for el in root.iter(f"{SVG}{tag}") if el.get("class") == cls]


class TestTiling:
    def test_counts_at_depth_one(self, st_1_4):
        doc = render_tiling(st_1_4)
        assert len(_classes(doc, "rect", "rect")) == 12
        root = ET.fromstring(doc)
        groups = [g for g in root.iter(f"{SVG}g") if g.get("class") == "copy"]
        assert len(groups) == 13

    def test_byte_determinism(self, st_1_4):
        assert render_tiling(st_1_4) == render_tiling(st_1_4)

    def test_empty_stage_range_is_background_only(self, st_1_4):
        opts = RenderOptions(stage_low=2, stage_high=1)
        doc = render_tiling(st_1_4, opts)
        assert len(_classes(doc, "rect", "frame")) == 1
        assert len(_classes(doc, "rect", "rect")) == 0
        root = ET.fromstring(doc)
        assert not [g for g in root.iter(f"{SVG}g") if g.get("class") == "copy"]

    def test_midpoint_markers_optional(self, st_1_4):
        plain = render_tiling(st_1_4)
        marked = render_tiling(st_1_4, RenderOptions(draw_midpoints=True))
        assert len(_classes(plain, "circle", "midpoint")) == 0
        assert len(_classes(marked, "circle", "midpoint")) == 13 * 4

    def test_no_nan_coordinates(self, st_1_4):
        assert "nan" not in render_tiling(st_1_4).lower()


class TestFan:
    def test_vertex_marker_present(self, st_1_4):
        doc = render_fan(st_1_4)
        vertices = _classes(doc, "circle", "vertex")
        assert len(vertices) == 1

    def test_spoke_through_column_one(self, st_1_4):
        # the spoke to c = 1 runs from the vertex to the top-right corner
        opts = RenderOptions(cantor_depth=1, width=1000, height=1000, margin=0)
        doc = render_fan(st_1_4, opts)
        root = ET.fromstring(doc)
        spokes = [l for l in root.iter(f"{SVG}line") if l.get("class") == "spoke"]
        assert len(spokes) == 4  # endpoints of depth-1 intervals: 0, 1/3, 2/3, 1
        ends = {(l.get("x2"), l.get("y2")) for l in spokes}
        top_right = (f"{1000 * (1 + 0.05) / 1.1:.12f}", f"{1000 * 0.05 / 1.1:.12f}")
        assert top_right in ends

    def test_diameter_metadata_embedded(self, st_1_4):
        doc = render_fan(st_1_4)
        assert "stage_fan_diameters" in doc
        assert render_fan(st_1_4) == doc


class TestEarring:
    def test_loop_count_and_monotone_radii(self, model_1_4):
        doc = render_earring(collapse_E(model_1_4, 0))
        loops = _classes(doc, "circle", "loop")
        assert len(loops) == 4
        radii = [float(c.get("r")) for c in loops]
        assert radii == sorted(radii, reverse=True)
        assert all(a > b for a, b in zip(radii, radii[1:]))

    def test_single_loop_single_circle(self):
        model = assemble(build(0, 1))
        doc = render_earring(collapse_E(model, 0))
        assert len(_classes(doc, "circle", "loop")) == 1

    def test_determinism(self, model_1_4):
        e = collapse_E(model_1_4, 0)
        assert render_earring(e) == render_earring(e)


class TestDispatch:
    def test_well_formed_documents(self, st_1_4, model_1_4):
        for doc in (
            render_tiling(st_1_4),
            render_fan(st_1_4),
            render_earring(collapse_E(model_1_4, 0)),
        ):
            ET.fromstring(doc)  # raises on malformed XML

    def test_unknown_figure(self, st_1_4):
        with pytest.raises(UnknownFigure):
            render_figure(st_1_4, "heatmap")

    def test_filename_convention(self):
        assert figure_filename("fan", 2, 16) == "figure-fan-K2-N16.svg"
