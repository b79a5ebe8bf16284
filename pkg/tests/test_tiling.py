import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fanforge import build
from fanforge.errors import (
    JumpHit,
    NotInCantor,
    StageOrderViolation,
    StateSchemaError,
    TruncationTooCoarse,
)
from fanforge.exact import Address, addresses_of_length, endpoint_one, endpoint_zero
from fanforge.tiling import (
    AffineMap,
    Builder,
    pointwise_below,
    stage_one,
    stage_zero,
    state_from_json_obj,
    vertical_trace,
)

from .oracles import trace_oracle


class TestStageZero:
    def test_single_rect(self):
        stage = stage_zero(4)
        assert len(stage.rects) == 1
        rect = stage.rects[0]
        assert (str(rect.address), rect.bottom, rect.top) == ("", F(0), F(1))

    def test_copy_extremes(self):
        copy = stage_zero(4).copies[0]
        # bottom-left corner of the image is (0, 0)
        assert copy.fiber(F(0)) == ("point", F(0), F(0))
        # truncated maximum: the image tops out at 1 - 2^-N below the rect top
        assert copy.fiber(F(1)) == ("point", F(15, 16), F(15, 16))
        assert copy.max_height == F(15, 16)


class TestStageOne:
    def test_twelve_rects_with_four_jump_values(self):
        stage = stage_one(4)
        assert len(stage.rects) == 12
        got = [(str(r.address), r.bottom, r.top) for r in stage.rects[:4]]
        assert got == [
            ("0", F(29, 32), F(1)),
            ("0", F(13, 16), F(29, 32)),
            ("1", F(13, 32), F(13, 16)),
            ("1", F(0), F(13, 32)),
        ]

    def test_outer_rects_order(self):
        stage = stage_one(4)
        outer = [(str(r.address), r.bottom) for r in stage.rects[4:]]
        assert outer == [
            ("0", F(-1)),
            ("0", F(-1, 2)),
            ("0", F(1)),
            ("0", F(3, 2)),
            ("1", F(-1)),
            ("1", F(-1, 2)),
            ("1", F(1)),
            ("1", F(3, 2)),
        ]

    @pytest.mark.parametrize("n_jumps", [2, 4, 16])
    def test_heights_bounded(self, n_jumps):
        assert all(r.height <= F(1, 2) for r in stage_one(n_jumps).rects)

    def test_needs_two_jumps(self):
        with pytest.raises(ValueError):
            stage_one(1)


class TestVerticalTrace:
    def test_column_zero_stage_zero(self, st_0_4):
        assert vertical_trace(st_0_4, F(0), F(0), F(1)) == [(F(0), 0)]

    def test_column_one_stage_zero(self, st_0_4):
        assert vertical_trace(st_0_4, F(1), F(0), F(1)) == [(F(15, 16), 0)]

    def test_column_one_third_matches_piece_scan_oracle(self, st_1_4):
        got = vertical_trace(st_1_4, F(1, 3), F(-1), F(2))
        assert got == trace_oracle(st_1_4, F(1, 3), F(-1), F(2))
        # frozen values from the oracle: the truncated copies cross at
        assert [h for h, _ in got] == [
            F(-17, 32),
            F(-1, 32),
            F(13, 16),
            F(461, 512),
            F(509, 512),
            F(47, 32),
            F(63, 32),
        ]

    def test_not_in_cantor(self, st_1_4):
        with pytest.raises(NotInCantor):
            vertical_trace(st_1_4, F(1, 2))

    def test_jump_column_raises(self, st_1_4):
        with pytest.raises(JumpHit):
            vertical_trace(st_1_4, F(1, 4))


class TestBuild:
    def test_copy_counts(self, st_0_4, st_1_4):
        assert len(st_0_4.copies) == 1
        assert len(st_1_4.copies) == 13

    def test_determinism_byte_identical(self):
        a = build(2, 8).to_json()
        b = build(2, 8).to_json()
        assert a == b

    def test_truncation_too_coarse(self):
        with pytest.raises(TruncationTooCoarse) as exc:
            build(2, 4)
        assert exc.value.stage == 2
        assert exc.value.suggested_jumps == 6
        assert exc.value.column  # offending column is reported

    def test_tolerant_build_succeeds_below_threshold(self):
        state = build(2, 4, strict=False)
        assert state.depth == 2 and not state.strict

    def test_stage_order_violation(self):
        builder = Builder(3, 16)
        with pytest.raises(StageOrderViolation):
            builder.stage_n(2)

    def test_stage_addresses_and_heights(self, st_2_16):
        for stage in st_2_16.stages:
            for rect in stage.rects:
                assert len(rect.address) == stage.n
                assert 0 < rect.height <= F(1, stage.n + 1)

    def test_stage_two_strips_start_at_minus_two(self, st_2_16):
        # the lowest rect over each depth-2 column starts at the range bottom
        for sigma in addresses_of_length(2):
            bottoms = [
                r.bottom
                for r in st_2_16.stages[2].rects
                if r.address == sigma
            ]
            assert min(bottoms) == F(-2)

    def test_strip_rect_interiors_avoid_inherited_copies(self, st_2_16):
        inherited = [c for c in st_2_16.copies if c.stage < 2]
        for rect in st_2_16.stages[2].rects:
            left, right = rect.left, rect.right
            for copy in inherited:
                for lo, hi, v in copy.plateaus_global():
                    if max(lo, left) <= min(hi, right):
                        assert not rect.bottom < v < rect.top, (rect, copy.key)
                for c, lo, hi in copy.jumps_global():
                    if left <= c <= right:
                        assert not max(lo, rect.bottom) < min(hi, rect.top), (rect, copy.key)

    def test_betweenness_guarantee(self, st_2_16):
        # between consecutive inherited copies of a column, some stage-2 copy
        # sits strictly between them (pointwise over the whole column)
        for sigma in addresses_of_length(2):
            left, right = endpoint_zero(sigma), endpoint_one(sigma)
            inherited = sorted(
                (st_2_16.copies[cid] for cid in st_2_16.chain_ids(sigma, max_stage=1)),
                key=lambda c: c.band(left, right),
            )
            new_copies = [
                c for c in st_2_16.stages[2].copies if c.rect.address == sigma
            ]
            for low, up in zip(inherited, inherited[1:]):
                assert any(
                    pointwise_below(low, mid, left, right)
                    and pointwise_below(mid, up, left, right)
                    for mid in new_copies
                ), (sigma, low.key, up.key)


class TestPointwiseBelow:
    def test_stage_zero_below_first_split_copy(self, st_1_4):
        # their trace bands touch at f(1/3) but the copies never meet pointwise
        lower, upper = st_1_4.copies[0], st_1_4.copies[2]
        assert pointwise_below(lower, upper, F(0), F(1, 3))

    def test_not_below_in_reverse(self, st_1_4):
        assert not pointwise_below(st_1_4.copies[2], st_1_4.copies[0], F(0), F(1, 3))


class TestAffineMap:
    @given(
        st.lists(st.integers(0, 1), max_size=6),
        st.tuples(st.fractions(), st.fractions()).map(lambda t: (min(t), max(t))),
        st.fractions(min_value=0, max_value=1),
        st.fractions(min_value=0, max_value=1),
        st.fractions(min_value=-2, max_value=3),
        st.fractions(min_value=-2, max_value=3),
    )
    def test_order_preserving(self, bits, ab, c1, c2, r1, r2):
        a, b = ab
        if a == b:
            b = a + 1
        mapping = AffineMap(Address(tuple(bits)), a, b)
        p = mapping.apply((min(c1, c2), min(r1, r2)))
        q = mapping.apply((max(c1, c2), max(r1, r2)))
        assert p[0] <= q[0] and p[1] <= q[1]

    def test_maps_unit_square_onto_footprint(self):
        mapping = AffineMap(Address.parse("01"), F(1, 4), F(3, 4))
        assert mapping.apply((F(0), F(0))) == (F(2, 9), F(1, 4))
        assert mapping.apply((F(1), F(1))) == (F(1, 3), F(3, 4))


class TestCopyGeometry:
    def test_image_jump_heights_scale(self, st_1_4):
        copy = st_1_4.copies[1]  # rect [29/32, 1] over column 0
        height = copy.rect.height
        for m in range(4):
            jump = copy.dset.table.jump_by_index(m)
            lo = copy.to_global_h(jump.low)
            hi = copy.to_global_h(jump.high)
            assert hi - lo == height * F(1, 2 ** (m + 1))

    def test_image_touches_bottom_only_on_leftmost_plateau(self, st_1_4):
        for copy in st_1_4.copies:
            plats = list(copy.plateaus_global())
            assert plats[0][2] == copy.rect.bottom
            assert all(v > copy.rect.bottom for _, _, v in plats[1:])
            assert copy.max_height < copy.rect.top


class TestStateSerialization:
    def test_round_trip_exact(self, st_2_16):
        doc = json.loads(st_2_16.to_json())
        again = state_from_json_obj(doc)
        assert again.to_json() == st_2_16.to_json()
        assert [r.bottom for r in again.stages[2].rects] == [
            r.bottom for r in st_2_16.stages[2].rects
        ]

    def test_schema_validation(self):
        with pytest.raises(StateSchemaError):
            state_from_json_obj({"schema": "nope"})
        with pytest.raises(StateSchemaError) as exc:
            state_from_json_obj(
                {"schema": "fanforge-state-v1", "depth": 0, "jumps": 1, "strict": True,
                 "stages": [{"n": 0, "rects": [{"address": "", "a": "0/1"}]}]}
            )
        assert "rects[0]" in str(exc.value)
