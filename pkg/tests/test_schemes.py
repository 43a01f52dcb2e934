"""Subdivision schemes on shape sequences and their number twins."""

import numpy as np
import pytest

from conftest import bit_same
from oracles import chaikin_step_numbers, fourpoint_step_numbers, lr_step_numbers
from setblend.fixtures import (
    bands_seq,
    constant_seq,
    disk_raster,
    intervals_raster,
    monotone_disk_seq,
)
from setblend.measure_average import general_average
from setblend.raster import align, is_subset, measure
from setblend.schemes import (
    SchemeConfig,
    SetSeq,
    dk_sequence,
    eval_interpolant,
    eval_interpolant_report,
    fourpoint_refine,
    measure_curve,
    piecewise_eval,
    refine_values,
    spline_refine,
    subdivide,
    subdivision_history,
    velocity_estimate,
)


class TestConfig:
    def test_rejects_unknown_knobs(self):
        with pytest.raises(ValueError):
            SchemeConfig(scheme="bezier")
        with pytest.raises(ValueError):
            SchemeConfig(degree=0)
        with pytest.raises(ValueError):
            SchemeConfig(levels=-1)
        with pytest.raises(ValueError):
            SchemeConfig(bound=1.0)
        with pytest.raises(ValueError):
            SchemeConfig(boundary="wrap")

    def test_sequence_validation(self):
        one = disk_raster(1.0, 32, 2.0)
        with pytest.raises(ValueError):
            SetSeq((one,), (0.0,))
        with pytest.raises(ValueError):
            SetSeq((one, one), (0.0, 0.0))
        with pytest.raises(ValueError):
            SetSeq((one, disk_raster(1.0, 16, 2.0)), (0.0, 1.0))
        with pytest.raises(ValueError):
            SetSeq((one, one), (0.0, 1.0), budgets=(0.0,))
        seq = SetSeq((one, one), (0.0, 1.0))
        assert seq.budgets == (0.0, 0.0)
        assert seq.span == (0.0, 1.0)


class TestNumberTwins:
    def test_chaikin_matches_direct_formula(self):
        vals = [1.0, 5.0, 2.0, 8.0, 3.0]
        pos = [0.0, 1.0, 2.0, 3.0, 4.0]
        got_v, got_p = refine_values(vals, pos, scheme="chaikin")
        assert got_v == pytest.approx(chaikin_step_numbers(vals))
        assert got_p == pytest.approx(chaikin_step_numbers(pos))

    def test_chaikin_end_positions_are_nonuniform_by_design(self):
        _, pos = refine_values([0.0] * 4, [0.0, 1.0, 2.0, 3.0], scheme="chaikin")
        assert pos == pytest.approx([0.0, 0.5, 1.25, 1.75, 2.5, 3.0])

    def test_low_degree_splines_match_repeat_and_smooth(self):
        vals = [2.0, 7.0, 1.0, 6.0, 4.0]
        pos = [0.0, 0.5, 1.0, 1.5, 2.0]
        for m in (1, 3, 4):
            cfg = SchemeConfig(scheme="spline", degree=m)
            got_v, _ = refine_values(vals, pos, cfg)
            assert got_v == pytest.approx(lr_step_numbers(vals, m))

    def test_spline_mask_is_binomial(self):
        # The interior response to a unit impulse reads off the mask.
        for m in (1, 2, 3, 4):
            vals = [0.0] * 9
            vals[4] = 2.0**m
            got = lr_step_numbers(vals, m)
            nonzero = [v for v in got if v != 0.0]
            from math import comb

            assert nonzero == [float(comb(m + 1, l)) for l in range(m + 2)]

    def test_fourpoint_matches_direct_formula(self):
        vals = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
        pos = list(map(float, range(6)))
        cfg = SchemeConfig(scheme="fourpoint", tension=1 / 16)
        got_v, got_p = refine_values(vals, pos, cfg)
        assert got_v == pytest.approx(fourpoint_step_numbers(vals, 1 / 16))
        assert got_p == pytest.approx(fourpoint_step_numbers(pos, 1 / 16))

    def test_zero_tension_fourpoint_is_midpoint_insertion(self):
        vals = [3.0, 1.0, 4.0, 1.0, 5.0]
        pos = list(map(float, range(5)))
        cfg = SchemeConfig(scheme="fourpoint", tension=0.0)
        got_v, _ = refine_values(vals, pos, cfg)
        assert got_v[1::2] == pytest.approx(
            [0.5 * (x + y) for x, y in zip(vals, vals[1:])]
        )

    def test_linear_data_stays_linear(self):
        # Every rule is an affine combination applied to values and
        # positions alike, so samples of a line refine to samples of the
        # same line.  Constant extension bends the ends (the phantom
        # entries sit off the line), so there only interior samples obey.
        vals = [1.0, 3.0, 5.0, 7.0]
        pos = [0.0, 1.0, 2.0, 3.0]
        for scheme, m in (("chaikin", 2), ("spline", 3), ("fourpoint", 0)):
            cfg = SchemeConfig(
                scheme=scheme if scheme != "chaikin" else "chaikin", degree=max(m, 1)
            )
            got_v, got_p = refine_values(vals, pos, cfg, scheme=scheme)
            assert got_v == pytest.approx([1.0 + 2.0 * p for p in got_p])
        ext = SchemeConfig(boundary="extend")
        got_v, got_p = refine_values(vals, pos, ext, scheme="chaikin")
        assert min(got_p) >= 0.0 - 1e-9 and max(got_p) <= 3.0 + 1e-9
        interior = [(p, v) for p, v in zip(got_p, got_v) if 1.0 <= p <= 2.0]
        assert [v for _, v in interior] == pytest.approx(
            [1.0 + 2.0 * p for p, _ in interior]
        )


class TestSetRefinement:
    def test_every_scheme_reproduces_a_constant_sequence(self):
        seq = constant_seq(4, 1.0, 48)
        for refined in (
            spline_refine(seq, 1),
            spline_refine(seq, 2),
            spline_refine(seq, 3),
            fourpoint_refine(seq),
        ):
            assert refined.level == 1
            for s in refined.sets:
                assert bit_same(s, seq.sets[0])

    def test_chaikin_keeps_the_end_shapes(self):
        seq = monotone_disk_seq(cells=64)
        ref = spline_refine(seq, 2)
        assert ref.sets[0] == seq.sets[0]
        assert ref.sets[-1] == seq.sets[-1]
        assert len(ref) == 2 * len(seq) - 2

    def test_fourpoint_preserves_the_originals_identically(self):
        seq = monotone_disk_seq(cells=64)
        ref = fourpoint_refine(seq)
        for i, s in enumerate(seq.sets):
            assert ref.sets[2 * i] is s

    def test_monotone_stacks_stay_monotone_under_chaikin(self):
        seq = monotone_disk_seq(cells=64)
        ref = spline_refine(seq, 2)
        for s1, s2 in zip(ref.sets, ref.sets[1:]):
            u1, u2 = align(s1, s2)
            assert is_subset(u1, u2)

    def test_measures_track_the_number_twin_within_budgets(self):
        seq = monotone_disk_seq(cells=64)
        cfg = SchemeConfig(scheme="chaikin", levels=2)
        vals = [measure(s) for s in seq.sets]
        pos = list(seq.positions)
        for stage in subdivision_history(seq, cfg)[1:]:
            vals, pos = refine_values(vals, pos, scheme="chaikin")
            assert stage.positions == pytest.approx(pos)
            for s, v, slack in zip(stage.sets, vals, stage.budgets):
                assert abs(measure(s) - v) <= slack + 1e-9

    def test_budgets_accumulate(self):
        seq = monotone_disk_seq(cells=64)
        one = spline_refine(seq, 2)
        two = spline_refine(one, 2)
        assert all(b == 0 for b in seq.budgets)
        assert max(one.budgets) > 0
        assert max(two.budgets) > max(one.budgets)

    def test_extend_boundary_trims_back_into_the_span(self):
        # Constant extension refines past the ends and keeps only samples
        # inside the original span, so the ends move in by at most half
        # the knot spacing.
        seq = monotone_disk_seq(cells=64)
        cfg = SchemeConfig(boundary="extend")
        ref = spline_refine(seq, 2, cfg)
        h = seq.positions[1] - seq.positions[0]
        lo, hi = seq.span
        assert lo <= ref.positions[0] <= lo + 0.5 * h
        assert hi - 0.5 * h <= ref.positions[-1] <= hi

    def test_too_short_sequences_are_rejected(self):
        seq = constant_seq(2, 1.0, 32)
        with pytest.raises(ValueError):
            spline_refine(seq, 2)

    def test_warnings_for_risky_parameters(self):
        seq = monotone_disk_seq(cells=64)
        with pytest.warns(UserWarning, match="contraction"):
            fourpoint_refine(seq, tension=0.2)
        short = SetSeq(seq.sets[:3], seq.positions[:3])
        with pytest.warns(UserWarning, match="midpoints"):
            fourpoint_refine(short)


class TestEvaluation:
    def test_knots_return_the_stored_shapes(self):
        seq = monotone_disk_seq(cells=64)
        for i, p in enumerate(seq.positions):
            assert eval_interpolant(seq, p) is seq.sets[i]

    def test_between_knots_is_the_measure_matched_blend(self):
        seq = monotone_disk_seq(cells=64)
        x = 1.25
        got = eval_interpolant(seq, x)
        lam = (seq.positions[2] - x) / (seq.positions[2] - seq.positions[1])
        want = general_average(seq.sets[1], seq.sets[2], lam)
        assert bit_same(got, want)
        assert bit_same(piecewise_eval(seq, x), got)

    def test_nonuniform_positions_are_respected(self):
        seq = monotone_disk_seq(cells=64)
        ref = spline_refine(seq, 2)
        x = 0.5 * (ref.positions[1] + ref.positions[2])
        lam = (ref.positions[2] - x) / (ref.positions[2] - ref.positions[1])
        assert lam == pytest.approx(0.5)
        got = eval_interpolant(ref, x)
        want = general_average(*align(ref.sets[1], ref.sets[2]), 0.5)
        assert bit_same(got, want)

    def test_out_of_span_is_rejected(self):
        seq = monotone_disk_seq(cells=64)
        with pytest.raises(ValueError):
            eval_interpolant(seq, seq.positions[-1] + 0.5)

    def test_report_budget_combines_knot_budgets(self):
        seq = monotone_disk_seq(cells=64)
        ref = spline_refine(seq, 2)
        _, budget = eval_interpolant_report(ref, 0.5 * sum(ref.positions[1:3]))
        assert budget >= max(ref.budgets[1], ref.budgets[2]) * 0.5


class TestDiagnostics:
    def test_neighbor_distances_shrink_under_refinement(self):
        seq = bands_seq(cells=64)
        hist = subdivision_history(seq, SchemeConfig(scheme="fourpoint", levels=2))
        dk = dk_sequence(hist)
        assert len(dk) == 3
        assert dk[-1] < dk[0]
        assert all(d >= 0 for d in dk)

    def test_measure_curve_hits_knots_exactly(self):
        seq = monotone_disk_seq(cells=64)
        n = len(seq)
        samples = measure_curve(seq, samples=n)
        for (x, m), p, s in zip(samples, seq.positions, seq.sets):
            assert x == pytest.approx(p)
            assert m == measure(s)

    def test_velocity_of_a_constant_sequence_is_zero(self):
        seq = constant_seq(4, 1.0, 48)
        assert velocity_estimate(seq, 1.5, 0.25) == 0.0

    def test_velocity_of_steady_growth_matches_the_rate(self):
        xs = [0.0, 0.25, 0.5, 0.75, 1.0]
        sets = tuple(
            intervals_raster([(0.5, 1.5 + x)], cells=256, lo=0.0, hi=4.0) for x in xs
        )
        seq = SetSeq(sets, tuple(xs))
        v = velocity_estimate(seq, 0.5, 0.25)
        assert v == pytest.approx(1.0, abs=0.1)

    def test_subdivide_returns_last_history_stage(self):
        seq = monotone_disk_seq(cells=64)
        cfg = SchemeConfig(scheme="chaikin", levels=2)
        hist = subdivision_history(seq, cfg)
        assert len(hist) == 3
        assert [s.level for s in hist] == [0, 1, 2]
        last = subdivide(seq, cfg)
        assert last.positions == hist[-1].positions
        assert all(x == y for x, y in zip(last.sets, hist[-1].sets))
