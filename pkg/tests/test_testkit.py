import numpy as np
import pytest

from hine.imaging import BinaryMask
from hine.testkit import (
    InvalidSpecError,
    StickFigureSpec,
    Stroke,
    check_thinning_invariants,
    gen_scene,
    oracle_components,
    symmetric_hausdorff,
)


def mask_of(rows):
    return BinaryMask.from_array(np.array([[c == "#" for c in row] for row in rows]))


def simple_spec(**kwargs):
    defaults = dict(
        torso=Stroke((20, 10), (20, 40), 7),
        limbs=[Stroke((20, 10), (40, 12), 7)],
        canvas_width=64,
        canvas_height=64,
    )
    defaults.update(kwargs)
    return StickFigureSpec(**defaults)


class TestGenScene:
    def test_single_bar_scene(self):
        spec = StickFigureSpec(
            torso=Stroke((10, 20), (50, 20), 9),
            limbs=[],
            canvas_width=64,
            canvas_height=40,
        )
        img, truth = gen_scene(spec, 0)
        assert truth == {(x, 20) for x in range(10, 51)}
        assert tuple(img.pixels[20, 30]) == spec.fill_color
        assert tuple(img.pixels[2, 2]) == spec.background

    def test_deterministic_for_spec_and_seed(self):
        spec = simple_spec(noise=8)
        a, _ = gen_scene(spec, 7)
        b, _ = gen_scene(spec, 7)
        assert np.array_equal(a.pixels, b.pixels)
        c, _ = gen_scene(spec, 8)
        assert not np.array_equal(a.pixels, c.pixels)

    def test_t_junction_truth_contains_junction(self):
        spec = StickFigureSpec(
            torso=Stroke((30, 10), (30, 50), 7),
            limbs=[Stroke((30, 30), (50, 30), 7)],
            canvas_width=64,
            canvas_height=64,
        )
        _, truth = gen_scene(spec, 0)
        assert (30, 30) in truth

    def test_rejects_out_of_canvas(self):
        with pytest.raises(InvalidSpecError, match="within the canvas"):
            gen_scene(simple_spec(torso=Stroke((20, 10), (20, 99), 7)), 0)

    def test_rejects_thin_stroke(self):
        with pytest.raises(InvalidSpecError, match="width"):
            gen_scene(simple_spec(torso=Stroke((20, 10), (20, 40), 2)), 0)

    def test_rejects_near_white_fill(self):
        with pytest.raises(InvalidSpecError, match="near-white"):
            gen_scene(simple_spec(fill_color=(250, 250, 250)), 0)

    def test_rejects_excess_noise(self):
        with pytest.raises(InvalidSpecError, match="noise"):
            gen_scene(simple_spec(noise=21), 0)


class TestOracleComponents:
    def test_empty(self):
        assert oracle_components(mask_of(["...", "..."]), 4) == 0

    def test_diagonal_pair(self):
        m = mask_of(["#.", ".#"])
        assert oracle_components(m, 8) == 1
        assert oracle_components(m, 4) == 2

    def test_ring(self):
        m = mask_of(["###", "#.#", "###"])
        assert oracle_components(m, 8) == 1
        padded = BinaryMask.from_array(np.pad(~m.bits, 1, constant_values=True))
        assert oracle_components(padded, 4) == 2  # hole + outside

    def test_rejects_bad_connectivity(self):
        with pytest.raises(ValueError):
            oracle_components(mask_of(["#"]), 6)


class TestThinningChecker:
    def test_identity_on_thin_line_passes(self):
        m = mask_of(["#####"])
        assert check_thinning_invariants(m, m) == []

    def test_2x2_block_flagged(self):
        inp = mask_of(["####", "####", "####"])
        out = mask_of(["....", ".##.", ".##."])
        assert "thinness" in check_thinning_invariants(inp, out)

    def test_split_component_flagged(self):
        inp = mask_of(["#####"])
        out = mask_of(["##.##"])
        assert "foreground-components" in check_thinning_invariants(inp, out)

    def test_dropped_endpoint_flagged(self):
        inp = mask_of(["#####"])
        out = mask_of([".####"])
        assert "endpoint-preservation" in check_thinning_invariants(inp, out)

    def test_non_subset_flagged(self):
        inp = mask_of([".####"])
        out = mask_of(["#####"])
        assert "subset" in check_thinning_invariants(inp, out)

    def test_filled_hole_flagged(self):
        inp = mask_of(["###", "#.#", "###"])
        out = mask_of(["###", "###", "###"])
        verdict = check_thinning_invariants(inp, out)
        assert "background-components" in verdict


def test_symmetric_hausdorff():
    a = {(0, 0), (3, 0)}
    b = {(0, 0)}
    assert symmetric_hausdorff(a, b) == 3.0
    assert symmetric_hausdorff(a, a) == 0.0
    with pytest.raises(ValueError):
        symmetric_hausdorff(a, set())
