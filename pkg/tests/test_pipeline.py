import numpy as np
import pytest

from hine.imaging import (
    NoForegroundError,
    PipelineConfig,
    RasterImage,
    run_pipeline,
    write_stage_files,
)
from hine.imaging.pipeline import STAGE_SUFFIXES
from hine.testkit import (
    StickFigureSpec,
    Stroke,
    gen_scene,
    random_figure_spec,
    symmetric_hausdorff,
)


def scene(seed):
    spec = random_figure_spec(np.random.default_rng(seed))
    return gen_scene(spec, seed)


def skeleton_points(result):
    ys, xs = np.nonzero(result.skeleton.bits)
    return set(zip(xs.tolist(), ys.tolist()))


def test_all_stages_present_and_consistent():
    img, _ = scene(1)
    result = run_pipeline(img)
    for stage in (
        result.initial_segments,
        result.merged_segments,
        result.silhouette,
        result.skeleton,
    ):
        assert (stage.width, stage.height) == (img.width, img.height)
    assert result.merged_segments.region_count <= result.initial_segments.region_count
    assert not (result.skeleton.bits & ~result.silhouette.bits).any()


def test_all_white_frame_propagates_no_foreground():
    img = RasterImage.from_array(np.full((288, 352, 3), 255, dtype=np.uint8))
    with pytest.raises(NoForegroundError):
        run_pipeline(img)


def test_width9_figure_tracks_ground_truth():
    torso = Stroke((176, 80), (176, 170), 9)
    limbs = [
        Stroke((176, 80), (106, 80), 9),
        Stroke((176, 80), (246, 80), 9),
        Stroke((176, 170), (116, 230), 9),
        Stroke((176, 170), (236, 230), 9),
    ]
    img, truth = gen_scene(StickFigureSpec(torso=torso, limbs=limbs), seed=0)
    result = run_pipeline(img)
    assert symmetric_hausdorff(skeleton_points(result), truth) <= 3.0


def test_deterministic_bit_identical():
    img, _ = scene(2)
    a = run_pipeline(img)
    b = run_pipeline(img)
    assert np.array_equal(a.initial_segments.labels, b.initial_segments.labels)
    assert np.array_equal(a.merged_segments.labels, b.merged_segments.labels)
    assert np.array_equal(a.silhouette.bits, b.silhouette.bits)
    assert np.array_equal(a.skeleton.bits, b.skeleton.bits)
    assert a.initial_segments.regions == b.initial_segments.regions


def test_stage_files_written(tmp_path):
    img, _ = scene(3)
    result = run_pipeline(img)
    paths = write_stage_files(result, tmp_path, "scene")
    assert [p.name for p in paths] == [f"scene{s}" for s in STAGE_SUFFIXES]
    for p in paths:
        assert p.exists() and p.stat().st_size > 0


def test_noise_jitter_still_segments():
    spec = random_figure_spec(np.random.default_rng(9))
    spec.noise = 10
    img, truth = gen_scene(spec, 9)
    result = run_pipeline(img)
    assert symmetric_hausdorff(skeleton_points(result), truth) <= 6.0
