"""Acceptance suite: one test per release criterion, at the stated tolerances.

Each test prints a [PASS]/[FAIL] line (visible with pytest -s or in captured
output) so a release run reads as a checklist.
"""

import json
import time
from contextlib import contextmanager
from datetime import date, timedelta

import numpy as np
import pytest
from fastapi.testclient import TestClient

from hine.catalog import (
    NEONATAL,
    NEONATAL_ITEM_NAMES,
    POST_NEONATAL,
    POST_NEONATAL_SCHEDULE,
    load_bundled_catalog,
    load_catalog,
)
from hine.errors import ValidationError
from hine.gateway.app import create_app
from hine.gateway.cli import cli_run
from hine.imaging import PipelineConfig, RasterImage, merge_small_regions, pnm, run_pipeline, segment, thin
from hine.imaging.color import feature_bin_codes
from hine.media import MediaStore
from hine.testkit import (
    check_thinning_invariants,
    gen_scene,
    random_blob_mask,
    random_figure_spec,
    reference_merge,
    symmetric_hausdorff,
)

THINNING_MASKS = 1000
THINNING_BUDGET_S = 10.0
SEGMENTATION_IMAGES = 200
MERGE_MAPS = 200
FIDELITY_SCENES = 50
HAUSDORFF_TOLERANCE_PX = 3.0
FRAME_BUDGET_S = 0.100


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_thinning_suite():
    with criterion(
        f"thinning: {THINNING_MASKS} seeded masks <=64x64 keep all invariants "
        f"in under {THINNING_BUDGET_S:.0f}s"
    ):
        rng = np.random.default_rng(20260801)
        started = time.perf_counter()
        for _ in range(THINNING_MASKS):
            mask = random_blob_mask(rng, max_size=64)
            skeleton = thin(mask)
            assert check_thinning_invariants(mask, skeleton) == []
            again = thin(skeleton)
            assert np.array_equal(again.bits, skeleton.bits)
        elapsed = time.perf_counter() - started
        assert elapsed < THINNING_BUDGET_S, f"took {elapsed:.2f}s"


def test_segmentation_partition_suite():
    with criterion(
        f"segmentation: partition property on {SEGMENTATION_IMAGES} random images <=64x64"
    ):
        rng = np.random.default_rng(20260802)
        cfg = PipelineConfig()
        for _ in range(SEGMENTATION_IMAGES):
            h, w = int(rng.integers(1, 65)), int(rng.integers(1, 65))
            px = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
            lm = segment(RasterImage.from_array(px), cfg)
            assert sum(r.area for r in lm.regions) == h * w
            codes = feature_bin_codes(px, cfg)
            assert np.array_equal(
                codes[:, 1:] == codes[:, :-1], lm.labels[:, 1:] == lm.labels[:, :-1]
            )
            assert np.array_equal(
                codes[1:, :] == codes[:-1, :], lm.labels[1:, :] == lm.labels[:-1, :]
            )
            assert set(np.unique(lm.labels)) == set(range(lm.region_count))


def test_merge_matches_reference_suite():
    with criterion(
        f"merging: exact match with the brute-force reference on {MERGE_MAPS} label maps <=16x16"
    ):
        rng = np.random.default_rng(20260803)
        palette = np.array(
            [[250, 250, 250], [200, 30, 30], [30, 30, 200], [30, 200, 30], [120, 120, 120]]
        )
        for _ in range(MERGE_MAPS):
            h, w = int(rng.integers(2, 17)), int(rng.integers(2, 17))
            px = palette[rng.integers(0, len(palette), size=(h, w))].astype(np.uint8)
            cfg = PipelineConfig(
                min_region_fraction=float(rng.choice([0.05, 0.1, 0.2, 0.35]))
            )
            lm = segment(RasterImage.from_array(px), cfg)
            ours = merge_small_regions(lm, cfg)
            reference = reference_merge(lm, cfg)
            assert np.array_equal(ours.labels, reference.labels)
            for a, b in zip(ours.regions, reference.regions):
                assert (a.area, a.perimeter, a.touches_border) == (
                    b.area,
                    b.perimeter,
                    b.touches_border,
                )
                assert a.mean_color == b.mean_color


def test_pipeline_fidelity_suite():
    with criterion(
        f"pipeline: {FIDELITY_SCENES} stick figures on a 352x288 frame stay within "
        f"{HAUSDORFF_TOLERANCE_PX:.0f}px of ground truth, <{FRAME_BUDGET_S * 1000:.0f}ms per frame"
    ):
        for seed in range(FIDELITY_SCENES):
            spec = random_figure_spec(np.random.default_rng(seed), stroke_width=7.0)
            img, truth = gen_scene(spec, seed)
            assert (img.width, img.height) == (352, 288)
            started = time.perf_counter()
            result = run_pipeline(img)
            elapsed = time.perf_counter() - started
            assert elapsed < FRAME_BUDGET_S, f"seed {seed}: {elapsed * 1000:.1f}ms"
            ys, xs = np.nonzero(result.skeleton.bits)
            skeleton_points = set(zip(xs.tolist(), ys.tolist()))
            distance = symmetric_hausdorff(skeleton_points, truth)
            assert distance <= HAUSDORFF_TOLERANCE_PX, f"seed {seed}: {distance:.2f}px"


def test_catalog_constants():
    with criterion(
        "catalog: bundled neonatal has the ten item names with 4-5 templates, "
        "follow-up schedule is 3..24 months, violations rejected"
    ):
        neonatal = load_bundled_catalog(NEONATAL)
        assert [item.name for item in neonatal.items] == list(NEONATAL_ITEM_NAMES)
        assert all(4 <= len(item.templates) <= 5 for item in neonatal.items)
        post = load_bundled_catalog(POST_NEONATAL)
        assert post.schedule_months == POST_NEONATAL_SCHEDULE

        from importlib import resources

        doc = json.loads(
            resources.files("hine.data").joinpath("catalog_neonatal.json").read_text()
        )
        doc["items"][0]["templates"].append({"id": "extra", "label": "x", "score": 9})
        with pytest.raises(ValidationError):
            load_catalog(json.dumps(doc))
        doc = json.loads(
            resources.files("hine.data").joinpath("catalog_post_neonatal.json").read_text()
        )
        doc["schedule_months"] = [3, 6, 9]
        with pytest.raises(ValidationError):
            load_catalog(json.dumps(doc))


def test_workflow_end_to_end(tmp_path):
    with criterion(
        "workflow: register -> neonatal session at 36+4 weeks -> 10 items -> close "
        "-> history totals; second neonatal start is NOT_ELIGIBLE; export/import "
        "round-trip byte-identical"
    ):
        birth = date(2026, 7, 6)
        exam_day = birth + timedelta(weeks=4)
        data_dir = tmp_path / "store"
        with TestClient(create_app(data_dir)) as client:
            patient = client.post(
                "/patients",
                json={
                    "name": "Asha Rao",
                    "date_of_birth": birth.isoformat(),
                    "mother_name": "Meera Rao",
                    "father_name": "Vikram Rao",
                    "gestational_week_at_birth": 36,
                    "birth_weight": 2400,
                    "discharge_diagnosis": "stable preterm",
                },
            )
            assert patient.status_code == 201
            pid = patient.json()["id"]

            started = client.post(
                "/sessions",
                json={
                    "patient_id": pid,
                    "category": "neonatal",
                    "timestamp": exam_day.isoformat() + "T10:00:00Z",
                },
            )
            assert started.status_code == 201
            sid = started.json()["id"]

            catalog = client.get("/catalog/neonatal").json()
            expected_total = 0
            for item in catalog["items"]:
                template = item["templates"][1]
                recorded = client.post(
                    f"/sessions/{sid}/items",
                    json={"item_id": item["id"], "template_id": template["id"]},
                )
                assert recorded.status_code == 201
                expected_total += template["score"]

            closed = client.post(f"/sessions/{sid}/close").json()
            assert closed["total"] == expected_total
            assert closed["incomplete"] is False

            history = client.get(f"/patients/{pid}/history").json()["sessions"]
            assert len(history) == 1
            assert history[0]["total"] == expected_total
            assert history[0]["status"] == "closed"

            again = client.post(
                "/sessions",
                json={
                    "patient_id": pid,
                    "category": "neonatal",
                    "timestamp": (exam_day + timedelta(days=2)).isoformat() + "T10:00:00Z",
                },
            )
            assert again.status_code == 409
            assert again.json()["code"] == "NOT_ELIGIBLE"

        export_a = tmp_path / "export-a.json"
        export_b = tmp_path / "export-b.json"
        fresh_dir = tmp_path / "fresh"
        assert cli_run(["export", str(export_a), "--data-dir", str(data_dir)]) == 0
        assert cli_run(["import", str(export_a), "--data-dir", str(fresh_dir)]) == 0
        assert cli_run(["export", str(export_b), "--data-dir", str(fresh_dir)]) == 0
        assert export_a.read_bytes() == export_b.read_bytes()


def test_media_round_trip(tmp_path):
    with criterion("media: 352x288 frame round-trips bit-identically and deduplicates"):
        store = MediaStore(tmp_path)
        rng = np.random.default_rng(20260806)
        frame = pnm.write_ppm(
            RasterImage.from_array(rng.integers(0, 256, size=(288, 352, 3), dtype=np.uint8))
        )
        ref = store.ingest_frame(frame, camera_tag="C1")
        assert (ref.width, ref.height) == (352, 288)
        assert store.fetch(ref, 0) == frame
        blobs_before = store.blob_count()
        duplicate = store.ingest_frame(frame, camera_tag="C1")
        assert duplicate.hash == ref.hash
        assert store.blob_count() == blobs_before
