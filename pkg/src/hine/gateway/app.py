"""HTTP/JSON service driven by the examiner console.

Thin orchestration only: every endpoint delegates to a core module operation
and the error-code -> HTTP-status mapping is total and deterministic.
"""

from __future__ import annotations

import base64
import io
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from PIL import Image

from ..catalog import ExamCatalog
from ..errors import HTTP_STATUS, DomainError, ParseError, ValidationError
from ..imaging import PipelineConfig, label_map_image, run_pipeline
from ..imaging import pnm
from ..imaging.types import BinaryMask, RasterImage
from ..media import DEFAULT_FPS, MediaStore
from ..records import RecordStore, _patient_to_json, _session_to_json


def _decode_image(data: bytes) -> RasterImage:
    if data.startswith(b"P6") or data.startswith(b"P5"):
        return pnm.read_image(data)
    if data.startswith(b"\x89PNG"):
        try:
            with Image.open(io.BytesIO(data)) as im:
                return RasterImage.from_array(np.asarray(im.convert("RGB")))
        except Exception as exc:
            raise pnm.FormatError(f"PNG data is unreadable: {exc}") from exc
    raise pnm.FormatError("unsupported image data (expected binary PPM, PGM or PNG)")


def _png_base64(array: np.ndarray) -> str:
    mode = "RGB" if array.ndim == 3 else "L"
    buf = io.BytesIO()
    Image.fromarray(array.astype(np.uint8), mode).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _mask_gray(mask: BinaryMask) -> np.ndarray:
    return np.where(mask.bits, 255, 0).astype(np.uint8)


def _sniff_media_type(data: bytes) -> str:
    if data.startswith(b"\x89PNG"):
        return "image/png"
    if data.startswith(b"P6"):
        return "image/x-portable-pixmap"
    if data.startswith(b"P5"):
        return "image/x-portable-graymap"
    return "application/octet-stream"


def _pipeline_config_from_query(params) -> PipelineConfig:
    kwargs = {}
    float_keys = (
        "sat_threshold_max",
        "sat_threshold_slope",
        "min_region_fraction",
        "background_value_min",
        "background_saturation_max",
    )
    int_keys = ("hue_bins", "gray_bins", "max_thinning_passes")
    try:
        for key in float_keys:
            if key in params:
                kwargs[key] = float(params[key])
        for key in int_keys:
            if key in params:
                kwargs[key] = int(params[key])
        if "fill_holes" in params:
            kwargs["fill_holes"] = params["fill_holes"].lower() in ("1", "true", "yes")
        return PipelineConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"bad pipeline parameter: {exc}") from exc


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as exc:
        raise ParseError(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise ParseError("request body must be a JSON object")
    return body


def create_app(
    data_dir: str | Path,
    catalogs: dict[str, ExamCatalog] | None = None,
    max_dimension: int = 4096,
    decoder_command: str | None = None,
) -> FastAPI:
    records = RecordStore(data_dir, catalogs)
    media = MediaStore(data_dir, max_dimension=max_dimension, decoder_command=decoder_command)

    app = FastAPI(title="HINE workstation gateway")
    app.state.records = records
    app.state.media = media

    @app.exception_handler(DomainError)
    async def domain_error_handler(_request: Request, exc: DomainError):
        return JSONResponse(
            status_code=HTTP_STATUS[exc.code],
            content={"code": exc.code, "message": str(exc), "details": exc.details},
        )

    @app.get("/health")
    async def health():
        return {"status": "ok", "catalog_version": records.catalog_version}

    @app.post("/patients", status_code=201)
    async def register_patient(request: Request):
        return _patient_to_json(records.register_patient(await _json_body(request)))

    @app.get("/patients/{patient_id}")
    async def get_patient(patient_id: str):
        return _patient_to_json(records.lookup_patient(patient_id))

    @app.get("/patients/{patient_id}/history")
    async def get_history(patient_id: str):
        return {"patient_id": patient_id, "sessions": records.history(patient_id)}

    @app.get("/catalog/{category}")
    async def get_catalog(category: str):
        catalog = records.catalogs.get(category)
        if catalog is None:
            raise ValidationError(f"unknown category {category!r}")
        return {
            "category": catalog.category,
            "schedule_months": list(catalog.schedule_months),
            "items": [
                {
                    "id": item.id,
                    "name": item.name,
                    "section": item.section,
                    "templates": [
                        {
                            "id": t.id,
                            "label": t.label,
                            "score": t.score,
                            "image_ref": t.image_ref,
                        }
                        for t in item.templates
                    ],
                }
                for item in catalog.items
            ],
        }

    @app.post("/sessions", status_code=201)
    async def start_session(request: Request):
        body = await _json_body(request)
        timestamp = None
        if body.get("timestamp"):
            try:
                timestamp = datetime.fromisoformat(
                    str(body["timestamp"]).replace("Z", "+00:00")
                )
            except ValueError as exc:
                raise ValidationError(f"bad timestamp: {exc}") from exc
            if timestamp.tzinfo is None:
                timestamp = timestamp.replace(tzinfo=timezone.utc)
        if "patient_id" not in body or "category" not in body:
            raise ValidationError("patient_id and category are required")
        session = records.start_session(body["patient_id"], body["category"], timestamp)
        return _session_to_json(session)

    @app.post("/sessions/{session_id}/items", status_code=201)
    async def record_item(session_id: str, request: Request):
        body = await _json_body(request)
        if "item_id" not in body or "template_id" not in body:
            raise ValidationError("item_id and template_id are required")
        attached = body.get("media", [])
        if not isinstance(attached, list):
            raise ValidationError("media must be a list of content hashes")
        media_refs = []
        for entry in attached:
            digest = entry.get("hash") if isinstance(entry, dict) else entry
            if not isinstance(digest, str):
                raise ValidationError("each media entry needs a content hash")
            media_refs.append(media.load_ref(digest))
        result = records.record_item(
            session_id,
            body["item_id"],
            body["template_id"],
            media=media_refs,
            note=body.get("note", ""),
            expected_version=body.get("expected_version"),
        )
        session = records.get_session(session_id)
        return {
            "item": {
                "item_id": result.item_id,
                "selected_template_id": result.selected_template_id,
                "score": result.score,
                "note": result.note,
                "media": [m.to_json() for m in result.media],
            },
            "version": session.version,
        }

    @app.post("/sessions/{session_id}/close")
    async def close_session(session_id: str):
        return records.close_session(session_id)

    @app.post("/media/frames", status_code=201)
    async def upload_frame(request: Request):
        data = await request.body()
        camera_tag = request.query_params.get("camera_tag")
        fps = float(request.query_params.get("fps", DEFAULT_FPS))
        return media.ingest_frame(data, camera_tag=camera_tag, fps=fps).to_json()

    @app.get("/media/{digest}")
    async def fetch_media(digest: str):
        data = media.fetch(digest, 0)
        return Response(content=data, media_type=_sniff_media_type(data))

    @app.get("/media/{digest}/{index}")
    async def fetch_media_frame(digest: str, index: int):
        data = media.fetch(digest, index)
        return Response(content=data, media_type=_sniff_media_type(data))

    @app.post("/pipeline/skeletonize")
    async def skeletonize(request: Request):
        data = await request.body()
        cfg = _pipeline_config_from_query(request.query_params)
        camera_tag = request.query_params.get("camera_tag")
        img = _decode_image(data)
        result = run_pipeline(img, cfg)
        input_ref = media.ingest_frame(data, camera_tag=camera_tag)
        seg_img = label_map_image(result.initial_segments)
        merged_img = label_map_image(result.merged_segments)
        stage_payload = {}
        for name, artifact_bytes, preview in (
            ("initial_segments", pnm.write_ppm(seg_img), _png_base64(seg_img.pixels)),
            ("merged_segments", pnm.write_ppm(merged_img), _png_base64(merged_img.pixels)),
            (
                "silhouette",
                pnm.write_mask(result.silhouette),
                _png_base64(_mask_gray(result.silhouette)),
            ),
            (
                "skeleton",
                pnm.write_mask(result.skeleton),
                _png_base64(_mask_gray(result.skeleton)),
            ),
        ):
            ref = media.ingest_frame(artifact_bytes)
            stage_payload[name] = {"media": ref.to_json(), "preview_png": preview}
        return {
            "input": {"media": input_ref.to_json(), "preview_png": _png_base64(img.pixels)},
            "stages": stage_payload,
            "region_counts": {
                "initial": result.initial_segments.region_count,
                "merged": result.merged_segments.region_count,
            },
        }

    return app
