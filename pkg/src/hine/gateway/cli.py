"""Batch command line over the same core modules the service uses.

Exit codes: 0 success, 1 domain error (diagnostics on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

import numpy as np

from ..catalog import NEONATAL, POST_NEONATAL, load_bundled_catalog, load_catalog
from ..errors import DomainError
from ..imaging import PipelineConfig, pnm, run_pipeline, write_stage_files
from ..imaging.types import RasterImage
from ..records import RecordStore
from ..testkit import gen_scene, random_figure_spec

DEFAULT_DATA_DIR = "hine-data"


def resolve_data_dir(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    return Path(os.environ.get("HINE_DATA_DIR", DEFAULT_DATA_DIR))


def _load_input_image(path: Path) -> RasterImage:
    data = path.read_bytes()
    if data.startswith(b"P6") or data.startswith(b"P5"):
        return pnm.read_image(data)
    if data.startswith(b"\x89PNG"):
        from PIL import Image

        with Image.open(io.BytesIO(data)) as im:
            return RasterImage.from_array(np.asarray(im.convert("RGB")))
    raise pnm.FormatError(f"{path} is not a supported image (PPM, PGM or PNG)")


def _load_catalogs(args) -> dict:
    catalogs = {}
    if getattr(args, "catalog_neonatal", None):
        catalogs[NEONATAL] = load_catalog(Path(args.catalog_neonatal).read_text())
    else:
        catalogs[NEONATAL] = load_bundled_catalog(NEONATAL)
    if getattr(args, "catalog_post_neonatal", None):
        catalogs[POST_NEONATAL] = load_catalog(Path(args.catalog_post_neonatal).read_text())
    else:
        catalogs[POST_NEONATAL] = load_bundled_catalog(POST_NEONATAL)
    return catalogs


def _cmd_skeletonize(args) -> int:
    img = _load_input_image(Path(args.input))
    cfg = PipelineConfig(
        sat_threshold_max=args.sat_max,
        sat_threshold_slope=args.sat_slope,
        hue_bins=args.hue_bins,
        gray_bins=args.gray_bins,
        min_region_fraction=args.min_region_fraction,
        background_value_min=args.bg_value_min,
        background_saturation_max=args.bg_sat_max,
        fill_holes=not args.no_fill_holes,
    )
    result = run_pipeline(img, cfg)
    out_dir = Path(args.out_dir)
    stem = Path(args.input).stem
    if args.stages:
        paths = write_stage_files(result, out_dir, stem)
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        skel_path = out_dir / f"{stem}.skel.pgm"
        skel_path.write_bytes(pnm.write_mask(result.skeleton))
        paths = [skel_path]
    for p in paths:
        print(p)
    return 0


def _cmd_serve(args) -> int:
    import signal

    import uvicorn

    from .app import create_app

    data_dir = resolve_data_dir(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    probe = data_dir / ".write-probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"data directory {data_dir} is not writable: {exc}", file=sys.stderr)
        return 1
    app = create_app(data_dir, catalogs=_load_catalogs(args))
    server = uvicorn.Server(
        uvicorn.Config(app, host=args.host, port=args.port, log_level="warning")
    )

    # exit 0 on SIGTERM/SIGINT after in-flight requests drain (uvicorn's own
    # capture would re-raise the signal and die with a signal status)
    def request_shutdown(_signum, _frame):
        server.should_exit = True

    signal.signal(signal.SIGTERM, request_shutdown)
    signal.signal(signal.SIGINT, request_shutdown)
    server.run()
    return 0


def _cmd_export(args) -> int:
    store = RecordStore(resolve_data_dir(args.data_dir), catalogs=_load_catalogs(args))
    Path(args.file).write_text(store.export_json(), encoding="utf-8")
    print(args.file)
    return 0


def _cmd_import(args) -> int:
    store = RecordStore(resolve_data_dir(args.data_dir), catalogs=_load_catalogs(args))
    store.import_json(Path(args.file).read_text(encoding="utf-8"))
    print(f"imported {len(store._patients)} patients, {len(store._sessions)} sessions")
    return 0


def _cmd_catalog_validate(args) -> int:
    catalog = load_catalog(Path(args.file).read_bytes())
    print(f"ok: {catalog.category} catalog, {len(catalog.items)} items")
    return 0


def _cmd_gen_scene(args) -> int:
    rng = np.random.default_rng(args.seed)
    spec = random_figure_spec(
        rng, stroke_width=args.stroke_width, canvas=(args.width, args.height)
    )
    spec.noise = args.noise
    img, truth = gen_scene(spec, args.seed)
    Path(args.out).write_bytes(pnm.write_ppm(img))
    lines = "".join(f"{x} {y}\n" for x, y in sorted(truth))
    Path(args.truth).write_text(lines, encoding="utf-8")
    print(args.out)
    print(args.truth)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hine",
        description="HINE workstation: skeleton extraction pipeline, "
        "examination records and the examiner service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("skeletonize", help="run the pipeline on an image file")
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--stages", action="store_true", help="write all four staged files")
    p.add_argument("--hue-bins", type=int, default=16)
    p.add_argument("--gray-bins", type=int, default=8)
    p.add_argument("--sat-max", type=float, default=1.0)
    p.add_argument("--sat-slope", type=float, default=0.8)
    p.add_argument("--min-region-fraction", type=float, default=0.001)
    p.add_argument("--bg-value-min", type=float, default=200.0)
    p.add_argument("--bg-sat-max", type=float, default=0.2)
    p.add_argument("--no-fill-holes", action="store_true")
    p.set_defaults(func=_cmd_skeletonize)

    p = sub.add_parser("serve", help="run the examiner gateway service")
    p.add_argument("--data-dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--catalog-neonatal")
    p.add_argument("--catalog-post-neonatal")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export", help="write the full store as one JSON document")
    p.add_argument("file")
    p.add_argument("--data-dir")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("import", help="replace the store from a JSON document")
    p.add_argument("file")
    p.add_argument("--data-dir")
    p.set_defaults(func=_cmd_import)

    p_cat = sub.add_parser("catalog", help="catalog utilities")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)
    p = cat_sub.add_parser("validate", help="validate a catalog file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_catalog_validate)

    p = sub.add_parser("gen-scene", help="generate a synthetic stick-figure scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--truth", required=True, help="ground-truth point list path (x y per line)")
    p.add_argument("--width", type=int, default=352)
    p.add_argument("--height", type=int, default=288)
    p.add_argument("--stroke-width", type=float, default=7.0)
    p.add_argument("--noise", type=int, default=0)
    p.set_defaults(func=_cmd_gen_scene)

    return parser


def cli_run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_run())
