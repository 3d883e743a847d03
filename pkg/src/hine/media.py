"""Content-addressed storage for examination frames and frame sequences.

Blobs live at media/<first2>/<hash>, metadata sidecars at media/<hash>.meta.
Identical bytes hash to the identical address, so duplicate ingests are
no-ops and concurrent duplicate ingest is benign. Sequences store each frame
as its own blob plus a manifest sidecar keyed by a digest over the frame
digests.
"""

from __future__ import annotations

import hashlib
import io
import json
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionError,
    FormatError,
    IndexOutOfRangeError,
    MixedDimensionsError,
    NotFoundError,
    ValidationError,
)
from .imaging import pnm

DEFAULT_FPS = 25.0
DEFAULT_MAX_DIMENSION = 4096
CAMERA_TAGS = ("C1", "C2")


@dataclass(frozen=True)
class MediaRef:
    hash: str
    kind: str  # "frame" | "sequence"
    width: int
    height: int
    frame_count: int = 1
    fps: float = DEFAULT_FPS
    camera_tag: str | None = None

    def to_json(self) -> dict:
        return {
            "hash": self.hash,
            "kind": self.kind,
            "width": self.width,
            "height": self.height,
            "frame_count": self.frame_count,
            "fps": self.fps,
            "camera_tag": self.camera_tag,
        }

    @classmethod
    def from_json(cls, d: dict) -> "MediaRef":
        return cls(
            hash=d["hash"],
            kind=d["kind"],
            width=d["width"],
            height=d["height"],
            frame_count=d.get("frame_count", 1),
            fps=d.get("fps", DEFAULT_FPS),
            camera_tag=d.get("camera_tag"),
        )


def _sniff_dimensions(data: bytes) -> tuple[int, int]:
    """Width and height of a P6/P5/PNG buffer; FormatError otherwise."""
    if data.startswith(b"P6"):
        img = pnm.read_ppm(data)
        return img.width, img.height
    if data.startswith(b"P5"):
        gray = pnm.read_pgm(data)
        return int(gray.shape[1]), int(gray.shape[0])
    if data.startswith(b"\x89PNG"):
        try:
            with Image.open(io.BytesIO(data)) as im:
                im.load()  # force decode so truncated data fails here
                return int(im.width), int(im.height)
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise FormatError(f"PNG data is unreadable: {exc}") from exc
    raise FormatError("unsupported image data (expected binary PPM, PGM or PNG)")


class MediaStore:
    def __init__(
        self,
        root: str | Path,
        max_dimension: int = DEFAULT_MAX_DIMENSION,
        decoder_command: str | None = None,
    ):
        self.root = Path(root) / "media"
        self.root.mkdir(parents=True, exist_ok=True)
        self.max_dimension = max_dimension
        self.decoder_command = decoder_command

    # -- paths -------------------------------------------------------------

    def _blob_path(self, digest: str) -> Path:
        return self.root / digest[:2] / digest

    def _meta_path(self, digest: str) -> Path:
        return self.root / f"{digest}.meta"

    def _write_blob(self, digest: str, data: bytes) -> None:
        path = self._blob_path(digest)
        if path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    def _write_meta(self, digest: str, meta: dict) -> None:
        path = self._meta_path(digest)
        if path.exists():
            return
        path.write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")

    # -- ingest ------------------------------------------------------------

    def _validate_frame(self, data: bytes) -> tuple[int, int]:
        width, height = _sniff_dimensions(data)
        if width > self.max_dimension or height > self.max_dimension:
            raise DimensionError(
                f"{width}x{height} exceeds the configured maximum "
                f"{self.max_dimension}x{self.max_dimension}"
            )
        return width, height

    def ingest_frame(
        self, data: bytes, camera_tag: str | None = None, fps: float = DEFAULT_FPS
    ) -> MediaRef:
        if camera_tag is not None and camera_tag not in CAMERA_TAGS:
            raise ValidationError(f"camera_tag must be one of {CAMERA_TAGS}")
        width, height = self._validate_frame(data)
        digest = hashlib.sha256(data).hexdigest()
        ref = MediaRef(
            hash=digest,
            kind="frame",
            width=width,
            height=height,
            frame_count=1,
            fps=fps,
            camera_tag=camera_tag,
        )
        self._write_blob(digest, data)
        self._write_meta(digest, ref.to_json())
        return ref

    def ingest_sequence(
        self,
        frames: list[bytes],
        fps: float = DEFAULT_FPS,
        camera_tag: str | None = None,
    ) -> MediaRef:
        if not frames:
            raise ValidationError("a sequence needs at least one frame")
        if camera_tag is not None and camera_tag not in CAMERA_TAGS:
            raise ValidationError(f"camera_tag must be one of {CAMERA_TAGS}")
        dims = [self._validate_frame(f) for f in frames]
        if len(set(dims)) > 1:
            raise MixedDimensionsError(
                f"frames disagree on dimensions: {sorted(set(dims))}"
            )
        frame_hashes = []
        for data in frames:
            digest = hashlib.sha256(data).hexdigest()
            self._write_blob(digest, data)
            frame_hashes.append(digest)
        seq_digest = hashlib.sha256(
            b"".join(bytes.fromhex(h) for h in frame_hashes)
        ).hexdigest()
        width, height = dims[0]
        ref = MediaRef(
            hash=seq_digest,
            kind="sequence",
            width=width,
            height=height,
            frame_count=len(frames),
            fps=fps,
            camera_tag=camera_tag,
        )
        meta = ref.to_json()
        meta["frames"] = frame_hashes
        self._write_meta(seq_digest, meta)
        return ref

    def ingest_video_file(
        self,
        path: str | Path,
        fps: float = DEFAULT_FPS,
        camera_tag: str | None = None,
    ) -> MediaRef:
        """Expand a video file into frames via the configured external decoder
        command ({input} and {output_dir} placeholders), then ingest them as a
        sequence. The only video path; no codecs are embedded here."""
        if not self.decoder_command:
            raise ValidationError("no external decoder command is configured")
        path = Path(path)
        if not path.exists():
            raise NotFoundError(f"video file {path} does not exist")
        with tempfile.TemporaryDirectory(prefix="hine-decode-") as tmp:
            cmd = [
                part.replace("{input}", str(path)).replace("{output_dir}", tmp)
                for part in shlex.split(self.decoder_command)
            ]
            proc = subprocess.run(cmd, capture_output=True)
            if proc.returncode != 0:
                raise FormatError(
                    f"decoder exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:400]}"
                )
            frame_paths = sorted(p for p in Path(tmp).iterdir() if p.is_file())
            if not frame_paths:
                raise FormatError("decoder produced no frames")
            return self.ingest_sequence(
                [p.read_bytes() for p in frame_paths], fps=fps, camera_tag=camera_tag
            )

    # -- fetch ---------------------------------------------------------------

    def load_ref(self, digest: str) -> MediaRef:
        meta_path = self._meta_path(digest)
        if not meta_path.exists():
            raise NotFoundError(f"no media with hash {digest!r}")
        return MediaRef.from_json(json.loads(meta_path.read_text(encoding="utf-8")))

    def fetch(self, ref: MediaRef | str, frame_index: int = 0) -> bytes:
        digest = ref if isinstance(ref, str) else ref.hash
        meta_path = self._meta_path(digest)
        if not meta_path.exists():
            raise NotFoundError(f"no media with hash {digest!r}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        count = meta.get("frame_count", 1)
        if not 0 <= frame_index < count:
            raise IndexOutOfRangeError(
                f"frame index {frame_index} outside 0..{count - 1}"
            )
        if meta["kind"] == "sequence":
            blob_digest = meta["frames"][frame_index]
        else:
            blob_digest = digest
        blob_path = self._blob_path(blob_digest)
        if not blob_path.exists():
            raise NotFoundError(f"blob {blob_digest!r} is missing from the store")
        return blob_path.read_bytes()

    def blob_count(self) -> int:
        return sum(1 for sub in self.root.iterdir() if sub.is_dir() for _ in sub.iterdir())
