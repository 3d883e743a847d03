"""Binary PPM (P6) and PGM (P5) codec, bit-exact for files this module writes.

Masks serialize as P5 with 0 = background, 255 = foreground; any nonzero
byte reads back as foreground.
"""

from __future__ import annotations

import numpy as np

from ..errors import FormatError as _BaseFormatError
from .types import BinaryMask, RasterImage


class FormatError(_BaseFormatError):
    """Input bytes are not a well-formed P5/P6 image."""


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int, int, int]:
    """Returns (width, height, maxval, data_offset)."""
    if not data.startswith(magic):
        raise FormatError(f"expected {magic.decode()} magic")
    pos = len(magic)
    fields: list[int] = []
    while len(fields) < 3:
        if pos >= len(data):
            raise FormatError("truncated header")
        c = data[pos : pos + 1]
        if c == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise FormatError("unterminated comment")
            pos = nl + 1
        elif c.isspace():
            pos += 1
        elif c.isdigit():
            end = pos
            while end < len(data) and data[end : end + 1].isdigit():
                end += 1
            fields.append(int(data[pos:end]))
            pos = end
        else:
            raise FormatError(f"unexpected byte {c!r} in header")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing whitespace after maxval")
    pos += 1
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FormatError("non-positive dimensions")
    if not 0 < maxval < 256:
        raise FormatError(f"unsupported maxval {maxval}")
    return width, height, maxval, pos


def read_ppm(data: bytes) -> RasterImage:
    width, height, _, off = _parse_header(data, b"P6")
    need = width * height * 3
    raster = data[off : off + need]
    if len(raster) < need:
        raise FormatError("truncated pixel data")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return RasterImage(width=width, height=height, pixels=pixels.copy())


def write_ppm(img: RasterImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.astype(np.uint8).tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    width, height, _, off = _parse_header(data, b"P5")
    need = width * height
    raster = data[off : off + need]
    if len(raster) < need:
        raise FormatError("truncated pixel data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(gray: np.ndarray) -> bytes:
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + gray.tobytes()


def read_mask(data: bytes) -> BinaryMask:
    gray = read_pgm(data)
    return BinaryMask.from_array(gray != 0)


def write_mask(mask: BinaryMask) -> bytes:
    return write_pgm(np.where(mask.bits, 255, 0).astype(np.uint8))


def read_image(data: bytes) -> RasterImage:
    """Read P6 directly or promote a P5 graymap to RGB."""
    if data.startswith(b"P6"):
        return read_ppm(data)
    if data.startswith(b"P5"):
        gray = read_pgm(data)
        return RasterImage.from_array(np.repeat(gray[..., None], 3, axis=-1))
    raise FormatError("not a P5/P6 image")
