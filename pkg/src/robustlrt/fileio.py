"""File formats: binary rasters, CSV fixtures, PGM masks, JSON reports.

Raster binary layout: magic ``RLRT``, little-endian uint32 width and
height, then ``width * height`` float32 intensities row-major.  Masks are
exchanged as binary PGM (P5, maxval 1).
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .detector import BinaryMask, Raster
from .errors import InputError

_MAGIC = b"RLRT"


def write_raster(path, raster: Raster) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", raster.width, raster.height))
        fh.write(raster.pixels.astype("<f4").tobytes(order="C"))


def read_raster(path) -> Raster:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != _MAGIC:
        raise InputError(f"{path}: not a raster file (bad magic)")
    width, height = struct.unpack("<II", blob[4:12])
    expected = 12 + 4 * width * height
    if len(blob) != expected:
        raise InputError(f"{path}: expected {expected} bytes, found {len(blob)}")
    pixels = np.frombuffer(blob, dtype="<f4", offset=12).reshape(height, width)
    return Raster(pixels.astype(float))


def read_raster_csv(path) -> Raster:
    """Small-fixture import: one CSV row per raster row."""
    try:
        pixels = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: cannot parse raster CSV: {exc}") from exc
    return Raster(pixels)


def write_mask_pgm(path, mask: BinaryMask) -> None:
    with open(path, "wb") as fh:
        fh.write(f"P5\n{mask.width} {mask.height}\n1\n".encode("ascii"))
        fh.write(mask.bits.astype(np.uint8).tobytes(order="C"))


def read_mask_pgm(path) -> BinaryMask:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P5"):
        raise InputError(f"{path}: not a binary PGM")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        fields.append(blob[start:pos])
    pos += 1
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise InputError(f"{path}: malformed PGM header") from exc
    if maxval != 1:
        raise InputError(f"{path}: mask PGM must have maxval 1, got {maxval}")
    data = np.frombuffer(blob, dtype=np.uint8, offset=pos, count=width * height)
    if data.size != width * height:
        raise InputError(f"{path}: truncated PGM payload")
    return BinaryMask(data.reshape(height, width) > 0)


def write_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
