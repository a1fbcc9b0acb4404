"""Binary PGM (P5) input and output.

Depth frames travel as 16-bit PGM files: maxval 65535, samples in
big-endian byte order per the netpbm convention. Masks are exported as
8-bit PGM files holding 0 outside and 255 inside. Round trips are
bit-exact.
"""

from __future__ import annotations

import numpy as np

from .errors import PgmError
from .frames import DepthFrame, PixelMask


def _parse_header(blob: bytes) -> tuple[int, int, int, int]:
    """Return (width, height, maxval, payload_offset) of a P5 header."""
    if blob[:2] != b"P5":
        raise PgmError("not a binary PGM: missing P5 magic")
    pos = 2
    fields = []
    while len(fields) < 3:
        if pos >= len(blob):
            raise PgmError("malformed PGM header: unexpected end of file")
        c = blob[pos : pos + 1]
        if c in b" \t\r\n":
            pos += 1
        elif c == b"#":
            nl = blob.find(b"\n", pos)
            if nl < 0:
                raise PgmError("malformed PGM header: unterminated comment")
            pos = nl + 1
        elif c.isdigit():
            end = pos
            while end < len(blob) and blob[end : end + 1].isdigit():
                end += 1
            fields.append(int(blob[pos:end]))
            pos = end
        else:
            raise PgmError(f"malformed PGM header: unexpected byte {c!r}")
    # exactly one whitespace byte separates the maxval from the payload
    if pos >= len(blob) or blob[pos : pos + 1] not in b" \t\r\n":
        raise PgmError("malformed PGM header: missing separator before payload")
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PgmError(f"malformed PGM header: bad dimensions {width}x{height}")
    return width, height, maxval, pos + 1


def _read_payload(path, expected_maxval: int) -> tuple[int, int, bytes]:
    with open(path, "rb") as fh:
        blob = fh.read()
    width, height, maxval, off = _parse_header(blob)
    if maxval != expected_maxval:
        raise PgmError(f"unsupported maxval {maxval} (expected {expected_maxval})")
    sample_bytes = 2 if expected_maxval > 255 else 1
    need = width * height * sample_bytes
    payload = blob[off:]
    if len(payload) < need:
        raise PgmError(
            f"truncated PGM payload: expected {need} bytes, got {len(payload)}"
        )
    if len(payload) > need:
        raise PgmError("trailing data after PGM payload")
    return width, height, payload


def load_depth_frame(path) -> DepthFrame:
    """Read a 16-bit depth frame from a binary PGM file."""
    width, height, payload = _read_payload(path, 65535)
    data = np.frombuffer(payload, dtype=">u2").reshape(height, width)
    return DepthFrame(data.astype(np.uint16))


def save_depth_frame(frame: DepthFrame, path) -> None:
    """Write a depth frame as a 16-bit binary PGM file."""
    header = f"P5\n{frame.width} {frame.height}\n65535\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(frame.data.astype(">u2").tobytes())


def load_mask(path) -> PixelMask:
    """Read an 8-bit mask PGM; any nonzero sample counts as inside."""
    width, height, payload = _read_payload(path, 255)
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return PixelMask(data > 0)


def save_mask(mask: PixelMask, path) -> None:
    """Write a mask as an 8-bit binary PGM (0 outside, 255 inside)."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    body = np.where(mask.bits, 255, 0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())
