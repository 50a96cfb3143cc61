"""Binary portable pixmap (P6) and graymap (P5) read/write, maxval 255.

The canonical lossless interchange format: a written file reads back
bit-exactly.  The reader accepts the general header grammar (arbitrary
whitespace, '#' comments); the writer emits one fixed layout.
"""
from __future__ import annotations

import numpy as np

from .image import ensure_image


def write_pnm(path, img: np.ndarray) -> None:
    img = ensure_image(img)
    h, w, c = img.shape
    magic = b"P6" if c == 3 else b"P5"
    with open(path, "wb") as f:
        f.write(magic + b"\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def _read_header_token(f) -> bytes:
    tok = b""
    while True:
        ch = f.read(1)
        if not ch:
            raise ValueError("truncated PNM header")
        if ch == b"#":
            while ch not in (b"\n", b"\r", b""):
                ch = f.read(1)
            continue
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def read_pnm(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(2)
        if magic not in (b"P5", b"P6"):
            raise ValueError(f"not a binary PNM file (magic {magic!r})")
        w = int(_read_header_token(f))
        h = int(_read_header_token(f))
        maxval = int(_read_header_token(f))
        if maxval != 255:
            raise ValueError(f"only maxval 255 supported, got {maxval}")
        c = 3 if magic == b"P6" else 1
        data = f.read(h * w * c)
        if len(data) != h * w * c:
            raise ValueError(f"truncated PNM payload: expected {h * w * c} bytes, got {len(data)}")
    return np.frombuffer(data, dtype=np.uint8).reshape(h, w, c).copy()
