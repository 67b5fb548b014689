"""Raw planar video and PGM map I/O.

Frames are held as float64 arrays with luma in [0, 255]; grayscale maps
(saliency, disparity) travel as PGM series scaled to [0, 1].  All formats
are uncompressed so loading is bit-exact and needs no external decoders.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DescriptorMismatch,
    DimensionMismatch,
    EmptySequence,
    IoError,
    MapSeriesGap,
    MapShapeError,
    NumericError,
    RangeError,
)

PIXEL_FORMATS = ("yuv420p8", "yuv444p8", "gray8")


@dataclass
class Frame:
    """Single-view frame: luma always, 8-bit-range chroma optional."""

    luma: np.ndarray
    chroma_u: np.ndarray | None = None
    chroma_v: np.ndarray | None = None

    def __post_init__(self):
        self.luma = np.asarray(self.luma, dtype=np.float64)
        if self.luma.ndim != 2:
            raise DimensionMismatch("luma must be a 2-D array")
        h, w = self.luma.shape
        if h < 8 or w < 8:
            raise DimensionMismatch(f"frame too small: {w}x{h} (minimum 8x8)")
        if not np.all(np.isfinite(self.luma)):
            raise NumericError("non-finite luma samples")
        for name in ("chroma_u", "chroma_v"):
            c = getattr(self, name)
            if c is not None:
                setattr(self, name, np.asarray(c, dtype=np.float64))

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def width(self) -> int:
        return self.luma.shape[1]


@dataclass
class StereoFrame:
    left: Frame
    right: Frame
    index: int = 0

    def __post_init__(self):
        if self.left.luma.shape != self.right.luma.shape:
            raise DimensionMismatch("left/right dimensions differ")
        if self.index < 0:
            raise RangeError("frame index must be >= 0")


@dataclass
class StereoSequence:
    frames: list[StereoFrame]
    fps: float = 30.0
    name: str = "sequence"

    def __post_init__(self):
        if not self.frames:
            raise EmptySequence("sequence has no frames")
        if self.fps <= 0:
            raise RangeError("fps must be > 0")
        shape = self.frames[0].left.luma.shape
        for i, fr in enumerate(self.frames):
            if fr.left.luma.shape != shape:
                raise DimensionMismatch("all frames must share dimensions")
            fr.index = i

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].left.height

    @property
    def width(self) -> int:
        return self.frames[0].left.width

    def lumas(self, view: str) -> list[np.ndarray]:
        """Luma planes of one view ('left' or 'right'), in frame order."""
        return [getattr(fr, view).luma for fr in self.frames]


@dataclass
class SequenceDescriptor:
    """Pointer to a pair of raw planar streams plus their geometry."""

    left: str
    right: str
    width: int
    height: int
    fps: float
    frames: int
    format: str = "gray8"

    def __post_init__(self):
        if self.format not in PIXEL_FORMATS:
            raise DescriptorMismatch(f"unknown pixel format {self.format!r}")

    def frame_bytes(self) -> int:
        y = self.width * self.height
        if self.format == "gray8":
            return y
        if self.format == "yuv420p8":
            return y + 2 * ((self.width // 2) * (self.height // 2))
        return 3 * y  # yuv444p8

    @classmethod
    def from_json(cls, path: str) -> "SequenceDescriptor":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except FileNotFoundError as exc:
            raise IoError(f"descriptor not found: {path}") from exc
        base = os.path.dirname(os.path.abspath(path))
        for key in ("left", "right"):
            if not os.path.isabs(data[key]):
                data[key] = os.path.join(base, data[key])
        return cls(**data)

    def to_json(self, path: str) -> None:
        data = {
            "left": self.left,
            "right": self.right,
            "width": self.width,
            "height": self.height,
            "fps": self.fps,
            "frames": self.frames,
            "format": self.format,
        }
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")


def _read_view(path: str, desc: SequenceDescriptor) -> bytes:
    if not os.path.exists(path):
        raise IoError(f"missing raw stream: {path}")
    size = os.path.getsize(path)
    expected = desc.frames * desc.frame_bytes()
    if size != expected:
        raise DescriptorMismatch(
            f"{path}: {size} bytes on disk, descriptor implies {expected}"
        )
    with open(path, "rb") as fh:
        return fh.read()


def _split_frame(buf: bytes, offset: int, desc: SequenceDescriptor) -> Frame:
    w, h = desc.width, desc.height
    y = np.frombuffer(buf, np.uint8, w * h, offset).reshape(h, w).astype(np.float64)
    if desc.format == "gray8":
        return Frame(y)
    if desc.format == "yuv420p8":
        cw, ch = w // 2, h // 2
        u = np.frombuffer(buf, np.uint8, cw * ch, offset + w * h)
        v = np.frombuffer(buf, np.uint8, cw * ch, offset + w * h + cw * ch)
        return Frame(y, u.reshape(ch, cw).astype(np.float64),
                     v.reshape(ch, cw).astype(np.float64))
    u = np.frombuffer(buf, np.uint8, w * h, offset + w * h)
    v = np.frombuffer(buf, np.uint8, w * h, offset + 2 * w * h)
    return Frame(y, u.reshape(h, w).astype(np.float64),
                 v.reshape(h, w).astype(np.float64))


def load_sequence(desc: SequenceDescriptor, name: str | None = None) -> StereoSequence:
    """Load a stereo pair of raw planar streams described by ``desc``."""
    if desc.frames == 0:
        raise EmptySequence("descriptor declares zero frames")
    left_buf = _read_view(desc.left, desc)
    right_buf = _read_view(desc.right, desc)
    step = desc.frame_bytes()
    frames = []
    for i in range(desc.frames):
        frames.append(StereoFrame(_split_frame(left_buf, i * step, desc),
                                  _split_frame(right_buf, i * step, desc), i))
    return StereoSequence(frames, fps=desc.fps,
                          name=name or os.path.basename(desc.left))


def _plane_bytes(plane: np.ndarray) -> bytes:
    q = np.floor(np.clip(plane, 0.0, 255.0) + 0.5)  # round, ties up
    return q.astype(np.uint8).tobytes()


def save_sequence(seq: StereoSequence, left_path: str, right_path: str,
                  format: str = "gray8") -> SequenceDescriptor:
    """Write both views as raw planar streams and return their descriptor."""
    if format not in PIXEL_FORMATS:
        raise DescriptorMismatch(f"unknown pixel format {format!r}")
    for view, path in (("left", left_path), ("right", right_path)):
        with open(path, "wb") as fh:
            for fr in seq.frames:
                frame = getattr(fr, view)
                fh.write(_plane_bytes(frame.luma))
                if format == "yuv420p8":
                    ch, cw = seq.height // 2, seq.width // 2
                    for c in (frame.chroma_u, frame.chroma_v):
                        plane = c if c is not None else np.full((ch, cw), 128.0)
                        fh.write(_plane_bytes(plane))
                elif format == "yuv444p8":
                    for c in (frame.chroma_u, frame.chroma_v):
                        plane = c if c is not None else np.full(frame.luma.shape, 128.0)
                        fh.write(_plane_bytes(plane))
    return SequenceDescriptor(left=left_path, right=right_path,
                              width=seq.width, height=seq.height, fps=seq.fps,
                              frames=len(seq), format=format)


_PGM_TOKEN = re.compile(rb"^\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pgm_tokens(buf: bytes, n: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    for _ in range(n):
        m = _PGM_TOKEN.match(buf[pos:])
        if not m:
            raise IoError("truncated PGM header")
        tokens.append(m.group(1))
        pos += m.end(1)
    return tokens, pos


def read_pgm(path: str) -> np.ndarray:
    """Read a binary (P5) PGM, returning values scaled to [0, 1]."""
    if not os.path.exists(path):
        raise IoError(f"missing PGM: {path}")
    with open(path, "rb") as fh:
        buf = fh.read()
    tokens, pos = _pgm_tokens(buf, 4)
    if tokens[0] != b"P5":
        raise IoError(f"{path}: not a binary PGM (P5)")
    width, height, maxval = (int(t) for t in tokens[1:])
    pos += 1  # single whitespace after maxval
    if maxval < 256:
        data = np.frombuffer(buf, np.uint8, width * height, pos)
    else:
        data = np.frombuffer(buf, ">u2", width * height, pos)
    return data.reshape(height, width).astype(np.float64) / maxval


def save_frame_pgm(values: np.ndarray, path: str) -> None:
    """Write a [0, 1] map as an 8-bit binary PGM (round, ties up)."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise RangeError("non-finite map values")
    if values.min() < 0.0 or values.max() > 1.0:
        raise RangeError("map values outside [0, 1]")
    h, w = values.shape
    payload = np.floor(values * 255.0 + 0.5).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(payload.tobytes())


def map_name(index: int) -> str:
    return f"{index:06d}.pgm"


def load_map_series(dir_path: str, expected: dict) -> list[np.ndarray]:
    """Load ``expected['count']`` maps named 000000.pgm... from a directory."""
    width, height, count = expected["width"], expected["height"], expected["count"]
    maps = []
    for i in range(count):
        path = os.path.join(dir_path, map_name(i))
        if not os.path.exists(path):
            raise MapSeriesGap(f"missing map index {i} in {dir_path}")
        m = read_pgm(path)
        if m.shape != (height, width):
            raise MapShapeError(
                f"{path}: {m.shape[1]}x{m.shape[0]}, expected {width}x{height}"
            )
        maps.append(m)
    return maps


def save_map_series(maps, dir_path: str) -> None:
    os.makedirs(dir_path, exist_ok=True)
    for i, m in enumerate(maps):
        save_frame_pgm(np.asarray(m, dtype=np.float64), os.path.join(dir_path, map_name(i)))
