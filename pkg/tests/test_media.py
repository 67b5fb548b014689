import os

import numpy as np
import pytest

from stereoqa.errors import (
    DescriptorMismatch,
    IoError,
    MapSeriesGap,
    MapShapeError,
    RangeError,
)
from stereoqa.media import (
    Frame,
    SequenceDescriptor,
    load_map_series,
    load_sequence,
    map_name,
    read_pgm,
    save_frame_pgm,
    save_map_series,
    save_sequence,
)

from conftest import make_seq


def test_frame_rejects_tiny_planes():
    with pytest.raises(Exception):
        Frame(luma=np.zeros((4, 4)))


def test_sequence_round_trip_gray8(tmp_path, tiny_seq):
    left = str(tmp_path / "l.raw")
    right = str(tmp_path / "r.raw")
    desc = save_sequence(tiny_seq, left, right)
    back = load_sequence(desc)
    assert len(back) == len(tiny_seq)
    for a, b in zip(tiny_seq.frames, back.frames):
        assert np.abs(a.left.luma - b.left.luma).max() <= 0.5
        assert np.abs(a.right.luma - b.right.luma).max() <= 0.5


def test_save_rounds_half_up(tmp_path):
    seq = make_seq(5, frames=1, size=8)
    seq.frames[0].left.luma[:] = 10.5
    desc = save_sequence(seq, str(tmp_path / "l.raw"), str(tmp_path / "r.raw"))
    back = load_sequence(desc)
    assert back.frames[0].left.luma[0, 0] == 11.0


def test_descriptor_json_round_trip(tmp_path, tiny_seq):
    desc = save_sequence(tiny_seq, str(tmp_path / "l.raw"), str(tmp_path / "r.raw"))
    path = str(tmp_path / "desc.json")
    desc.to_json(path)
    loaded = SequenceDescriptor.from_json(path)
    assert loaded.width == desc.width and loaded.frames == desc.frames


def test_descriptor_relative_paths(tmp_path, tiny_seq):
    desc = save_sequence(tiny_seq, str(tmp_path / "l.raw"), str(tmp_path / "r.raw"))
    desc.left, desc.right = "l.raw", "r.raw"
    path = str(tmp_path / "desc.json")
    desc.to_json(path)
    loaded = SequenceDescriptor.from_json(path)
    assert os.path.isabs(loaded.left)
    load_sequence(loaded)


def test_descriptor_unknown_format():
    with pytest.raises(DescriptorMismatch):
        SequenceDescriptor(left="a", right="b", width=16, height=16,
                           fps=25.0, frames=1, format="rgb48")


def test_missing_descriptor():
    with pytest.raises(IoError):
        SequenceDescriptor.from_json("/nonexistent/desc.json")


def test_pgm_round_trip(tmp_path):
    values = np.linspace(0.0, 1.0, 64).reshape(8, 8)
    path = str(tmp_path / "m.pgm")
    save_frame_pgm(values, path)
    back = read_pgm(path)
    assert back.shape == (8, 8)
    assert np.abs(back * 255 - np.floor(values * 255 + 0.5)).max() < 1e-9


def test_pgm_range_check(tmp_path):
    with pytest.raises(RangeError):
        save_frame_pgm(np.full((8, 8), 1.5), str(tmp_path / "m.pgm"))


def test_pgm_16bit(tmp_path):
    path = tmp_path / "m.pgm"
    data = (np.arange(4).reshape(2, 2) * 100).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(b"P5\n2 2\n65535\n")
        fh.write(data.tobytes())
    back = read_pgm(str(path))
    assert back[1, 1] == pytest.approx(300 / 65535)


def test_map_series_round_trip(tmp_path):
    maps = [np.full((8, 8), v) for v in (0.0, 0.5, 1.0)]
    d = str(tmp_path / "maps")
    save_map_series(maps, d)
    assert sorted(os.listdir(d)) == [map_name(i) for i in range(3)]
    back = load_map_series(d, {"width": 8, "height": 8, "count": 3})
    assert back[1][0, 0] == pytest.approx(0.5, abs=1 / 255)


def test_map_series_gap(tmp_path):
    d = str(tmp_path / "maps")
    save_map_series([np.zeros((8, 8))], d)
    with pytest.raises(MapSeriesGap):
        load_map_series(d, {"width": 8, "height": 8, "count": 2})


def test_map_series_shape_mismatch(tmp_path):
    d = str(tmp_path / "maps")
    save_map_series([np.zeros((8, 8))], d)
    with pytest.raises(MapShapeError):
        load_map_series(d, {"width": 16, "height": 16, "count": 1})


def test_yuv420_round_trip(tmp_path):
    seq = make_seq(9, frames=2, size=16)
    for sf in seq.frames:
        for view in (sf.left, sf.right):
            view.chroma_u = np.full((8, 8), 64.0)
            view.chroma_v = np.full((8, 8), 192.0)
    desc = save_sequence(seq, str(tmp_path / "l.raw"), str(tmp_path / "r.raw"),
                         format="yuv420p8")
    back = load_sequence(desc)
    assert back.frames[0].left.chroma_u is not None
    assert back.frames[0].left.chroma_u[0, 0] == 64.0
    assert back.frames[0].left.chroma_v[0, 0] == 192.0
