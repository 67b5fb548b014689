import numpy as np
import pytest

from stereoqa import SeededRng
from stereoqa.media import Frame, StereoFrame, StereoSequence


def make_seq(seed, frames=4, size=64, block=None):
    """Deterministic stereo texture.  With `block` set, lumas are piecewise
    constant on block x block cells so there are genuine step edges."""
    rng = SeededRng(seed)
    out = []
    for i in range(frames):
        views = []
        for _ in range(2):
            if block:
                cells = size // block
                coarse = rng.uniform(cells * cells).reshape(cells, cells) * 255.0
                luma = np.kron(coarse, np.ones((block, block)))
            else:
                luma = rng.uniform(size * size).reshape(size, size) * 255.0
            views.append(Frame(luma=luma))
        out.append(StereoFrame(left=views[0], right=views[1], index=i))
    return StereoSequence(frames=out, fps=25.0)


def flat_seq(value=128.0, frames=4, size=64):
    out = []
    for i in range(frames):
        luma = np.full((size, size), float(value))
        out.append(StereoFrame(left=Frame(luma=luma.copy()),
                               right=Frame(luma=luma.copy()), index=i))
    return StereoSequence(frames=out, fps=25.0)


def seq_from_lumas(lumas_left, lumas_right=None):
    if lumas_right is None:
        lumas_right = lumas_left
    out = []
    for i, (l, r) in enumerate(zip(lumas_left, lumas_right)):
        out.append(StereoFrame(left=Frame(luma=np.asarray(l, dtype=np.float64)),
                               right=Frame(luma=np.asarray(r, dtype=np.float64)),
                               index=i))
    return StereoSequence(frames=out, fps=25.0)


@pytest.fixture
def tiny_seq():
    return make_seq(11, frames=2, size=16)


@pytest.fixture
def textured_seq():
    return make_seq(3, frames=4, size=64, block=8)
