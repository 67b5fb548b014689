"""Per-metric score reports with orientation and a config fingerprint."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

import numpy as np


def config_fingerprint(cfg) -> str:
    """Short stable hash of the effective metric constants."""

    def default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        raise TypeError(type(obj).__name__)

    payload = json.dumps(dataclasses.asdict(cfg), sort_keys=True, default=default)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class MetricReport:
    metric: str
    frame_scores: list[float]
    score: float
    orientation: str  # higher_better | lower_better | composite
    saliency_mode: str
    config_fingerprint: str
    flags: list[str] = dataclasses.field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "score": self.score,
            "frame_scores": list(self.frame_scores),
            "orientation": self.orientation,
            "saliency_mode": self.saliency_mode,
            "config_fingerprint": self.config_fingerprint,
            "flags": list(self.flags),
        }

    def save_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def save_frame_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("frame,score\n")
            for i, s in enumerate(self.frame_scores):
                fh.write(f"{i},{s!r}\n")


def make_report(metric: str, frame_scores, orientation: str, saliency_mode: str,
                cfg, flags=None) -> MetricReport:
    frame_scores = [float(s) for s in frame_scores]
    return MetricReport(
        metric=metric,
        frame_scores=frame_scores,
        score=float(np.mean(frame_scores)),
        orientation=orientation,
        saliency_mode=saliency_mode,
        config_fingerprint=config_fingerprint(cfg),
        flags=list(flags or []),
    )
