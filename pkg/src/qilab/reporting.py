"""Canonical JSON reports, digests and CSV export.

Reports never embed timestamps or other run-varying data: identical
(inputs, config, seed) must produce byte-identical artifacts.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json

from . import __version__
from .asymptotics import RatioProfile
from .dsl import map_to_dict
from .maps import MapExpr
from .sampling import SamplingPlan


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def map_digest(m: MapExpr) -> str:
    return digest(map_to_dict(m))


def plan_digest(plan: SamplingPlan) -> str:
    return digest(plan.to_dict())


def build_report(command: str, plan: SamplingPlan, thresholds: dict,
                 maps: dict[str, MapExpr] | None = None,
                 result: dict | None = None, **extra) -> dict:
    report = {
        "tool": {"name": "qilab", "version": __version__},
        "command": command,
        "plan": {**plan.to_dict(), "digest": plan_digest(plan)},
        "thresholds": thresholds,
        "result": result if result is not None else {},
    }
    if maps:
        report["maps"] = {name: {"digest": map_digest(m),
                                 "expr": map_to_dict(m)}
                          for name, m in maps.items()}
    report.update(extra)
    report["config_digest"] = digest(
        {"plan": plan.to_dict(), "thresholds": thresholds})
    return report


def report_json(report: dict, indent: int = 2) -> str:
    return json.dumps(report, sort_keys=True, indent=indent,
                      allow_nan=False) + "\n"


def profile_csv(profile: RatioProfile) -> str:
    buf = io.StringIO()
    dim = len(profile.entries[0].argmax_direction) if profile.entries else 0
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["radius", "sup_ratio", "inf_ratio"]
                    + [f"argmax_{i}" for i in range(dim)])
    for e in profile.entries:
        writer.writerow([repr(e.radius), repr(e.sup_ratio), repr(e.inf_ratio)]
                        + [repr(c) for c in e.argmax_direction])
    return buf.getvalue()


def write_profile_csv(profile: RatioProfile, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(profile_csv(profile))
