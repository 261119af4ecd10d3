"""Theorem checks and the JSON / CSV report formats."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .estimators import NUMBER_IDS, DEFAULT_SLACK_FRACTION, EstimatorConfig, LyapunovReport
from .zoo import SystemSpec, resolve

SCHEMA_VERSION = "1.0"
SIG_DIGITS = 12
MAX_COORDS = 16

THEOREM_IDS = ("prop2.1", "thm3.1", "thm3.2", "thm4.1-1", "thm4.1-2", "thm4.1-3", "chain")


@dataclass
class TheoremCheckResult:
    theorem_id: str
    relation: str
    applicable: bool
    lhs: float
    rhs: float
    slack: float
    verdict: str  # "pass", "fail" or "not-applicable"

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


@dataclass
class RunManifest:
    """Everything needed to reproduce one estimation run."""

    system: str
    config: EstimatorConfig = field(default_factory=EstimatorConfig)
    out_dir: str = "."
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"manifest schema {self.schema_version!r} != emitter schema {SCHEMA_VERSION!r}")
        # fails early for names the registry does not know
        resolve(self.system, horizon=self.config.horizon)

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "system": self.system,
                "config": self.config.to_dict(), "out_dir": self.out_dir}

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        data = dict(data)
        preset = data.pop("preset", None)
        overrides = data.pop("config", {}) or {}
        if preset is not None:
            config = EstimatorConfig.preset(preset, **overrides)
        else:
            config = EstimatorConfig.from_dict(overrides)
        if "system" not in data:
            raise ValueError("manifest needs a 'system' entry")
        unknown = set(data) - {"system", "out_dir", "schema_version"}
        if unknown:
            raise ValueError(f"unknown manifest keys: {sorted(unknown)}")
        return cls(config=config, **data)

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read manifest {path}: {exc}") from exc
        return cls.from_dict(data)


# --------------------------------------------------------------------------
# theorem checks
# --------------------------------------------------------------------------


def _requires(flags: dict, *names) -> bool:
    # unknown (None) counts as not satisfied
    return all(flags.get(n) is True for n in names)


def theorem_checks(report: LyapunovReport, flags: dict, slack: Optional[float] = None) -> list:
    """Evaluate every theorem row for ``report``.

    The order relations hold for every system and always apply. The other
    rows apply only when the declared flags meet the hypotheses: the
    factor-two bound and both transitive-case equalities need a sensitive
    system, the minimal case stands in for the transitive-or-minimal one,
    and the weak-mixing rows need weak mixing (plus minimality for the
    last one). Unknown flags count as not satisfied.
    """
    if slack is None:
        slack = DEFAULT_SLACK_FRACTION * report.diameter
    L = dict(zip(NUMBER_IDS, report.values))
    diam = report.diameter
    rows = []

    def add(tid, relation, applicable, lhs, rhs, ok):
        verdict = "not-applicable" if not applicable else ("pass" if ok else "fail")
        rows.append(TheoremCheckResult(tid, relation, applicable, float(lhs), float(rhs), float(slack), verdict))

    def equal(tid, relation, applicable, lhs, rhs):
        add(tid, relation, applicable, lhs, rhs, abs(lhs - rhs) <= slack)

    for a, b in (("L2", "L4"), ("L4", "L3"), ("L2", "L1"), ("L1", "L3")):
        add("chain", f"{a}>={b}", True, L[a], L[b], L[a] >= L[b] - slack)
    sensitive = _requires(flags, "sensitive")
    add("prop2.1", "L2<=2*L3", sensitive, L["L2"], 2.0 * L["L3"], L["L2"] <= 2.0 * L["L3"] + slack)
    equal("thm3.1", "L2==L4", sensitive and _requires(flags, "transitive"), L["L2"], L["L4"])
    equal("thm3.2", "L1==L3", sensitive and _requires(flags, "minimal"), L["L1"], L["L3"])
    wm = _requires(flags, "weakly_mixing")
    equal("thm4.1-1", "L2==diam", wm, L["L2"], diam)
    equal("thm4.1-1", "L4==diam", wm, L["L4"], diam)
    equal("thm4.1-2", "L1==L3", wm, L["L1"], L["L3"])
    for key in ("L1", "L3"):
        equal("thm4.1-3", f"{key}==diam", wm and _requires(flags, "minimal"), L[key], diam)
    return rows


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------


def _round(obj):
    """Floats to 12 significant digits, recursively; idempotent."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("reports cannot hold non-finite numbers")
        return float(format(obj, f".{SIG_DIGITS}g"))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if hasattr(obj, "item"):
        return _round(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data: dict) -> str:
    return json.dumps(_round(data), indent=2) + "\n"


def report_to_dict(report: LyapunovReport, spec: Optional[SystemSpec] = None,
                   theorems: Optional[list] = None) -> dict:
    system = {"name": report.system}
    if spec is not None:
        system["params"] = spec.params
        system["flags"] = spec.flags
    curves = {}
    for key in NUMBER_IDS:
        c = report.curves[key]
        mini = report.minimizers[key]
        coords = list(mini["coords"])
        curves[key] = {
            "deltas": c.deltas.tolist(),
            "estimates": c.estimates.tolist(),
            "argmin": c.argmin.tolist(),
            "minimizer": {"index": mini["index"], "coords": coords[:MAX_COORDS],
                          "truncated": len(coords) > MAX_COORDS},
        }
    out = {
        "schema_version": SCHEMA_VERSION,
        "system": system,
        "config": report.config.to_dict(),
        "diameter": {"value": report.diameter, "known": report.diameter_known},
    }
    for key, value in zip(NUMBER_IDS, report.values):
        out[key] = value
    out["curves"] = curves
    out["inequalities"] = [asdict(v) for v in report.inequalities]
    out["theorems"] = [asdict(t) for t in (theorems or [])]
    return out


def curves_csv(report: LyapunovReport) -> str:
    """``number_id,delta,estimate`` rows, coarsest delta first, LF endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["number_id", "delta", "estimate"])
    for key in NUMBER_IDS:
        c = report.curves[key]
        for d, e in zip(c.deltas, c.estimates):
            writer.writerow([key, format(float(d), f".{SIG_DIGITS}g"), format(float(e), f".{SIG_DIGITS}g")])
    return buf.getvalue()


def write_outputs(out_dir, report_json: str, csv_text: str) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rj = out / "report.json"
    cc = out / "curves.csv"
    rj.write_text(report_json, newline="\n")
    cc.write_text(csv_text, newline="\n")
    return rj, cc
