"""Structured results of identity checks and their JSON / CSV forms."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .gamma_system import format_scalar


def _close(lhs, rhs, tol) -> bool:
    if lhs is None or rhs is None:
        return False
    try:
        diff = abs(lhs - rhs)
    except TypeError:
        return False
    if diff != diff:  # nan
        return False
    return bool(diff <= tol * max(1, abs(lhs)))


def digest(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class IdentityReport:
    """Both sides of one identity instance plus the resolved sign/constant.

    ``passed`` always equals ``|lhs - rhs_resolved| <= tol * max(1, |lhs|)``.
    """

    identity: str
    system: str
    mode: str
    inputs: dict
    lhs: Any
    rhs_paper: Any
    rhs_resolved: Any
    constant: Any = 1
    sign: int = 1
    sign_rule: str = "+1"
    tol: float = 1e-9
    seed: Optional[int] = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return _close(self.lhs, self.rhs_resolved, self.tol)

    @property
    def paper_literal_holds(self) -> bool:
        lhs = self.extras.get("lhs_paper", self.lhs)
        return _close(lhs, self.rhs_paper, self.tol)

    @property
    def inputs_digest(self) -> str:
        return digest(self.inputs)

    def to_json(self) -> dict:
        out = {
            "identity": self.identity,
            "system": self.system,
            "mode": self.mode,
            "inputs_digest": self.inputs_digest,
            "inputs": self.inputs,
            "lhs": format_scalar(self.lhs),
            "rhs_paper": format_scalar(self.rhs_paper),
            "rhs_resolved": format_scalar(self.rhs_resolved),
            "constant": format_scalar(self.constant),
            "sign": int(self.sign),
            "sign_rule": self.sign_rule,
            "pass": self.passed,
            "paper_literal_pass": self.paper_literal_holds,
            "tol": format_scalar(self.tol),
            "seed": self.seed,
        }
        for k, v in self.extras.items():
            out[k] = _jsonable(v)
        return out


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (str, bool)) or v is None:
        return v
    return format_scalar(v)


CSV_FIELDS = [
    "identity",
    "system",
    "mode",
    "inputs_digest",
    "lhs",
    "rhs_paper",
    "rhs_resolved",
    "constant",
    "sign",
    "sign_rule",
    "pass",
    "paper_literal_pass",
    "tol",
    "seed",
]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.to_json() if isinstance(r, IdentityReport) else r)
    return buf.getvalue()
