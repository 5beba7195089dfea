"""Verification report records and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .series import ComparisonResult, format_rational

TOOL_VERSION = "0.1.0"


@dataclass
class VerificationReport:
    """Outcome of one exact (q-adic) identity check."""

    family: str
    params: Dict[str, int]
    order: Fraction
    status: str  # "pass" | "fail" | "error"
    first_mismatch: Optional[Dict[str, object]] = None
    elapsed_ms: int = 0
    tool_version: str = TOOL_VERSION
    message: Optional[str] = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def from_comparison(cls, family: str, params: Dict[str, int], cmp: ComparisonResult,
                        elapsed_ms: int, **extra) -> "VerificationReport":
        mismatch = None
        if cmp.first_mismatch is not None:
            e, lhs, rhs = cmp.first_mismatch
            mismatch = {"exponent": e, "lhs": lhs, "rhs": rhs, **extra}
        return cls(family, dict(params), cmp.compared_up_to, "pass" if cmp.equal else "fail",
                   mismatch, elapsed_ms)

    def to_json(self, timing: bool = True) -> dict:
        mm = None
        if self.first_mismatch is not None:
            mm = {}
            for key, v in self.first_mismatch.items():
                mm[key] = format_rational(v) if isinstance(v, (Fraction,)) else v
        return {
            "family": self.family,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "order": format_rational(self.order),
            "status": self.status,
            "first_mismatch": mm,
            "elapsed_ms": self.elapsed_ms if timing else 0,
            "tool_version": self.tool_version,
        }

    def summary(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = f"{self.family} {ps} order={format_rational(self.order)}: {self.status.upper()}"
        if self.first_mismatch is not None:
            m = self.first_mismatch
            line += (f" (first mismatch at q^{m['exponent']}: lhs={m['lhs']} rhs={m['rhs']}")
            if "n" in m:
                line += f", n={m['n']}"
            line += ")"
        if self.message:
            line += f" [{self.message}]"
        return line + f" [{self.elapsed_ms} ms]"


@dataclass
class NumericReport:
    """Outcome of a floating-point identity check (dilogarithm identities)."""

    family: str
    params: Dict[str, int]
    value: float
    target: float
    tol: float
    status: str
    elapsed_ms: int = 0
    tool_version: str = TOOL_VERSION
    message: Optional[str] = field(default=None, compare=False)

    @property
    def error(self) -> float:
        return abs(self.value - self.target)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, timing: bool = True) -> dict:
        return {
            "family": self.family,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "value": repr(self.value),
            "target": repr(self.target),
            "error": repr(self.error),
            "tol": repr(self.tol),
            "status": self.status,
            "elapsed_ms": self.elapsed_ms if timing else 0,
            "tool_version": self.tool_version,
        }

    def summary(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        line = (f"{self.family} {ps}: {self.status.upper()} value={self.value!r} "
                f"target={self.target!r} error={self.error:.3e} tol={self.tol:.1e}")
        if self.message:
            line += f" [{self.message}]"
        return line


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
