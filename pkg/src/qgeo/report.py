"""Report rows and their CSV / JSON serialisation (17 significant digits)."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError

HEADER = ["scenario", "sweep", "quantity", "value_re", "value_im", "reference", "abs_error", "pass"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return _fmt(z.real)
    return f"({_fmt(z.real)}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{_fmt(abs(z.imag))}j)"


@dataclass(frozen=True)
class ReportRow:
    """One compared quantity.

    ``mode='abs'`` passes when ``|value - reference| <= tolerance``.
    ``mode='at_least'`` stores ``max(0, reference - value)`` as the error and
    uses tolerance 0, so it passes when ``value >= reference``.
    """

    scenario: str
    sweep: object
    quantity: str
    value: complex
    reference: complex
    tolerance: float
    mode: str = "abs"

    @property
    def abs_error(self) -> float:
        if self.mode == "at_least":
            return max(0.0, complex(self.reference).real - complex(self.value).real)
        d = complex(self.value) - complex(self.reference)
        with np.errstate(over="ignore"):
            return float(np.hypot(d.real, d.imag))  # inf rather than OverflowError near the float limit

    @property
    def passed(self) -> bool:
        err = self.abs_error
        tol = 0.0 if self.mode == "at_least" else self.tolerance
        return bool(math.isfinite(err) and err <= tol)

    def record(self) -> dict:
        ref = complex(self.reference)
        return {
            "scenario": self.scenario,
            "sweep": self.sweep,
            "quantity": self.quantity,
            "value_re": float(complex(self.value).real),
            "value_im": float(complex(self.value).imag),
            "reference": ref.real if ref.imag == 0 else {"re": ref.real, "im": ref.imag},
            "abs_error": self.abs_error,
            "pass": self.passed,
        }


def _sweep_text(s) -> str:
    if isinstance(s, bool) or s is None:
        return str(s)
    if isinstance(s, (int, float)):
        return _fmt(s)
    return str(s)


def rows_to_csv(rows) -> str:
    if not rows:
        raise ContractError("report needs at least one row")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        v = complex(r.value)
        w.writerow([r.scenario, _sweep_text(r.sweep), r.quantity, _fmt(v.real), _fmt(v.imag),
                    _fmt_complex(r.reference), _fmt(r.abs_error), "true" if r.passed else "false"])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    if not rows:
        raise ContractError("report needs at least one row")

    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return repr(x)
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        return x

    return json.dumps([clean(r.record()) for r in rows], indent=1) + "\n"


def parse_csv(text: str) -> list:
    """Read a report back into dicts with numeric fields parsed."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        rec["value_re"] = float(rec["value_re"])
        rec["value_im"] = float(rec["value_im"])
        ref = complex(rec["reference"])
        rec["reference"] = ref.real if ref.imag == 0 else ref
        rec["abs_error"] = float(rec["abs_error"])
        rec["pass"] = rec["pass"] == "true"
        out.append(rec)
    return out


def emit_report(rows, out_dir, name: str, fmt: str = "csv") -> Path:
    """Write ``<out_dir>/<name>.<fmt>`` and return its path."""
    if fmt not in ("csv", "json"):
        raise ContractError(f"unknown report format {fmt!r}")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{name}.{fmt}"
    target.write_text(text)
    return target
