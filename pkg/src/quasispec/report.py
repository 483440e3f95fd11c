"""Self-verifying bound reports and their JSON / CSV serialisation.

A report stores the inputs of every inequality it asserts (bounds, FEM
eigenvalue, classical constants).  Verdicts are never stored as free
facts: ``verdicts()`` recomputes them, ``to_json`` writes the recomputed
values, and ``check_serialized`` recomputes them again from parsed JSON.

CSV output flattens the JSON object into ``key,value`` rows, keys joined
with dots and list items indexed (``entries.0.inv_mu1_bound.ln``).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .bounds import Alpha, AlphaWindow, ClassicalBounds
from .logreal import LogReal
from .metrics import Provenance, QcCoefficient

FEASIBLE = "FEASIBLE"
INFEASIBLE = "INFEASIBLE"
OK = "ok"
VIOLATED = "violated"


def _lr(x: LogReal | None):
    return None if x is None else x.to_json()


def _unlr(obj) -> LogReal | None:
    return None if obj is None else LogReal.from_json(obj)


@dataclass
class BoundEntry:
    """One bound on 1/mu_1 (or the reason it could not be evaluated)."""

    name: str
    status: str
    k: QcCoefficient | None = None
    alpha: Alpha | None = None
    nu: LogReal | None = None
    c_alpha: LogReal | None = None
    inv_mu1_bound: LogReal | None = None
    window: AlphaWindow | None = None
    terms: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "k": None if self.k is None else self.k.to_json(),
            "alpha": None if self.alpha is None else self.alpha.to_json(),
            "nu": _lr(self.nu),
            "c_alpha": _lr(self.c_alpha),
            "inv_mu1_bound": _lr(self.inv_mu1_bound),
            "window": None if self.window is None else self.window.to_json(),
            "terms": self.terms,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BoundEntry":
        k = obj["k"]
        return cls(
            name=obj["name"],
            status=obj["status"],
            k=None if k is None else QcCoefficient(LogReal.from_json(k["k"]), Provenance(k["provenance"])),
            alpha=None if obj["alpha"] is None else Alpha.from_json(obj["alpha"]),
            nu=_unlr(obj["nu"]),
            c_alpha=_unlr(obj["c_alpha"]),
            inv_mu1_bound=_unlr(obj["inv_mu1_bound"]),
            window=None if obj["window"] is None else AlphaWindow.from_json(obj["window"]),
            terms=obj["terms"],
            diagnostics=obj["diagnostics"],
        )


def _bound_verdict(entry: BoundEntry, fem_mu1: float | None) -> str:
    if entry.status != FEASIBLE or entry.inv_mu1_bound is None:
        return INFEASIBLE
    if fem_mu1 is None:
        return "no_reference"
    return OK if LogReal.from_float(1.0 / fem_mu1) <= entry.inv_mu1_bound else VIOLATED


def _classical_verdicts(cb: ClassicalBounds, mu1: float) -> dict:
    out = {
        "szego_upper": OK if mu1 <= cb.szego_upper else VIOLATED,
        "polya_upper": OK if mu1 <= cb.polya_upper else VIOLATED,
    }
    if cb.pw_lower is not None:
        out["pw_lower"] = OK if cb.pw_lower <= mu1 else VIOLATED
    return out


@dataclass
class BoundReport:
    domain: str
    area: float | None
    entries: list[BoundEntry]
    k: QcCoefficient | None = None
    diameter: float | None = None
    convex: bool | None = None
    classical: ClassicalBounds | None = None
    fem_mu1: float | None = None
    fem: dict | None = None
    audit: dict | None = None
    config: dict = field(default_factory=dict)

    def verdicts(self) -> dict:
        out = {"bounds": {e.name: _bound_verdict(e, self.fem_mu1) for e in self.entries}}
        if self.classical is not None and self.fem_mu1 is not None:
            out["classical"] = _classical_verdicts(self.classical, self.fem_mu1)
        out["overall"] = _overall(out)
        return out

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "area": self.area,
            "diameter": self.diameter,
            "convex": self.convex,
            "k": None if self.k is None else self.k.to_json(),
            "entries": [e.to_json() for e in self.entries],
            "classical": None if self.classical is None else self.classical.to_json(),
            "fem_mu1": self.fem_mu1,
            "fem": self.fem,
            "audit": self.audit,
            "config": self.config,
            "verdicts": self.verdicts(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BoundReport":
        k = obj["k"]
        return cls(
            domain=obj["domain"],
            area=obj["area"],
            entries=[BoundEntry.from_json(e) for e in obj["entries"]],
            k=None if k is None else QcCoefficient(LogReal.from_json(k["k"]), Provenance(k["provenance"])),
            diameter=obj["diameter"],
            convex=obj["convex"],
            classical=None if obj["classical"] is None else ClassicalBounds.from_json(obj["classical"]),
            fem_mu1=obj["fem_mu1"],
            fem=obj["fem"],
            audit=obj["audit"],
            config=obj["config"],
        )

    @property
    def overall(self) -> str:
        return self.verdicts()["overall"]


def _overall(v: dict) -> str:
    flat = list(v["bounds"].values()) + list(v.get("classical", {}).values())
    if VIOLATED in flat:
        return VIOLATED
    if v["bounds"] and all(x == INFEASIBLE for x in v["bounds"].values()):
        return INFEASIBLE
    return OK


def dumps(obj: dict) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _flatten(obj, prefix: str, rows: list):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(obj[key], f"{prefix}.{key}" if prefix else str(key), rows)
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            _flatten(item, f"{prefix}.{i}", rows)
    else:
        rows.append((prefix, "" if obj is None else json.dumps(obj)))


def to_csv(obj: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["key", "value"])
    rows: list = []
    _flatten(obj, "", rows)
    w.writerows(rows)
    return buf.getvalue()


def write_report(report: BoundReport | dict, fmt: str = "json") -> bytes:
    obj = report.to_json() if isinstance(report, BoundReport) else report
    if fmt == "json":
        return dumps(obj).encode("utf-8")
    if fmt == "csv":
        return to_csv(obj).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def check_serialized(text: str | bytes) -> bool:
    """Re-derive the verdicts of a serialised report and compare with the stored ones."""
    obj = json.loads(text)
    return BoundReport.from_json(obj).verdicts() == obj["verdicts"]
