"""Named verification results and their JSON form."""
from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

__all__ = ["CheckReport", "jsonable", "timed", "TAGS"]

TAGS = ("PAPER", "TRIVIAL", "DERIVED")


@dataclass
class CheckReport:
    """One verification outcome.

    ``wall_time`` is kept out of :meth:`to_dict` so that serialized reports are
    reproducible; the CLI stores timings in a separate field.
    """

    name: str
    anchor: str
    computed: Any
    reference: Any
    tolerance: Any
    passed: bool
    tag: str
    params: dict = field(default_factory=dict)
    wall_time: float = 0.0
    note: str = ""

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown provenance tag {self.tag!r}")
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        return jsonable(d)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: computed={_short(self.computed)} tol={_short(self.tolerance)}"


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_short(x)}" for k, x in v.items()) + "}"
    return str(v)


def jsonable(obj):
    """Convert numpy scalars/arrays and complex numbers into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0:
            return jsonable(z.real)
        return {"re": jsonable(z.real), "im": jsonable(z.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return float(repr(x))
    return obj


@contextmanager
def timed(report_holder: list):
    t0 = time.perf_counter()
    yield
    dt = time.perf_counter() - t0
    for r in report_holder:
        r.wall_time = dt


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True)
