"""CSV tables and JSON experiment reports.

Floats are written with 17 significant digits so every value round-trips.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from typing import Any

import numpy as np

from .evolve import DistributionTable, MarginalTable
from .lattice import HeatKernel
from .spinwave import SubsetFunction

REPORT_KEYS = ("experiment", "params", "results", "residuals", "runtime_ms", "version")
_MARK = "\x00"
_MARKED = re.compile(r'"\\u0000([^"]*)\\u0000"')


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _mark_floats(obj: Any) -> Any:
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return _MARK + fmt(obj) + _MARK
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_mark_floats(v) for v in obj]
    return obj


def dumps_json(obj: Any) -> str:
    text = json.dumps(_mark_floats(obj), indent=2)
    return _MARKED.sub(r"\1", text) + "\n"


def make_report(experiment: str, params: dict, results: dict, residuals: dict, runtime_ms: float) -> dict:
    from . import __version__

    return {
        "experiment": experiment,
        "params": params,
        "results": results,
        "residuals": residuals,
        "runtime_ms": runtime_ms,
        "version": __version__,
    }


def strip_runtime(report_text: str) -> str:
    """Drop the wall-time line so two reports can be compared byte for byte."""
    return "".join(line for line in report_text.splitlines(True) if '"runtime_ms"' not in line)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def kernel_csv(kernel: HeatKernel) -> str:
    """One row per source vertex."""
    return _csv([[fmt(v) for v in row] for row in np.asarray(kernel.g)])


def distribution_csv(C: DistributionTable) -> str:
    return _csv([("state", "value")] + [(str(o), fmt(v)) for o, v in C.items()])


def marginal_csv(m: MarginalTable) -> str:
    return _csv([("state", "value")] + [(str(o), fmt(v)) for o, v in m.items()])


def subset_function_csv(f: SubsetFunction) -> str:
    return _csv([("subset", "value")] + [(",".join(map(str, key)), fmt(v)) for key, v in f.items()])
