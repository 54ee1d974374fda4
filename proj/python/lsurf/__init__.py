"""Quasi-minimal Lorentz surfaces in R^4_2: charts, invariants, Gauss-map
classification, and verification suites backed by the native core."""

import json as _json

from ._core import (
    Chart,
    Error,
    applicable_suites,
    beltrami,
    builtin_chart,
    builtin_chart_names,
    frame,
    gauss,
    integrability,
    metric,
    suite_names,
)
from ._core import build_chart as _build_chart
from ._core import classify_json as _classify_json
from ._core import verify_json as _verify_json

__all__ = [
    "Chart",
    "Error",
    "applicable_suites",
    "beltrami",
    "build_chart",
    "builtin_chart",
    "builtin_chart_names",
    "classify",
    "frame",
    "gauss",
    "integrability",
    "metric",
    "spec",
    "suite_names",
    "verify",
]


def build_chart(spec, tolerances=None):
    """Build a chart from a spec given as a dict or a JSON string."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _build_chart(text, tolerances or {})


def spec(chart):
    """Resolved spec of a built chart, as a dict."""
    return _json.loads(chart.spec_json)


def classify(chart, grid=(20, 20), margin=0.0, tolerances=None):
    """Classification report over a sampling grid, as a dict."""
    n0, n1 = grid
    return _json.loads(_classify_json(chart, n0, n1, margin, tolerances or {}))


def verify(chart, suites=None, grid=(20, 20), margin=0.0, tolerances=None):
    """Run verification suites (all applicable ones by default); returns one
    dict per suite."""
    n0, n1 = grid
    return _json.loads(
        _verify_json(chart, suites or [], n0, n1, margin, tolerances or {})
    )
