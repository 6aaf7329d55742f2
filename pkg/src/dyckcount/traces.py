"""Per-timestep traces of a network on one word, as CSV rows and SVG plots."""

from __future__ import annotations

import csv
import io

from .encoding import decode_prediction, presentation_code
from .harness import classify_sequence
from .languages import LanguageSpec
from .nets import NetParams
from .oracles import depth_profile, target_sequence
from .svg import line_chart


def trace_header(params: NetParams, spec: LanguageSpec) -> list[str]:
    cols = ["t", "input", "target_code", "pred_code", "correct"]
    cols += [f"h_{j}" for j in range(params.H)]
    if params.architecture == "lstm":
        cols += [f"c_{j}" for j in range(params.H)]
    cols += [f"depth_{i}" for i in range(spec.k)]
    return cols


def trace_rows(params: NetParams, spec: LanguageSpec, s: str) -> list[dict]:
    """One row per symbol: input, target and predicted codes, states and pair depths."""
    result = classify_sequence(params, spec, s)
    targets = target_sequence(spec, s)
    depths = [depth_profile(s, p) for p in spec.pairs]
    rows = []
    for t, sym in enumerate(s):
        row = {
            "t": t + 1,
            "input": sym,
            "target_code": presentation_code(targets[t]),
            "pred_code": presentation_code(decode_prediction(result.trace.y[t], spec)),
            "correct": int(result.correct[t]),
        }
        row.update({f"h_{j}": float(v) for j, v in enumerate(result.trace.h[t])})
        if result.trace.c is not None:
            row.update({f"c_{j}": float(v) for j, v in enumerate(result.trace.c[t])})
        row.update({f"depth_{i}": d[t] for i, d in enumerate(depths)})
        rows.append(row)
    return rows


def trace_csv(params: NetParams, spec: LanguageSpec, s: str) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=trace_header(params, spec), lineterminator="\n")
    w.writeheader()
    for row in trace_rows(params, spec, s):
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def trace_svg(params: NetParams, spec: LanguageSpec, s: str, title: str = "") -> str:
    """Cell states (hidden states for RNN/GRU) as solid lines, pair depths dashed.

    Steps with a wrong prediction get an apostrophe after their axis label.
    """
    rows = trace_rows(params, spec, s)
    state = "c" if params.architecture == "lstm" else "h"
    series = [{"y": [r[f"{state}_{j}"] for r in rows], "label": f"{state}_{j}"} for j in range(params.H)]
    series += [{"y": [r[f"depth_{i}"] for r in rows], "dashed": True,
                "label": f"depth {p.open_symbol}{p.close_symbol}"} for i, p in enumerate(spec.pairs)]
    labels = [r["input"] + ("'" if not r["correct"] else "") for r in rows]
    return line_chart(series, labels, title=title or f"{params.architecture.upper()} on {spec.name}")
