"""Minimal SVG line and bar charts (no plotting backend needed)."""

from __future__ import annotations

from html import escape as _escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def escape(text: str) -> str:
    # text nodes only; quotes stay literal so step labels keep their apostrophe
    return _escape(text, quote=False)


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda v: a + (v - lo) * (b - a) / span


def line_chart(series: list[dict], x_labels: list[str] | None = None, title: str = "",
               width: int = 900, height: int = 360, y_label: str = "") -> str:
    """Each series is ``{"y": [...], "label": str, "dashed": bool, "color": str?}``.

    x positions are the indices ``1..len(y)``; ``x_labels`` (if given) are
    written under each tick.
    """
    margin_l, margin_r, margin_t, margin_b = 60, 150, 36, 48
    n = max((len(s["y"]) for s in series), default=0)
    ys = [v for s in series for v in s["y"]] or [0.0]
    lo, hi = min(ys), max(ys)
    if lo == hi:
        lo, hi = lo - 1, hi + 1
    fx = _scale(1, max(n, 2), margin_l, width - margin_r)
    fy = _scale(lo, hi, height - margin_b, margin_t)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    x0, x1 = margin_l, width - margin_r
    out.append(f'<line x1="{x0}" y1="{height - margin_b}" x2="{x1}" y2="{height - margin_b}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{margin_t}" x2="{x0}" y2="{height - margin_b}" stroke="black"/>')
    if lo < 0 < hi:
        out.append(f'<line x1="{x0}" y1="{fy(0):.1f}" x2="{x1}" y2="{fy(0):.1f}" stroke="#ccc"/>')
    for v in (lo, (lo + hi) / 2, hi):
        out.append(f'<text x="{x0 - 6}" y="{fy(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    if y_label:
        out.append(f'<text x="14" y="{height / 2:.1f}" transform="rotate(-90 14 {height / 2:.1f})" '
                   f'text-anchor="middle">{escape(y_label)}</text>')
    if x_labels:
        for i, lab in enumerate(x_labels, start=1):
            out.append(f'<text x="{fx(i):.1f}" y="{height - margin_b + 16}" text-anchor="middle">{escape(lab)}</text>')
    for k, s in enumerate(series):
        color = s.get("color", PALETTE[k % len(PALETTE)])
        pts = " ".join(f"{fx(i):.1f},{fy(v):.1f}" for i, v in enumerate(s["y"], start=1))
        dash = ' stroke-dasharray="6,4"' if s.get("dashed") else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>')
        ly = margin_t + 14 * k
        out.append(f'<line x1="{x1 + 10}" y1="{ly}" x2="{x1 + 34}" y2="{ly}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{x1 + 40}" y="{ly + 4}">{escape(s.get("label", f"series {k}"))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(hist: dict[int, int], title: str = "", width: int = 600, height: int = 300,
              x_label: str = "") -> str:
    """Unit-width histogram bars."""
    margin_l, margin_r, margin_t, margin_b = 56, 20, 36, 44
    bins = list(range(min(hist), max(hist) + 1)) if hist else [0]
    top = max(hist.values(), default=1)
    bw = (width - margin_l - margin_r) / len(bins)
    fy = _scale(0, top, height - margin_b, margin_t)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for i, b in enumerate(bins):
        c = hist.get(b, 0)
        if c:
            x = margin_l + i * bw
            out.append(f'<rect x="{x:.1f}" y="{fy(c):.1f}" width="{max(bw - 1, 0.5):.1f}" '
                       f'height="{height - margin_b - fy(c):.1f}" fill="{PALETTE[0]}"/>')
    out.append(f'<line x1="{margin_l}" y1="{height - margin_b}" x2="{width - margin_r}" '
               f'y2="{height - margin_b}" stroke="black"/>')
    out.append(f'<text x="{margin_l}" y="{height - margin_b + 16}">{bins[0]}</text>')
    out.append(f'<text x="{width - margin_r}" y="{height - margin_b + 16}" text-anchor="end">{bins[-1]}</text>')
    out.append(f'<text x="{margin_l - 6}" y="{margin_t + 4}" text-anchor="end">{top}</text>')
    if x_label:
        out.append(f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle">{escape(x_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
