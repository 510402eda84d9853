"""Dependency-free SVG line plots (polylines plus axes) for experiment output."""

from pathlib import Path

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_plot(path, series, title="", xlabel="", ylabel="",
              width=640, height=420):
    """Write a polyline plot; ``series`` is a list of (x, y, label) triples."""
    margin = 56
    inner_w, inner_h = width - 2 * margin, height - 2 * margin
    xs = [float(v) for x, _, _ in series for v in x]
    ys = [float(v) for _, y, _ in series for v in y]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v):
        return margin + (v - x_lo) / (x_hi - x_lo) * inner_w

    def sy(v):
        return height - margin - (v - y_lo) / (y_hi - y_lo) * inner_h

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    # axes
    parts.append(f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
                 f'y2="{height - margin}" stroke="black"/>')
    parts.append(f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
                 f'y2="{height - margin}" stroke="black"/>')
    for tx in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(tx):.2f}" y1="{height - margin}" '
                     f'x2="{sx(tx):.2f}" y2="{height - margin + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(tx):.2f}" y="{height - margin + 18}" '
                     f'font-size="11" text-anchor="middle">{tx:.4g}</text>')
    for ty in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{margin - 5}" y1="{sy(ty):.2f}" x2="{margin}" '
                     f'y2="{sy(ty):.2f}" stroke="black"/>')
        parts.append(f'<text x="{margin - 8}" y="{sy(ty):.2f}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{ty:.4g}</text>')
    if title:
        parts.append(f'<text x="{width / 2:.0f}" y="22" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{width / 2:.0f}" y="{height - 12}" font-size="12" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{height / 2:.0f}" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 16 {height / 2:.0f})">'
                     f'{ylabel}</text>')
    for i, (x, y, label) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}"
                       for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.3"/>')
        if label:
            ly = margin + 16 + 15 * i
            parts.append(f'<line x1="{width - margin - 120}" y1="{ly - 4}" '
                         f'x2="{width - margin - 100}" y2="{ly - 4}" '
                         f'stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{width - margin - 95}" y="{ly}" '
                         f'font-size="11">{label}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
