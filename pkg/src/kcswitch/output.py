"""Report writers: atomic file output, aligned text tables and SVG bar charts."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr


def atomic_write(path, text: str) -> Path:
    """Write ``text`` as UTF-8 via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def text_table(header, rows) -> str:
    cells = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for j, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759")


def grouped_bar_svg(title: str, groups, series, values, y_label: str = "",
                    width: int = 640, height: int = 400) -> str:
    """Grouped bar chart as a standalone SVG 1.1 document.

    ``values[(group, series_name)]`` is a number or ``None``; every cell gets
    one ``rect.bar`` element, zero-height and marked ``data-empty`` when the
    value is missing.
    """
    left, right, top, bottom = 60, 20, 40, 70
    plot_w, plot_h = width - left - right, height - top - bottom
    present = [v for v in values.values() if v is not None]
    vmax = max(present, default=0.0)
    ymax = max(0.1, -(-vmax * 10 // 1) / 10) if vmax <= 1.0 else vmax * 1.1
    slot = plot_w / max(len(groups), 1)
    bar_w = slot * 0.8 / max(len(series), 1)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{escape(title)}</title>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for tick in range(6):
        val = ymax * tick / 5
        y = top + plot_h - plot_h * tick / 5
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{val:.2f}</text>')
    if y_label:
        out.append(f'<text x="14" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11" '
                   f'transform="rotate(-90 14 {top + plot_h / 2:.1f})">{escape(y_label)}</text>')
    for gi, group in enumerate(groups):
        x0 = left + gi * slot + slot * 0.1
        for si, name in enumerate(series):
            value = values.get((group, name))
            h = 0.0 if value is None else plot_h * value / ymax
            x = x0 + si * bar_w
            attrs = (f'class="bar" data-group={quoteattr(str(group))} '
                     f'data-series={quoteattr(str(name))} ')
            attrs += 'data-empty="true"' if value is None else f'data-value="{value:.6f}"'
            out.append(f'<rect {attrs} x="{x:.2f}" y="{top + plot_h - h:.2f}" '
                       f'width="{bar_w:.2f}" height="{h:.2f}" '
                       f'fill="{PALETTE[si % len(PALETTE)]}"/>')
            label = "n/a" if value is None else f"{value:.3f}"
            out.append(f'<text x="{x + bar_w / 2:.2f}" y="{top + plot_h - h - 4:.2f}" '
                       f'text-anchor="middle" font-family="sans-serif" '
                       f'font-size="9">{label}</text>')
        out.append(f'<text x="{left + gi * slot + slot / 2:.2f}" y="{top + plot_h + 18}" '
                   f'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{escape(str(group))}</text>')
    for si, name in enumerate(series):
        lx = left + si * 130
        ly = height - 22
        out.append(f'<rect x="{lx}" y="{ly - 10}" width="12" height="12" '
                   f'fill="{PALETTE[si % len(PALETTE)]}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
