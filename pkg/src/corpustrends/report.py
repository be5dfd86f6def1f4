"""Deterministic renderers: trend tables (Markdown + CSV), volcano scatter,
dendrogram and 2D-projection scatter as SVG 1.1.

All output is byte-deterministic: fixed layout, no timestamps, numbers
formatted with round-half-even.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .compare import LinkageTree, Projection2D
from .trends import AssociationTable, TimeBucket, TargetSpec, top_k
from .volcano import VolcanoRecord

P_FLOOR = 1e-300


@dataclass
class RenderSpec:
    width: int = 640
    height: int = 480
    x_label: str = ""
    y_label: str = ""
    point_size: float = 3.0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("RenderSpec dimensions must be positive")


def _fmt_score(value: float) -> str:
    if math.isnan(value):
        return "(nan)"
    return f"({value:.1f})"


def render_trend_table(
    table: AssociationTable,
    target: TargetSpec,
    buckets: list[TimeBucket],
    k: int = 5,
) -> tuple[str, str]:
    """Render one target's trend table as (markdown, csv).

    One row per semester, five noun/score cells, scores to one decimal,
    "(nan)" for empty cells.
    """
    if not buckets:
        raise ValueError("render_trend_table: buckets must be nonempty")
    md = io.StringIO()
    md.write(f"## Trends of “{target.canonical}”\n\n")
    md.write("| Semester | " + " | ".join(f"Noun {i}" for i in range(1, k + 1)) + " |\n")
    md.write("|" + " --- |" * (k + 1) + "\n")
    csv_buf = io.StringIO()
    writer = csv.writer(csv_buf, lineterminator="\n")
    writer.writerow(["bucket", "target", "term", "score"])
    for bucket in buckets:
        rows = top_k(table, bucket.label, target.canonical, k)
        cells = []
        for i in range(k):
            if i < len(rows):
                term, score = rows[i]
                cells.append(f"{term} {_fmt_score(score)}")
                writer.writerow([bucket.label, target.canonical, term, f"{score:.1f}"])
            else:
                cells.append("(nan)")
        md.write(f"| {bucket.label} | " + " | ".join(cells) + " |\n")
    return md.getvalue(), csv_buf.getvalue()


def _svg_header(spec: RenderSpec) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">\n'
    )


def _axis_scale(values: list[float], lo_px: float, hi_px: float):
    vmin = min(values)
    vmax = max(values)
    if vmax == vmin:
        vmin -= 1.0
        vmax += 1.0
    span = vmax - vmin

    def scale(v: float) -> float:
        return lo_px + (v - vmin) / span * (hi_px - lo_px)

    return scale, vmin, vmax


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def render_volcano_svg(
    records: list[VolcanoRecord],
    specific: set[str],
    p_max: float,
    fc_min: float,
    spec: RenderSpec | None = None,
) -> str:
    """Scatter of log2 fold change vs -log10 p, with threshold guide lines."""
    if not records:
        raise ValueError("render_volcano_svg: need at least one record")
    spec = spec or RenderSpec(x_label="log2 fold change", y_label="-log10 p")
    xs = [r.log2_fc for r in records]
    ys = [-math.log10(max(r.p_value, P_FLOOR)) for r in records]
    margin = 50.0
    sx, *_ = _axis_scale(xs + [fc_min], margin, spec.width - margin)
    sy, *_ = _axis_scale(ys + [-math.log10(max(p_max, P_FLOOR))], spec.height - margin, margin)
    out = [_svg_header(spec)]
    gx = sx(fc_min)
    gy = sy(-math.log10(max(p_max, P_FLOOR)))
    out.append(
        f'<line x1="{gx:.2f}" y1="{margin:.2f}" x2="{gx:.2f}" y2="{spec.height - margin:.2f}" '
        'stroke="#999999" stroke-dasharray="4 2"/>\n'
    )
    out.append(
        f'<line x1="{margin:.2f}" y1="{gy:.2f}" x2="{spec.width - margin:.2f}" y2="{gy:.2f}" '
        'stroke="#999999" stroke-dasharray="4 2"/>\n'
    )
    for r, x, y in zip(records, xs, ys):
        color = "#d62728" if r.term in specific else "#1f77b4"
        out.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="{spec.point_size:.1f}" '
            f'fill="{color}"><title>{_xml_escape(r.term)}</title></circle>\n'
        )
    out.append(
        f'<text x="{spec.width / 2:.0f}" y="{spec.height - 10}" text-anchor="middle" '
        f'font-size="12">{_xml_escape(spec.x_label)}</text>\n'
    )
    out.append(
        f'<text x="15" y="{spec.height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {spec.height / 2:.0f})">{_xml_escape(spec.y_label)}</text>\n'
    )
    out.append("</svg>\n")
    return "".join(out)


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def render_dendrogram_svg(tree: LinkageTree, spec: RenderSpec | None = None) -> str:
    """Leaves equally spaced along x, merge height on the y axis."""
    spec = spec or RenderSpec(y_label="merge distance")
    n = len(tree.leaf_labels)
    margin = 60.0
    max_h = max((h for _, _, h in tree.merges), default=1.0) or 1.0

    def hy(h: float) -> float:
        return (spec.height - margin) - h / max_h * (spec.height - 2 * margin)

    # x position and current height per active node id.
    xpos = {i: margin + i * (spec.width - 2 * margin) / max(1, n - 1) for i in range(n)}
    node_h = {i: 0.0 for i in range(n)}
    out = [_svg_header(spec)]
    nid = n
    for a, b, h in tree.merges:
        xa, xb = xpos[a], xpos[b]
        ya, yb = hy(node_h[a]), hy(node_h[b])
        ym = hy(h)
        out.append(
            f'<polyline fill="none" stroke="#000000" points="'
            f'{xa:.2f},{ya:.2f} {xa:.2f},{ym:.2f} {xb:.2f},{ym:.2f} {xb:.2f},{yb:.2f}"/>\n'
        )
        xpos[nid] = (xa + xb) / 2
        node_h[nid] = h
        nid += 1
    for i, label in enumerate(tree.leaf_labels):
        out.append(
            f'<text x="{xpos[i]:.2f}" y="{spec.height - margin + 15:.2f}" text-anchor="middle" '
            f'font-size="11">{_xml_escape(label)}</text>\n'
        )
    out.append("</svg>\n")
    return "".join(out)


def render_scatter_svg(
    projection: Projection2D,
    labels: dict[str, str] | None = None,
    spec: RenderSpec | None = None,
) -> str:
    """Category-colored scatter with legend; colors assigned by sorted label."""
    if not projection.points:
        raise ValueError("render_scatter_svg: need at least one point")
    spec = spec or RenderSpec()
    labels = labels or {}
    categories = sorted(set(labels.values())) or ["all"]
    color_of = {c: _PALETTE[i % len(_PALETTE)] for i, c in enumerate(categories)}
    margin = 40.0
    xs = [p[0] for p in projection.points.values()]
    ys = [p[1] for p in projection.points.values()]
    sx, *_ = _axis_scale(xs, margin, spec.width - margin)
    sy, *_ = _axis_scale(ys, spec.height - margin, margin)
    out = [_svg_header(spec)]
    for term in sorted(projection.points):
        x, y = projection.points[term]
        cat = labels.get(term, categories[0])
        out.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="{spec.point_size:.1f}" '
            f'fill="{color_of[cat]}"><title>{_xml_escape(term)}</title></circle>\n'
        )
    for i, cat in enumerate(categories):
        ly = 20 + 16 * i
        out.append(f'<rect x="10" y="{ly - 9}" width="10" height="10" fill="{color_of[cat]}"/>\n')
        out.append(f'<text x="25" y="{ly}" font-size="11">{_xml_escape(cat)}</text>\n')
    out.append("</svg>\n")
    return "".join(out)


def render_volcano_csv(records: list[VolcanoRecord], specific: set[str]) -> str:
    """Volcano output CSV: term,count,log2_fc,p_value,df,specific."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["term", "count", "log2_fc", "p_value", "df", "specific"])
    for r in records:
        writer.writerow(
            [
                r.term,
                r.target_count,
                f"{r.log2_fc:.6g}",
                f"{r.p_value:.6g}",
                r.stats.df,
                1 if r.term in specific else 0,
            ]
        )
    return buf.getvalue()
