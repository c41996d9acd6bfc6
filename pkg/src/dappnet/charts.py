"""Minimal static SVG charts. Output bytes depend only on the input data."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

log = logging.getLogger(__name__)

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60
ORANGE = "#f28e2b"
PURPLE = "#7b3294"
BLUE = "#4e79a7"
GREY = "#555555"


def _n(x: float) -> str:
    return f"{x:.2f}"


def _tick_label(x: float) -> str:
    if abs(x - round(x)) < 1e-9:
        return str(int(round(x)))
    return f"{x:.3g}"


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    x = start
    while x <= hi + 1e-9 * step:
        out.append(round(x, 10))
        x += step
    return out


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str, xr: Tuple[float, float], yr: Tuple[float, float]):
        self.parts: List[str] = []
        self.xr = xr
        self.yr = yr
        self.parts.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
            'font-family="sans-serif" font-size="12">'
        )
        self.parts.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
        self.parts.append(f'<text x="{W / 2:.0f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')
        x0, y0, x1, y1 = LEFT, H - BOTTOM, W - RIGHT, TOP
        self.parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="{GREY}"/>')
        self.parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="{GREY}"/>')
        self.parts.append(
            f'<text x="{(x0 + x1) / 2:.0f}" y="{H - 18}" text-anchor="middle">{escape(xlabel)}</text>'
        )
        self.parts.append(
            f'<text x="18" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {(y0 + y1) / 2:.0f})">{escape(ylabel)}</text>'
        )
        for t in _ticks(*yr):
            y = self.y(t)
            self.parts.append(f'<line x1="{x0 - 4}" y1="{_n(y)}" x2="{x0}" y2="{_n(y)}" stroke="{GREY}"/>')
            self.parts.append(f'<text x="{x0 - 7}" y="{_n(y + 4)}" text-anchor="end">{_tick_label(t)}</text>')

    def x(self, v: float) -> float:
        lo, hi = self.xr
        span = (hi - lo) or 1.0
        return LEFT + (v - lo) / span * (W - LEFT - RIGHT)

    def y(self, v: float) -> float:
        lo, hi = self.yr
        span = (hi - lo) or 1.0
        return H - BOTTOM - (v - lo) / span * (H - TOP - BOTTOM)

    def xticks(self, values: Sequence[float], labels: Optional[Sequence[str]] = None) -> None:
        y0 = H - BOTTOM
        for i, t in enumerate(values):
            x = self.x(t)
            label = labels[i] if labels else _tick_label(t)
            self.parts.append(f'<line x1="{_n(x)}" y1="{y0}" x2="{_n(x)}" y2="{y0 + 4}" stroke="{GREY}"/>')
            self.parts.append(f'<text x="{_n(x)}" y="{y0 + 17}" text-anchor="middle">{escape(label)}</text>')

    def add(self, element: str) -> None:
        self.parts.append(element)

    def legend(self, entries: Sequence[Tuple[str, str]]) -> None:
        for i, (label, color) in enumerate(entries):
            y = TOP + 8 + 16 * i
            self.parts.append(f'<rect x="{W - RIGHT - 150}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
            self.parts.append(f'<text x="{W - RIGHT - 135}" y="{y + 1}">{escape(label)}</text>')

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def bar_chart(title: str, xlabel: str, ylabel: str, labels: Sequence[str], values: Sequence[float],
              color: str = BLUE) -> str:
    top = max(values) if values else 1.0
    c = _Canvas(title, xlabel, ylabel, (0.0, float(len(labels))), (0.0, float(top) or 1.0))
    width = (W - LEFT - RIGHT) / max(len(labels), 1)
    for i, v in enumerate(values):
        x = LEFT + i * width + width * 0.1
        y = c.y(v)
        c.add(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(width * 0.8)}" height="{_n(H - BOTTOM - y)}" fill="{color}"/>')
    step = max(1, len(labels) // 20)
    c.xticks([i + 0.5 for i in range(0, len(labels), step)], [labels[i] for i in range(0, len(labels), step)])
    return c.svg()


def pdf_chart(title: str, xlabel: str, samples: Mapping[float, float]) -> str:
    """Histogram normalised to probabilities, one bar per observed value."""
    total = float(sum(samples.values())) or 1.0
    keys = sorted(samples)
    return bar_chart(title, xlabel, "probability", [_tick_label(k) for k in keys],
                     [samples[k] / total for k in keys])


def binned_pdf(values: Sequence[float], bins: int = 10) -> Dict[float, float]:
    if not values:
        return {}
    lo, hi = min(values), max(values)
    if hi == lo:
        return {round(lo, 3): float(len(values))}
    width = (hi - lo) / bins
    out: Dict[float, float] = {}
    for v in values:
        b = min(int((v - lo) / width), bins - 1)
        centre = round(lo + (b + 0.5) * width, 3)
        out[centre] = out.get(centre, 0.0) + 1.0
    return out


def line_chart(title: str, xlabel: str, ylabel: str, series: Sequence[Mapping]) -> str:
    """Each series: label, xs, ys, color, optional cross_at (x of the cross marker)."""
    xs_all = [x for s in series for x in s["xs"]]
    ys_all = [y for s in series for y in s["ys"] if y is not None and math.isfinite(y)]
    xr = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    yr = (0.0, max(ys_all) * 1.1 if ys_all else 1.0)
    c = _Canvas(title, xlabel, ylabel, xr, yr)
    c.xticks(_ticks(*xr))
    for s in series:
        pts = " ".join(f"{_n(c.x(x))},{_n(c.y(y))}" for x, y in zip(s["xs"], s["ys"]))
        c.add(f'<polyline points="{pts}" fill="none" stroke="{s["color"]}" stroke-width="2"/>')
        cross = s.get("cross_at")
        if cross is not None and cross in s["xs"]:
            y = s["ys"][list(s["xs"]).index(cross)]
            cx, cy = c.x(cross), c.y(y)
            c.add(
                f'<path d="M{_n(cx - 6)},{_n(cy - 6)} L{_n(cx + 6)},{_n(cy + 6)} '
                f'M{_n(cx - 6)},{_n(cy + 6)} L{_n(cx + 6)},{_n(cy - 6)}" '
                f'stroke="black" stroke-width="2" class="cross"/>'
            )
    c.legend([(s["label"], s["color"]) for s in series])
    return c.svg()


def small_world_chart(rows: Sequence[Mapping]) -> str:
    """Real (square) versus random (cross) average path length per network."""
    values = [v for r in rows for v in (r["real_avg_path"], r["random_avg_path_mean"])]
    c = _Canvas("Average path length: real vs random", "network", "average path length",
                (0.0, float(len(rows))), (0.0, max(values) * 1.1 if values else 1.0))
    for i, r in enumerate(rows):
        x = c.x(i + 0.5)
        y = c.y(r["real_avg_path"])
        c.add(f'<rect x="{_n(x - 5)}" y="{_n(y - 5)}" width="10" height="10" fill="{PURPLE}"/>')
        y2 = c.y(r["random_avg_path_mean"])
        c.add(
            f'<path d="M{_n(x - 5)},{_n(y2 - 5)} L{_n(x + 5)},{_n(y2 + 5)} M{_n(x - 5)},{_n(y2 + 5)} '
            f'L{_n(x + 5)},{_n(y2 - 5)}" stroke="{ORANGE}" stroke-width="2"/>'
        )
    c.xticks([i + 0.5 for i in range(len(rows))], [str(r.get("dapp", r.get("name", i))) for i, r in enumerate(rows)])
    c.legend([("real", PURPLE), ("random", ORANGE)])
    return c.svg()


def render_charts(report: Mapping, out_dir: Union[str, Path], prefix: str = "") -> List[Path]:
    """Write one SVG per chartable section of ``report``; returns the paths.

    Recognised sections: degree_histogram, density_values, selfloop_ratios,
    clique_size_histogram, small_world, resilience.
    """
    out_dir = Path(out_dir)
    charts: List[Tuple[str, str]] = []
    deg = report.get("degree_histogram")
    if deg:
        charts.append(("degree_pdf", pdf_chart("Degree distribution (PDF)", "degree",
                                               {int(k): v for k, v in deg.items()})))
    dens = report.get("density_values")
    if dens:
        charts.append(("density_pdf", pdf_chart("Density distribution (PDF)", "density", binned_pdf(dens))))
    loops = report.get("selfloop_ratios")
    if loops:
        names = sorted(loops)
        charts.append(("selfloop_ratio", bar_chart("Nodes connected only by self-loops", "network",
                                                   "ratio", names, [loops[k] for k in names])))
    cliques = report.get("clique_size_histogram")
    if cliques:
        keys = sorted(cliques, key=int)
        charts.append(("clique_sizes", bar_chart("Maximal clique sizes", "clique size", "count",
                                                 [str(k) for k in keys], [cliques[k] for k in keys])))
    sw = [r for r in report.get("small_world") or [] if not r.get("skipped")]
    if sw:
        charts.append(("small_world", small_world_chart(sw)))
    traces = (report.get("resilience") or {}).get("traces") or []
    if traces:
        colors = {"random": ORANGE, "betweenness-static": PURPLE, "degree-static": BLUE}
        series = [
            {
                "label": t["strategy"],
                "xs": t["fractions"],
                "ys": t["avg_path_lengths"],
                "color": colors.get(t["strategy"], GREY),
                "cross_at": t.get("disconnected_at") if t["strategy"] != "random" else None,
            }
            for t in traces
        ]
        charts.append(("resilience", line_chart("Average path length under node removal",
                                                "fraction of nodes removed", "average path length", series)))
    if not charts:
        log.warning("no chartable sections in report; no charts written")
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, svg in charts:
        p = out_dir / f"{prefix}{name}.svg"
        p.write_text(svg, encoding="utf-8")
        paths.append(p)
    return paths
