"""Line charts of total-variation curves as standalone SVG."""

import xml.etree.ElementTree as ET
from typing import List

from ....ports.secondary.chart_port import ChartPort, ChartSeries

WIDTH = 800
HEIGHT = 600
MARGIN_LEFT = 70
MARGIN_RIGHT = 150
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_tv_chart(series: List[ChartSeries], title: str = "total variation vs k",
                    y_label: str = "tv") -> str:
    """One polyline per series on linear axes k in [0, k_max], tv in [0, 1]."""
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    k_max = max((max(s.ks) for s in series if len(s.ks)), default=1.0) or 1.0

    def x_of(k: float) -> float:
        return MARGIN_LEFT + plot_w * float(k) / k_max

    def y_of(tv: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - min(1.0, max(0.0, float(tv))))

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(WIDTH),
        "height": str(HEIGHT),
        "viewBox": f"0 0 {WIDTH} {HEIGHT}",
    })
    ET.SubElement(svg, "rect", {"x": "0", "y": "0", "width": str(WIDTH),
                                "height": str(HEIGHT), "fill": "white"})
    ET.SubElement(svg, "text", {"x": str(WIDTH // 2), "y": "24",
                                "text-anchor": "middle", "font-size": "16"}).text = title

    axes = ET.SubElement(svg, "g", {"stroke": "black", "stroke-width": "1"})
    ET.SubElement(axes, "line", {"x1": _fmt(x_of(0)), "y1": _fmt(y_of(0)),
                                 "x2": _fmt(x_of(k_max)), "y2": _fmt(y_of(0))})
    ET.SubElement(axes, "line", {"x1": _fmt(x_of(0)), "y1": _fmt(y_of(0)),
                                 "x2": _fmt(x_of(0)), "y2": _fmt(y_of(1))})

    labels = ET.SubElement(svg, "g", {"font-size": "12", "fill": "black"})
    for j in range(6):
        tv = j / 5.0
        ET.SubElement(labels, "text", {"x": _fmt(x_of(0) - 8), "y": _fmt(y_of(tv) + 4),
                                       "text-anchor": "end"}).text = f"{tv:.1f}"
    for j in range(6):
        k = k_max * j / 5.0
        ET.SubElement(labels, "text", {"x": _fmt(x_of(k)), "y": _fmt(y_of(0) + 18),
                                       "text-anchor": "middle"}).text = f"{k:g}"
    ET.SubElement(labels, "text", {"x": _fmt(MARGIN_LEFT + plot_w / 2), "y": str(HEIGHT - 15),
                                   "text-anchor": "middle"}).text = "k"
    ET.SubElement(labels, "text", {"x": "20", "y": _fmt(MARGIN_TOP + plot_h / 2),
                                   "text-anchor": "middle"}).text = y_label

    lines = ET.SubElement(svg, "g", {"fill": "none", "stroke-width": "1.5"})
    legend = ET.SubElement(svg, "g", {"font-size": "12"})
    for j, s in enumerate(series):
        color = PALETTE[j % len(PALETTE)]
        points = " ".join(f"{_fmt(x_of(k))},{_fmt(y_of(tv))}" for k, tv in zip(s.ks, s.tvs))
        ET.SubElement(lines, "polyline", {"points": points, "stroke": color})
        y = MARGIN_TOP + 10 + 18 * j
        x = WIDTH - MARGIN_RIGHT + 15
        ET.SubElement(legend, "line", {"x1": str(x), "y1": str(y), "x2": str(x + 20),
                                       "y2": str(y), "stroke": color, "stroke-width": "2"})
        ET.SubElement(legend, "text", {"x": str(x + 26), "y": str(y + 4)}).text = s.label

    return ET.tostring(svg, encoding="unicode") + "\n"


class SvgChartRenderer(ChartPort):
    """``ChartPort`` adapter writing standalone SVG."""

    suffix = ".svg"

    def render(self, series: List[ChartSeries], title: str) -> str:
        return render_tv_chart(series, title)
