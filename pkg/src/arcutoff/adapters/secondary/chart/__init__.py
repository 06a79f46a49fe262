"""Chart writers."""

from .svg_chart import ChartSeries, SvgChartRenderer, render_tv_chart

__all__ = ['ChartSeries', 'SvgChartRenderer', 'render_tv_chart']
