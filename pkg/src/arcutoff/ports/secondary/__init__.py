"""Secondary (driven) ports."""

from .chart_port import ChartPort, ChartSeries
from .result_sink_port import ResultSinkPort

__all__ = ['ChartPort', 'ChartSeries', 'ResultSinkPort']
