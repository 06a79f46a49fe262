"""Chart renderer port interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence


@dataclass
class ChartSeries:
    """One labelled curve, tv against k."""
    label: str
    ks: Sequence[float]
    tvs: Sequence[float]


class ChartPort(ABC):
    """Port for turning curves into a text chart artifact."""

    suffix = ".txt"

    @abstractmethod
    def render(self, series: List[ChartSeries], title: str) -> str:
        """Render all series into one chart document."""
        pass
