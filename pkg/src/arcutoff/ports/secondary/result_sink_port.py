"""Result sink port interface."""

from abc import ABC, abstractmethod
from typing import Any, Iterable, Optional, Sequence


class ResultSinkPort(ABC):
    """Port for experiment outputs (JSON documents, CSV tables, SVG charts)."""

    @abstractmethod
    def write_json(self, name: str, data: Any) -> str:
        """Write a JSON document, returns its location."""
        pass

    @abstractmethod
    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Write a CSV table, returns its location."""
        pass

    @abstractmethod
    def write_text(self, name: str, text: str) -> str:
        """Write a text artifact (e.g. SVG), returns its location."""
        pass

    @abstractmethod
    def read_text(self, name: str) -> Optional[str]:
        """Read back an artifact, None if absent."""
        pass
