"""In-memory result sink for testing."""

import json
from typing import Any, Dict, Iterable, Optional, Sequence

from ....ports.secondary.result_sink_port import ResultSinkPort
from .formatting import dumps_json, format_csv


class InMemoryResultSink(ResultSinkPort):
    """Keeps artifacts as encoded text keyed by name."""

    def __init__(self):
        self.files: Dict[str, str] = {}

    def write_json(self, name: str, data: Any) -> str:
        self.files[name] = dumps_json(data)
        return name

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        self.files[name] = format_csv(header, rows)
        return name

    def write_text(self, name: str, text: str) -> str:
        self.files[name] = text
        return name

    def read_text(self, name: str) -> Optional[str]:
        return self.files.get(name)

    def read_json(self, name: str) -> Optional[Any]:
        text = self.files.get(name)
        return None if text is None else json.loads(text)
