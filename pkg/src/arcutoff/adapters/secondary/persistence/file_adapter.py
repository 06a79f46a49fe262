"""File-based result sink."""

from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from ....ports.secondary.result_sink_port import ResultSinkPort
from ....infrastructure.logging import get_logger
from .formatting import dumps_json, format_csv

logger = get_logger(__name__)


class FileResultSink(ResultSinkPort):
    """Writes artifacts into an output directory (created if absent)."""

    def __init__(self, out_dir: str = "./out"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write(self, name: str, text: str) -> str:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='') as f:
            f.write(text)
        logger.debug("wrote artifact", path=str(path), bytes=len(text))
        return str(path)

    def write_json(self, name: str, data: Any) -> str:
        return self._write(name, dumps_json(data))

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        return self._write(name, format_csv(header, rows))

    def write_text(self, name: str, text: str) -> str:
        return self._write(name, text)

    def read_text(self, name: str) -> Optional[str]:
        path = self.out_dir / name
        if not path.exists():
            return None
        return path.read_text()
