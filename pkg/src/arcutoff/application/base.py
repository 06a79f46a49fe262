"""Shared plumbing for the use-case handlers."""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional

from ..domain.service.replica_streams import StreamTag
from ..infrastructure.config import ExperimentConfig
from ..infrastructure.logging import get_logger
from ..ports.secondary.result_sink_port import ResultSinkPort

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

logger = get_logger(__name__)


@dataclass
class CommandResult:
    """Outcome of one command: exit code, a one-line message, written artifacts."""
    exit_code: int
    message: str
    summary: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)


class BaseHandler:
    """Handlers write through a result sink and echo the resolved config."""

    command = ""
    stream_tags: Iterable[StreamTag] = ()

    def __init__(self, sink: ResultSinkPort):
        self.sink = sink
        self.log = logger.bind(command=self.command)

    def write_config(self, config: ExperimentConfig, replicas: Optional[int] = None) -> str:
        data = config.to_dict()
        data["command"] = self.command
        data["stream_ids"] = config.stream_ids(tuple(self.stream_tags), replicas)
        self.log.info("run finished", seed=config.seed, out_dir=config.out_dir)
        return self.sink.write_json("config.json", data)

    def run(self, config: ExperimentConfig) -> CommandResult:
        raise NotImplementedError
