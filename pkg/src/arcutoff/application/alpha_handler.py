"""Estimate-alpha use case."""

from ..domain.service.replica_streams import StreamTag
from ..domain.service.sphere_walk import estimate_alpha
from ..infrastructure.config import ExperimentConfig
from ..infrastructure.metrics import record_replicas
from .base import EXIT_OK, BaseHandler, CommandResult


class AlphaHandler(BaseHandler):
    """Runs the sphere walk and writes ``alpha.json``."""

    command = "estimate-alpha"
    stream_tags = (StreamTag.SPHERE,)

    def run(self, config: ExperimentConfig) -> CommandResult:
        model = config.model
        scan = config.scan()
        estimate = estimate_alpha(model.network, model.params, scan, burn_in=config.burn_in,
                                  n_steps=config.n_steps, seed=config.seed)
        record_replicas("sphere", 1, config.burn_in + config.n_steps)
        path = self.sink.write_json("alpha.json", estimate.to_dict())
        self.write_config(config, replicas=1)
        message = f"alpha_hat = {estimate.alpha_hat:.6f} +/- {estimate.std_error:.6f} ({scan.mode.value})"
        return CommandResult(EXIT_OK, message, estimate.to_dict(), {"alpha": path})
