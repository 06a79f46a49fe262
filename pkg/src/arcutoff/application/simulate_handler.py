"""Simulate use case: one forward trajectory and a batch of stationary draws."""

from ..domain.service.model_core import simulate_forward
from ..domain.service.replica_streams import StreamTag
from ..domain.service.stationary_sampler import sample_stationary_batch
from ..infrastructure.config import ExperimentConfig
from ..infrastructure.metrics import record_replicas
from .base import EXIT_OK, BaseHandler, CommandResult


class SimulateHandler(BaseHandler):
    """Writes ``trajectory.csv``, ``stationary_samples.csv`` and ``stationary.json``.

    The trajectory starts at exp(ln_n) * x0_direction with the first ln_n of
    the config and runs k_max steps.
    """

    command = "simulate"
    stream_tags = (StreamTag.FORWARD, StreamTag.STATIONARY)

    def run(self, config: ExperimentConfig) -> CommandResult:
        model = config.model
        d = model.d
        scan = config.scan()
        ln_n = config.ln_n_list[0]
        x0 = model.x0_direction.scaled(ln_n)
        traj = simulate_forward(model.network, model.params, x0, config.k_max, scan,
                                config.seed, trajectory=True)
        header = ["k", "index", "z"] + [f"x{j + 1}" for j in range(d)]
        rows = [[0, None, None] + traj.states[0].tolist()]
        rows += [[t + 1, int(traj.indices[t]) + 1, float(traj.noise[t])] + traj.states[t + 1].tolist()
                 for t in range(config.k_max)]
        artifacts = {"trajectory": self.sink.write_csv("trajectory.csv", header, rows)}

        batch = sample_stationary_batch(model.network, model.params, config.replicas,
                                        config.seed, scan=scan, threads=config.threads)
        record_replicas("forward", 1, config.k_max)
        record_replicas("stationary", config.replicas)
        artifacts["samples"] = self.sink.write_csv(
            "stationary_samples.csv", [f"x{j + 1}" for j in range(d)], batch.samples.tolist())
        meta = batch.metadata()
        meta["phase"] = 0
        artifacts["stationary"] = self.sink.write_json("stationary.json", meta)
        self.write_config(config)
        message = (f"simulated {config.k_max} steps; {config.replicas} stationary draws "
                   f"({batch.capped_count} capped)")
        return CommandResult(EXIT_OK, message, meta, artifacts)
