"""TV-bounds use case: brackets over a k range for one starting point."""

from ..domain.service.cutoff_lab import exact_mode, tv_bracket_series
from ..domain.service.gaussian_exact import tv_curve_exact
from ..domain.service.replica_streams import StreamTag
from ..infrastructure.config import ExperimentConfig
from ..infrastructure.metrics import record_replicas
from .base import EXIT_OK, BaseHandler, CommandResult

HEADER = ["k", "tv_lower", "lower_ci", "tv_upper", "upper_ci", "tv_exact", "clamped"]


class TVBoundsHandler(BaseHandler):
    """Writes ``bounds.csv`` for k_min..k_max at the first ln_n of the config."""

    command = "tv-bounds"
    stream_tags = (StreamTag.BALL_FORWARD, StreamTag.BALL_STATIONARY,
                   StreamTag.COUPLING_INDICES, StreamTag.COUPLING_STATIONARY)

    def run(self, config: ExperimentConfig) -> CommandResult:
        model = config.model
        scan = config.scan()
        ln_n = config.ln_n_list[0]
        ks = list(range(config.k_min, config.k_max + 1))
        x0 = model.x0_direction.scaled(ln_n)
        brackets = tv_bracket_series(model.network, model.params, x0, ks, config.replicas,
                                     config.seed, scan=scan, threads=config.threads)
        record_replicas("bracket", config.replicas * len(ks))
        exact = None
        if exact_mode(model.network, model.params, scan):
            exact = tv_curve_exact(model.network, model.params, ln_n, model.x0_direction,
                                   config.k_max).tvs
        rows = [[b.k, b.lower, b.lower_ci, b.upper, b.upper_ci,
                 None if exact is None else float(exact[b.k]), b.clamped] for b in brackets]
        artifacts = {"bounds": self.sink.write_csv("bounds.csv", HEADER, rows)}
        inconsistent = [b.k for b in brackets if not b.consistent]
        summary = {"ln_n": ln_n, "k_min": config.k_min, "k_max": config.k_max,
                   "inconsistent_k": inconsistent}
        artifacts["summary"] = self.sink.write_json("bounds.json", summary)
        self.write_config(config)
        return CommandResult(EXIT_OK, f"bracketed {len(ks)} values of k", summary, artifacts)
