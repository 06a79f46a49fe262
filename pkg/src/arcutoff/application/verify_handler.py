"""Verify use case: the property suite at desk scale."""

import math
from typing import Any, Callable, Dict, List

import numpy as np

from ..domain.model.state import SphereState
from ..domain.service.cutoff_lab import (
    coupon_tail_empirical,
    coupon_tail_exact,
    exact_mode,
    schedule_k,
    tv_bracket_series,
)
from ..domain.service.gaussian_exact import tv_curve_exact
from ..domain.service.replica_streams import StreamTag
from ..domain.service.sphere_walk import (
    coupled_contraction_probe,
    estimate_alpha,
    exact_alpha_d2,
    exhaustive_ratio_check,
)
from ..domain.service.stationary_sampler import (
    compare_forward_backward,
    stationarity_self_test,
)
from ..domain.value_object.scan import ScanMode
from ..infrastructure.config import ExperimentConfig
from .base import EXIT_FAILED, EXIT_OK, BaseHandler, CommandResult


NEGATIVE_CONTROL_DAMPING = 0.5
SANDWICH_LN_N = math.log(1000.0)
SANDWICH_KS = range(2, 61)
ALPHA_STEPS_CAP = 200_000
CONTRACTION_TRIALS = 2000
EXCHANGEABILITY_K = 50


class VerifyHandler(BaseHandler):
    """Runs every check and writes ``verify.json``; exit 1 names the failing checks."""

    command = "verify"
    stream_tags = (StreamTag.SPHERE, StreamTag.CONTRACTION, StreamTag.SELF_TEST,
                   StreamTag.SELF_TEST_REFERENCE, StreamTag.FORWARD,
                   StreamTag.BACKWARD_PARTIAL, StreamTag.COUPON, StreamTag.BALL_FORWARD,
                   StreamTag.BALL_STATIONARY, StreamTag.COUPLING_INDICES,
                   StreamTag.COUPLING_STATIONARY)

    def checks(self) -> List[Callable[[ExperimentConfig], Dict[str, Any]]]:
        return [
            self.check_ratio_bound,
            self.check_hilbert,
            self.check_alpha,
            self.check_stationarity,
            self.check_exchangeability,
            self.check_coupon,
            self.check_schedule,
            self.check_sandwich,
        ]

    def run(self, config: ExperimentConfig) -> CommandResult:
        results = []
        for check in self.checks():
            result = check(config)
            self.log.info("check done", name=result["name"], passed=result["passed"])
            results.append(result)
        failed = [r["name"] for r in results if not r["passed"]]
        report = {"passed": not failed, "failed": failed, "checks": results,
                  "negative_control": config.negative_control}
        artifacts = {"report": self.sink.write_json("verify.json", report)}
        self.write_config(config)
        if failed:
            return CommandResult(EXIT_FAILED, "failed checks: " + ", ".join(failed), report,
                                 artifacts)
        return CommandResult(EXIT_OK, f"all {len(results)} checks passed", report, artifacts)

    def check_ratio_bound(self, config: ExperimentConfig) -> Dict[str, Any]:
        model = config.model
        max_len = 8 if model.d <= 4 else 5
        report = exhaustive_ratio_check(model.network, model.params, model.x0_direction,
                                        max_len=max_len)
        return {"name": "ratio_bound", "passed": report.holds, **report.to_dict()}

    def check_hilbert(self, config: ExperimentConfig) -> Dict[str, Any]:
        model = config.model
        other = SphereState.from_positive(np.arange(1.0, model.d + 1.0))
        report = coupled_contraction_probe(model.network, model.params, model.x0_direction,
                                           other, trials=CONTRACTION_TRIALS, seed=config.seed,
                                           threads=config.threads)
        return {"name": "hilbert_contraction",
                "passed": report.nonexpansive and report.contraction_ok, **report.to_dict()}

    def check_alpha(self, config: ExperimentConfig) -> Dict[str, Any]:
        model = config.model
        scan = config.scan()
        estimate = estimate_alpha(model.network, model.params, scan, burn_in=config.burn_in,
                                  n_steps=min(config.n_steps, ALPHA_STEPS_CAP), seed=config.seed)
        result = {"name": "alpha", **estimate.to_dict()}
        if model.d == 2 and scan.mode in (ScanMode.CYCLE, ScanMode.RANDOM):
            reference = exact_alpha_d2(model.params, scan)
            tolerance = max(1e-3, 4.0 * estimate.std_error)
            result.update(reference=reference, tolerance=tolerance,
                          passed=abs(estimate.alpha_hat - reference) <= tolerance)
        else:
            result["passed"] = estimate.alpha_hat < 0 and not estimate.flagged
        return result

    def check_stationarity(self, config: ExperimentConfig) -> Dict[str, Any]:
        model = config.model
        damping = NEGATIVE_CONTROL_DAMPING if config.negative_control else 1.0
        report = stationarity_self_test(model.network, model.params, config.samples,
                                        config.k_extra, config.seed, scan=config.scan(),
                                        forward_damping_scale=damping, threads=config.threads)
        return {"name": "stationarity", "passed": report.passed,
                "forward_damping_scale": damping, **report.to_dict()}

    def check_exchangeability(self, config: ExperimentConfig) -> Dict[str, Any]:
        model = config.model
        comparison = compare_forward_backward(model.network, model.params, EXCHANGEABILITY_K,
                                              config.replicas, config.seed, scan=config.scan(),
                                              threads=config.threads)
        return {"name": "exchangeability", "passed": comparison.passed, "k": EXCHANGEABILITY_K,
                **comparison.to_dict()}

    def check_coupon(self, config: ExperimentConfig) -> Dict[str, Any]:
        d = config.model.d
        rows = []
        for k in (d, 2 * d, 4 * d):
            p, se = coupon_tail_empirical(d, k, config.replicas, config.seed,
                                          threads=config.threads)
            exact = coupon_tail_exact(d, k)
            rows.append({"k": k, "empirical": p, "exact": exact, "se": se,
                         "ok": abs(p - exact) <= 3.0 * se + 1e-12})
        return {"name": "coupon_collector", "passed": all(r["ok"] for r in rows), "rows": rows}

    def check_schedule(self, config: ExperimentConfig) -> Dict[str, Any]:
        alpha = -0.5
        ln_grid = sorted(config.ln_n_list)
        betas = sorted(config.beta_grid)
        ok = True
        for ln_n in ln_grid:
            ks = [schedule_k(ln_n, b, alpha).k for b in betas]
            ok &= all(b >= a for a, b in zip(ks, ks[1:]))
        for beta in betas:
            ks = [schedule_k(ln_n, beta, alpha).k for ln_n in ln_grid]
            ok &= all(b >= a for a, b in zip(ks, ks[1:]))
        return {"name": "schedule_monotone", "passed": bool(ok)}

    def check_sandwich(self, config: ExperimentConfig) -> Dict[str, Any]:
        """Brackets hold the exact curve (exact mode) or are internally consistent."""
        model = config.model
        scan = config.scan()
        x0 = model.x0_direction.scaled(SANDWICH_LN_N)
        ks = list(SANDWICH_KS)
        brackets = tv_bracket_series(model.network, model.params, x0, ks, config.replicas,
                                     config.seed, scan=scan, threads=config.threads)
        violations = [b.k for b in brackets if not b.consistent]
        if exact_mode(model.network, model.params, scan):
            curve = tv_curve_exact(model.network, model.params, SANDWICH_LN_N,
                                   model.x0_direction, ks[-1])
            for b in brackets:
                point = curve.points[b.k]
                if not (b.lower - b.lower_ci <= point.tv + point.err + 1e-9
                        and point.tv - point.err - 1e-9 <= b.upper + b.upper_ci):
                    violations.append(b.k)
        return {"name": "sandwich", "passed": not violations,
                "violations": sorted(set(violations)), "ks": [ks[0], ks[-1]],
                "exact": exact_mode(model.network, model.params, scan)}
