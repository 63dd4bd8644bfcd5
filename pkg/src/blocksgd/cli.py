"""Command-line front end.

Subcommands:
  simulate  Monte Carlo coverage study on the six synthetic models
  prop1     scalar demo contrasting estimator variance with naive bootstrap spread
  fit       stream a CSV once and report bootstrap confidence intervals
  kappa     block-size efficiency curve as CSV
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import bootstrap, datagen, kappa
from .block_stream import IteratorSource, plan_horizon
from .bootstrap import CiConfig, WeightDistribution, derive_rng
from .estimator import EstimatorConfig
from .models import DataError, LossModel, Observation
from .schedules import BlockSchedule, LearningRateSchedule, ParamBox

INIT_SD = math.sqrt(0.1)  # initial iterate drawn N(0, 0.1 I)

RESULT_COLUMNS = ["model", "a", "b", "n", "coef", "coverage", "avg_length", "mse", "reps", "seed", "method"]


def default_block_scale(family: str) -> float:
    return 1.0 if family == "logistic" else 3.0


@dataclass(frozen=True)
class SimulationConfig:
    model_id: int
    n: int = 20000
    block_exponent: float = 0.3
    block_scale: Optional[float] = None
    reps: int = 300
    k: int = 200
    alpha: float = 0.05
    seed: int = 0
    baseline: bool = False
    learning_gamma: float = 10.0
    learning_rho: float = 2.0 / 3.0
    box_halfwidth: float = 10.0

    def __post_init__(self) -> None:
        if self.model_id not in datagen.MODELS:
            raise ValueError(f"unknown model id {self.model_id}; expected 1-6")
        if min(self.n, self.reps, self.k) < 1 or not 0.0 < self.alpha < 1.0:
            raise ValueError("counts must be positive and alpha in (0, 1)")

    @property
    def scale(self) -> float:
        if self.block_scale is not None:
            return self.block_scale
        return default_block_scale(datagen.MODELS[self.model_id].family)


@dataclass(frozen=True)
class ReplicationSummary:
    covered: np.ndarray  # 0/1 per slope coefficient
    length: np.ndarray
    sq_err: np.ndarray


def _summarize(reports, theta_bar: np.ndarray, theta_star: np.ndarray) -> ReplicationSummary:
    slopes = range(3)
    covered = np.array([1.0 if reports[i].lower <= theta_star[i] <= reports[i].upper else 0.0 for i in slopes])
    length = np.array([reports[i].upper - reports[i].lower for i in slopes])
    sq_err = np.array([(theta_bar[i] - theta_star[i]) ** 2 for i in slopes])
    return ReplicationSummary(covered, length, sq_err)


def _aggregate(summaries: Sequence[ReplicationSummary], cfg: SimulationConfig, method: str) -> list[dict]:
    covered = np.array([s.covered for s in summaries])
    length = np.array([s.length for s in summaries])
    sq_err = np.array([s.sq_err for s in summaries])
    # one MSE per cell, pooled over the slope coefficients of each replication
    mse = float(np.mean(np.sqrt(np.sum(sq_err, axis=1))))
    rows = []
    for i in range(3):
        rows.append(
            {
                "model": cfg.model_id,
                "a": cfg.block_exponent,
                "b": cfg.scale,
                "n": cfg.n,
                "coef": f"beta{i + 1}",
                "coverage": float(np.mean(covered[:, i])),
                "avg_length": float(np.mean(length[:, i])),
                "mse": mse,
                "reps": cfg.reps,
                "seed": cfg.seed,
                "method": method,
            }
        )
    return rows


def simulate(cfg: SimulationConfig) -> list[dict]:
    """Coverage/length/MSE study; one row per slope coefficient (and per method)."""
    spec = datagen.MODELS[cfg.model_id]
    model = LossModel(spec.family, spec.dim)
    lr = LearningRateSchedule(cfg.learning_gamma, cfg.learning_rho)
    blocks = BlockSchedule(cfg.scale, cfg.block_exponent)
    box = ParamBox.cube(spec.dim, cfg.box_halfwidth)
    dist = WeightDistribution("exponential_unit")
    block_summaries = []
    vanilla_summaries = []
    for r in range(cfg.reps):
        rep_seed = cfg.seed ^ r
        x, y = datagen.gen_model(spec, cfg.n, derive_rng(rep_seed, 0))
        theta0 = derive_rng(rep_seed, 1).normal(0.0, INIT_SD, spec.dim)
        est = EstimatorConfig(model, lr, blocks, box, theta0)
        ci_cfg = CiConfig(est, cfg.k, cfg.alpha, dist, (rep_seed, 2), (0, 1, 2))
        result = bootstrap.run_with_ci((x, y), ci_cfg)
        block_summaries.append(_summarize(result.reports, result.state.theta_bar, spec.theta_star))
        if cfg.baseline:
            van_cfg = CiConfig(est, cfg.k, cfg.alpha, dist, (rep_seed, 3), (0, 1, 2))
            van = bootstrap.run_vanilla_with_ci((x, y), van_cfg)
            vanilla_summaries.append(_summarize(van.reports, van.state.theta_bar, spec.theta_star))
    rows = _aggregate(block_summaries, cfg, "block")
    if cfg.baseline:
        rows += _aggregate(vanilla_summaries, cfg, "vanilla")
    return rows


def write_rows(path, rows: Sequence[dict], columns: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class Prop1Report:
    sqrt_t_variance: float  # across replications, targets r0 + 2*r1
    mean_bootstrap_variance: float  # conditional spread of weighted copies, targets r0
    theory: dict
    T: int
    reps: int
    k: int
    sigma: float
    seed: int


def prop1(
    T: int,
    reps: int,
    k: int,
    sigma: float,
    seed: int,
    theta_star: float = 0.0,
    learning_gamma: float = 10.0,
    learning_rho: float = 2.0 / 3.0,
) -> Prop1Report:
    """Scalar level-estimation demo on 1-dependent data, without projection.

    The plain recursion's averaged iterates have long-run variance
    r0 + 2*r1, while the multiplier-weighted copies spread only like r0:
    the naive bootstrap misses the autocovariance term.
    """
    if T < 1 or reps < 2 or k < 2:
        raise ValueError("need T >= 1, reps >= 2, k >= 2")
    dist = WeightDistribution("exponential_unit")
    gammas = (np.arange(1, T + 1) + learning_gamma) ** (-learning_rho)
    sqrt_t_means = np.empty(reps)
    boot_vars = np.empty(reps)
    for r in range(reps):
        y = datagen.gen_ma1(theta_star, sigma, T, derive_rng(seed, r, 0))
        weights_rng = derive_rng(seed, r, 1)
        theta = theta_star
        thetas_w = np.full(k, float(theta_star))
        base_sum = 0.0
        w_sum = np.zeros(k)
        chunk = 2048
        for start in range(0, T, chunk):
            stop = min(start + chunk, T)
            w_block = dist.draw(weights_rng, (stop - start, k))
            for t in range(start, stop):
                g = gammas[t]
                theta += g * (y[t] - theta)
                base_sum += theta
                thetas_w += g * w_block[t - start] * (y[t] - thetas_w)
                w_sum += thetas_w
        sqrt_t_means[r] = math.sqrt(T) * (base_sum / T - theta_star)
        boot_vars[r] = T * np.var(w_sum / T, ddof=1)
    return Prop1Report(
        float(np.var(sqrt_t_means, ddof=1)),
        float(np.mean(boot_vars)),
        datagen.ma1_theory(sigma),
        T,
        reps,
        k,
        sigma,
        seed,
    )


@dataclass(frozen=True)
class FitConfig:
    input_path: str
    family: str
    response: str
    features: tuple
    intercept: bool = False
    block_exponent: float = 0.3
    block_scale: Optional[float] = None
    k: int = 200
    alpha: float = 0.05
    seed: int = 0
    learning_gamma: float = 10.0
    learning_rho: float = 2.0 / 3.0
    box_halfwidth: float = 10.0

    @property
    def dim(self) -> int:
        return len(self.features) + (1 if self.intercept else 0)

    @property
    def scale(self) -> float:
        return self.block_scale if self.block_scale is not None else default_block_scale(self.family)


def _csv_observations(cfg: FitConfig, fh) -> Iterator[Observation]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("input CSV is empty") from None
    header = [h.strip() for h in header]
    missing = [c for c in (cfg.response, *cfg.features) if c not in header]
    if missing:
        raise ValueError(f"columns not found in header: {missing}")
    y_idx = header.index(cfg.response)
    x_idx = [header.index(c) for c in cfg.features]
    expected = len(header)
    for line, row in enumerate(reader, start=2):
        if len(row) != expected:
            raise DataError(f"line {line}: expected {expected} fields, found {len(row)}")
        try:
            y = float(row[y_idx])
            x = [float(row[i]) for i in x_idx]
        except ValueError as exc:
            raise DataError(f"line {line}: non-numeric cell ({exc})") from None
        if cfg.intercept:
            x.append(1.0)
        yield Observation(y, np.array(x))


def fit(cfg: FitConfig) -> tuple[list[dict], np.ndarray]:
    """Stream the CSV once; per-coefficient point estimates and intervals."""
    model = LossModel(cfg.family, cfg.dim)
    lr = LearningRateSchedule(cfg.learning_gamma, cfg.learning_rho)
    blocks = BlockSchedule(cfg.scale, cfg.block_exponent)
    box = ParamBox.cube(cfg.dim, cfg.box_halfwidth)
    theta0 = derive_rng(cfg.seed, 1).normal(0.0, INIT_SD, cfg.dim)
    names = list(cfg.features) + (["intercept"] if cfg.intercept else [])
    with open(cfg.input_path, newline="") as fh:
        source = IteratorSource(_csv_observations(cfg, fh))
        est = EstimatorConfig(model, lr, blocks, box, theta0)
        ci_cfg = CiConfig(est, cfg.k, cfg.alpha, WeightDistribution("exponential_unit"), (cfg.seed, 2), tuple(range(cfg.dim)))
        result = bootstrap.run_with_ci(source, ci_cfg)
    rows = []
    for i, report in enumerate(result.reports):
        rows.append(
            {
                "coef": i,
                "name": names[i],
                "point": report.point,
                "lower": report.lower,
                "upper": report.upper,
                "alpha": cfg.alpha,
            }
        )
    return rows, result.samples


def _parse_alphas(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("expected start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("step must be positive")
        grid = []
        value = start
        while value <= stop + 1e-9:
            grid.append(round(value, 12))
            value += step
        return grid
    return [float(text)]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--learning-gamma", type=float, default=10.0)
    parser.add_argument("--learning-rho", type=float, default=2.0 / 3.0)
    parser.add_argument("--box-halfwidth", type=float, default=10.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blocksgd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo coverage study on models 1-6")
    sim.add_argument("--model", type=int, required=True, choices=sorted(datagen.MODELS))
    sim.add_argument("--n", type=int, default=20000)
    sim.add_argument("--a", type=float, default=0.3, help="block exponent")
    sim.add_argument("--b", type=float, default=None, help="block scale (default 3, or 1 for logistic)")
    sim.add_argument("--reps", type=int, default=300)
    sim.add_argument("--k", type=int, default=200, help="bootstrap replicates")
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--baseline", action="store_true", help="also run naive per-observation bootstrap SGD")
    sim.add_argument("--out", default="simulate_results.csv")
    _add_common(sim)

    pr = sub.add_parser("prop1", help="naive-bootstrap failure demo on 1-dependent data")
    pr.add_argument("--T", type=int, default=20000)
    pr.add_argument("--reps", type=int, default=500)
    pr.add_argument("--k", type=int, default=200)
    pr.add_argument("--sigma", type=float, default=math.sqrt(0.5))
    pr.add_argument("--theta-star", type=float, default=0.0)
    pr.add_argument("--out", default="prop1_report.csv")
    _add_common(pr)

    ft = sub.add_parser("fit", help="fit a regression to a CSV stream with bootstrap intervals")
    ft.add_argument("--input", required=True)
    ft.add_argument("--family", required=True, choices=["linear", "lad", "logistic"])
    ft.add_argument("--response", required=True)
    ft.add_argument("--features", required=True, help="comma-separated feature column names")
    ft.add_argument("--intercept", action="store_true")
    ft.add_argument("--a", type=float, default=0.3)
    ft.add_argument("--b", type=float, default=None)
    ft.add_argument("--k", type=int, default=200)
    ft.add_argument("--alpha", type=float, default=0.05)
    ft.add_argument("--out", default="fit_results.csv")
    ft.add_argument("--samples-out", default=None, help="bootstrap sample dump (default <out>.samples.csv)")
    _add_common(ft)

    ka = sub.add_parser("kappa", help="block-size efficiency curve")
    ka.add_argument("--alphas", default="0.0:0.9:0.1", help="grid start:stop:step or single value")
    ka.add_argument("--T", type=int, default=30000)
    ka.add_argument("--out", default="kappa_curve.csv")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        cfg = SimulationConfig(
            model_id=args.model,
            n=args.n,
            block_exponent=args.a,
            block_scale=args.b,
            reps=args.reps,
            k=args.k,
            alpha=args.alpha,
            seed=args.seed,
            baseline=args.baseline,
            learning_gamma=args.learning_gamma,
            learning_rho=args.learning_rho,
            box_halfwidth=args.box_halfwidth,
        )
        rows = simulate(cfg)
        write_rows(args.out, rows, RESULT_COLUMNS)
        print(f"wrote {args.out}")
    elif args.command == "prop1":
        report = prop1(
            args.T, args.reps, args.k, args.sigma, args.seed,
            theta_star=args.theta_star,
            learning_gamma=args.learning_gamma,
            learning_rho=args.learning_rho,
        )
        rows = [
            {"statistic": "sqrt_t_variance", "value": report.sqrt_t_variance, "target": report.theory["longrun"]},
            {"statistic": "mean_bootstrap_variance", "value": report.mean_bootstrap_variance, "target": report.theory["r0"]},
        ]
        write_rows(args.out, rows, ["statistic", "value", "target"])
        print(
            f"estimator sqrt(T)-variance: {report.sqrt_t_variance:.4f} (long-run target {report.theory['longrun']:.4f})"
        )
        print(
            f"mean bootstrap variance:    {report.mean_bootstrap_variance:.4f} (naive target {report.theory['r0']:.4f})"
        )
    elif args.command == "fit":
        cfg = FitConfig(
            input_path=args.input,
            family=args.family,
            response=args.response,
            features=tuple(c.strip() for c in args.features.split(",") if c.strip()),
            intercept=args.intercept,
            block_exponent=args.a,
            block_scale=args.b,
            k=args.k,
            alpha=args.alpha,
            seed=args.seed,
            learning_gamma=args.learning_gamma,
            learning_rho=args.learning_rho,
            box_halfwidth=args.box_halfwidth,
        )
        rows, samples = fit(cfg)
        write_rows(args.out, rows, ["coef", "name", "point", "lower", "upper", "alpha"])
        samples_out = args.samples_out or f"{args.out}.samples.csv"
        bootstrap.write_samples_csv(samples_out, samples)
        print(f"wrote {args.out} and {samples_out}")
    elif args.command == "kappa":
        points = kappa.kappa_curve(_parse_alphas(args.alphas), args.T)
        kappa.write_curve_csv(args.out, points)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
