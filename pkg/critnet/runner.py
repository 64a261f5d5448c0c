"""The simulate, analyze and predict workflows."""

import os
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from typing import Dict, Optional, Union

import numpy as np
import wandb
from omegaconf import DictConfig, OmegaConf

from critnet import __version__
from critnet.analytics import (
    critical_threshold,
    expected_offspring,
    predicted_exponent,
    zeta,
)
from critnet.data import RunManifest, ingest_csv
from critnet.data.utils import (
    fit_record,
    make_out_dir,
    write_avalanches,
    write_ccdf,
    write_drawdowns,
    write_histogram,
    write_index_series,
    write_key_values,
    write_simulation_h5,
)
from critnet.defaults import check_cfg
from critnet.economy import SimConfig, SimResult, run
from critnet.errors import InsufficientDataError, NoVarianceError
from critnet.stats import (
    PowerLawFit,
    ccdf,
    event_sizes,
    extract_drawdowns,
    fit_power_law,
    log_returns,
    summarize,
)

# degree exponents typically seen in economic networks
GAMMA_BAND = (2.1, 2.7)
CRITICAL_TOLERANCE = 1e-3


def run_workflow(cfg: Union[Dict, DictConfig]) -> Dict:
    if isinstance(cfg, Dict):
        cfg = OmegaConf.create(cfg)
    # sanity check on the passed configs
    check_cfg(cfg)

    if cfg.mode == "simulate":
        return simulate(cfg)
    if cfg.mode == "analyze":
        return analyze(cfg)
    return predict(cfg)


def flatten_cfg(cfg: DictConfig, prefix: str = "") -> Dict[str, str]:
    """Dotted key -> YAML scalar text, readable back with OmegaConf.from_dotlist."""
    flat = {}
    for key, value in cfg.items():
        if isinstance(value, DictConfig):
            flat.update(flatten_cfg(value, f"{prefix}{key}."))
        elif value is None:
            flat[prefix + key] = "null"
        elif isinstance(value, bool):
            flat[prefix + key] = str(value).lower()
        else:
            flat[prefix + key] = str(value)
    return flat


def _try_fit(values, **kwargs) -> Optional[PowerLawFit]:
    try:
        return fit_power_law(values, **kwargs)
    except (InsufficientDataError, NoVarianceError):
        return None


def measured_gamma(in_degrees: np.ndarray) -> Optional[float]:
    """Degree exponent from the CCDF regression of the positive in-degrees."""
    k = np.asarray(in_degrees)
    fit = _try_fit(k[k >= 1], method="ccdf", xmin=1)
    return None if fit is None else fit.exponent


def simulation_summary(result: SimResult, cfg_fit: DictConfig) -> Dict:
    sizes = result.avalanche_sizes
    fit = _try_fit(
        sizes,
        method=cfg_fit.method,
        xmin=float(cfg_fit.xmin),
        discrete=cfg_fit.method == "mle",
    )
    gammas = [measured_gamma(s.in_degrees) for s in result.degree_snapshots]
    last_gamma = next((g for g in reversed(gammas) if g is not None), None)

    summary = {
        "d_th": result.d_th,
        "n_avalanches": len(result.avalanches),
        "n_settled": len(result.settle_avalanches),
        "final_edges": result.final_graph.n_edges,
        "fitted_m": fit.exponent if fit is not None else "n/a",
        "predicted_m_target": predicted_exponent(result.config.gamma_target),
    }
    if fit is not None:
        summary.update(fit_record(fit, prefix="fit."))
    for snap, gamma in zip(result.degree_snapshots, gammas):
        summary[f"gamma_step_{snap.step}"] = gamma if gamma is not None else "n/a"
    summary["measured_gamma"] = last_gamma if last_gamma is not None else "n/a"
    if last_gamma is not None:
        summary["predicted_m_measured"] = predicted_exponent(last_gamma)

    try:
        returns = log_returns(result.index_values)
        summary["returns_excess_kurtosis"] = summarize(returns.values).excess_kurtosis
    except (InsufficientDataError, NoVarianceError):
        summary["returns_excess_kurtosis"] = "n/a"
    return summary


def write_simulation(result: SimResult, out_dir: str) -> Dict[str, str]:
    """Write every artifact of a simulate run and return name -> path."""
    make_out_dir(out_dir)
    paths = {
        "index_series": os.path.join(out_dir, "index_series.csv"),
        "avalanches": os.path.join(out_dir, "avalanches.csv"),
        "graph_snapshot": os.path.join(out_dir, "graph_snapshot.txt"),
        "archive": os.path.join(out_dir, "simulation.h5"),
    }
    write_index_series(
        paths["index_series"], result.steps, result.index_values, result.measured_alpha
    )
    write_avalanches(paths["avalanches"], result.avalanches)
    result.final_graph.write_edgelist(
        paths["graph_snapshot"], step=result.config.n_steps
    )
    write_simulation_h5(paths["archive"], result)

    sizes = result.avalanche_sizes
    if sizes.size:
        x, p = ccdf(sizes)
        paths["ccdf"] = write_ccdf(os.path.join(out_dir, "ccdf.csv"), x, p)
    try:
        returns = log_returns(result.index_values)
        stats = summarize(returns.values)
        paths["pdf"] = write_histogram(
            os.path.join(out_dir, "pdf.csv"), stats.bin_edges, stats.density
        )
    except (InsufficientDataError, NoVarianceError):
        pass
    return paths


def print_summary(summary: Dict, title: str) -> None:
    print(title)
    for key, value in summary.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"  {key}: {value}")


def log_to_wandb(cfg: DictConfig, result: SimResult, summary: Dict) -> None:
    wandb_run = wandb.init(
        project=cfg.logging.wandb_project,
        entity=cfg.logging.wandb_entity,
        name=cfg.logging.run_name,
        config=OmegaConf.to_container(cfg),
        save_code=True,
    )
    for step, u, alpha in zip(result.steps, result.index_values, result.measured_alpha):
        wandb_run.log({"U_t": float(u), "alpha_mean": float(alpha)}, step=int(step))
    if result.avalanches:
        wandb_run.log({"avalanche_sizes": wandb.Histogram(result.avalanche_sizes)})
    wandb_run.summary.update(summary)
    wandb_run.finish()


def simulate_once(cfg: Union[Dict, DictConfig], out_dir: str) -> Dict:
    """One simulate run: economy loop, outputs, summary and manifest."""
    if isinstance(cfg, Dict):
        cfg = OmegaConf.create(cfg)
    start_time = datetime.now().isoformat(timespec="seconds")

    config = SimConfig.from_cfg(cfg.sim, seed=cfg.seed)
    result = run(config, log_steps=cfg.logging.log_steps)

    paths = write_simulation(result, out_dir)
    summary = simulation_summary(result, cfg.fit)
    paths["summary"] = write_key_values(os.path.join(out_dir, "summary.txt"), summary)
    paths["config"] = os.path.join(out_dir, "config.yaml")
    OmegaConf.save(config=cfg, f=paths["config"])

    manifest = RunManifest(
        config=flatten_cfg(cfg),
        seed=config.seed,
        d_th=result.d_th,
        version=__version__,
        start_time=start_time,
        end_time=datetime.now().isoformat(timespec="seconds"),
        outputs=paths,
    )
    manifest.write(os.path.join(out_dir, "manifest.txt"))

    if cfg.logging.wandb:
        log_to_wandb(cfg, result, summary)
    return summary


def _replica(args) -> Dict:
    cfg, out_dir = args
    return simulate_once(cfg, out_dir)


def merge_replicas(summaries) -> Dict:
    """Mean and standard deviation of the per-replica exponents."""
    merged = {"replicas": len(summaries)}
    merged["n_avalanches"] = sum(s["n_avalanches"] for s in summaries)
    for key in ("fitted_m", "measured_gamma", "returns_excess_kurtosis"):
        values = [s[key] for s in summaries if isinstance(s[key], float)]
        if values:
            merged[f"{key}_mean"] = float(np.mean(values))
            merged[f"{key}_std"] = float(np.std(values))
            merged[f"{key}_n"] = len(values)
    return merged


def simulate(cfg: DictConfig) -> Dict:
    out_dir = cfg.logging.out_dir
    if cfg.logging.run_name is None:
        data_and_time = datetime.today().strftime("%Y%m%d-%H%M%S")
        cfg.logging.run_name = f"simulate_{data_and_time}"

    n_replicas = cfg.sim.replicas
    if n_replicas == 1:
        summary = simulate_once(cfg, out_dir)
        print_summary(summary, f"Simulation summary ({out_dir}):")
        return summary

    # seed-shifted replicas are independent; only summaries are merged
    jobs = []
    for r in range(n_replicas):
        cfg_r = OmegaConf.to_container(cfg)
        cfg_r["seed"] = cfg.seed + r
        cfg_r["sim"]["replicas"] = 1
        cfg_r["logging"]["run_name"] = f"{cfg.logging.run_name}_replica_{r}"
        jobs.append((cfg_r, os.path.join(out_dir, f"replica_{r}")))

    with ProcessPoolExecutor(max_workers=min(n_replicas, os.cpu_count() or 1)) as pool:
        summaries = list(pool.map(_replica, jobs))

    merged = merge_replicas(summaries)
    make_out_dir(out_dir)
    write_key_values(os.path.join(out_dir, "replicas_summary.txt"), merged)
    print_summary(merged, f"Merged summary of {n_replicas} replicas ({out_dir}):")
    return merged


def analyze(cfg: DictConfig) -> Dict:
    """Drawdown avalanches of an index series and their power-law fit."""
    cfg_a = cfg.analyze
    dataset = ingest_csv(
        cfg_a.input,
        date_col=cfg_a.date_col,
        close_col=cfg_a.close_col,
        name=cfg_a.name,
        min_length=cfg_a.min_length,
    )
    returns = log_returns(dataset.closes)
    events = extract_drawdowns(returns)
    if len(events) < cfg_a.min_events:
        raise InsufficientDataError(
            f"{len(events)} drawdowns in {dataset.name}, "
            f"at least {cfg_a.min_events} needed."
        )

    sizes = event_sizes(events, cfg_a.size_mode)
    xmin = cfg_a.xmin if cfg_a.xmin == "auto" else float(cfg_a.xmin)
    fit = fit_power_law(
        sizes, method=cfg_a.method, xmin=xmin, discrete=cfg_a.size_mode == "length"
    )
    low, high = (predicted_exponent(g) for g in GAMMA_BAND)

    out_dir = make_out_dir(cfg.logging.out_dir)
    write_drawdowns(os.path.join(out_dir, "drawdowns.csv"), events)
    x, p = ccdf(sizes)
    write_ccdf(os.path.join(out_dir, "ccdf.csv"), x, p)
    try:
        stats = summarize(returns.values, bins=cfg_a.bins)
        pdf_path = os.path.join(out_dir, "pdf.csv")
        write_histogram(pdf_path, stats.bin_edges, stats.density)
        kurtosis = stats.excess_kurtosis
    except (InsufficientDataError, NoVarianceError):
        kurtosis = "n/a"

    report = {
        "dataset": dataset.name,
        "n_levels": len(dataset),
        "dropped_rows": dataset.dropped_rows,
        "excluded_returns": returns.excluded_count,
        "n_events": len(events),
        "size_mode": cfg_a.size_mode,
        **fit_record(fit),
        "returns_excess_kurtosis": kurtosis,
        "predicted_band_low": low,
        "predicted_band_high": high,
        "in_predicted_band": bool(low <= fit.exponent <= high),
    }
    write_key_values(os.path.join(out_dir, "fit_report.txt"), report)
    print_summary(report, f"Drawdown analysis of {dataset.name}:")
    return report


def classify(offspring: float, tol: float = CRITICAL_TOLERANCE) -> str:
    if offspring > 1.0 + tol:
        return "supercritical"
    if offspring < 1.0 - tol:
        return "subcritical"
    return "critical"


def predict(cfg: DictConfig) -> Dict:
    """Critical threshold and avalanche exponent for a degree exponent."""
    gamma, k0 = float(cfg.predict.gamma), int(cfg.predict.k0)
    # the degree law k^-gamma must be normalizable
    zeta_gamma = zeta(gamma)
    solution = critical_threshold(gamma, k0)
    intermediate = critical_threshold(gamma, k0, variant="intermediate")

    report = {
        "gamma": gamma,
        "k0": k0,
        "zeta_gamma_plus_1": zeta(gamma + 1.0),
        "zeta_gamma": zeta_gamma,
        "omega": solution.omega,
        "d_th": solution.d_th,
        "omega_intermediate": intermediate.omega,
        "d_th_intermediate": intermediate.d_th,
        "predicted_m": predicted_exponent(gamma),
    }
    if cfg.predict.d_th is not None:
        estimate = expected_offspring(
            solution.with_threshold(float(cfg.predict.d_th)), k_max=cfg.predict.k_max
        )
        report["given_d_th"] = float(cfg.predict.d_th)
        report["expected_offspring"] = estimate.expected_offspring
        report["regime"] = classify(estimate.expected_offspring)

    print_summary(report, "Critical state prediction:")
    return report
