"""Writers of run outputs and the run manifest."""

import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import h5py
import numpy as np
import pandas as pd

from critnet.errors import ConfigurationError

# locale-independent, round-trip exact floats
FLOAT_FORMAT = "%.17g"

INDEX_COLUMNS = ["step", "U_t", "alpha_mean"]
AVALANCHE_COLUMNS = ["trigger_step", "size_s", "node_count_r", "edges_removed"]
DRAWDOWN_COLUMNS = ["start_index", "end_index", "magnitude", "length"]


def make_out_dir(path: str) -> str:
    """Create `path` if needed and check that it is writable."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"Cannot create output directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise ConfigurationError(f"Output directory {path} is not writable.")
    return path


def write_csv(path: str, df: pd.DataFrame) -> str:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_index_series(path: str, steps, values, alphas) -> str:
    df = pd.DataFrame(
        {
            "step": np.asarray(steps, dtype=np.int64),
            "U_t": np.asarray(values, dtype=np.float64),
            "alpha_mean": np.asarray(alphas, dtype=np.float64),
        },
        columns=INDEX_COLUMNS,
    )
    return write_csv(path, df)


def write_records(path: str, records: Sequence, columns: Sequence[str]) -> str:
    """One row per dataclass record, header only if `records` is empty."""
    rows = [[getattr(r, c) for c in columns] for r in records]
    return write_csv(path, pd.DataFrame(rows, columns=list(columns)))


def write_avalanches(path: str, avalanches: Sequence) -> str:
    return write_records(path, avalanches, AVALANCHE_COLUMNS)


def write_drawdowns(path: str, events: Sequence) -> str:
    return write_records(path, events, DRAWDOWN_COLUMNS)


def write_ccdf(path: str, x, p) -> str:
    return write_csv(path, pd.DataFrame({"x": x, "ccdf": p}))


def write_histogram(path: str, bin_edges, density) -> str:
    bin_edges = np.asarray(bin_edges)
    df = pd.DataFrame(
        {"bin_left": bin_edges[:-1], "bin_right": bin_edges[1:], "density": density}
    )
    return write_csv(path, df)


def format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def write_key_values(path: str, items: Dict) -> str:
    """Structured text record, one `key=value` line per item."""
    with open(path, "w", newline="\n") as f:
        for key, value in items.items():
            f.write(f"{key}={format_value(value)}\n")
    return path


def read_key_values(path: str) -> Dict[str, str]:
    items = {}
    with open(path, "r") as f:
        for line in f:
            line = line.rstrip("\n")
            if line and not line.startswith("#"):
                key, _, value = line.partition("=")
                items[key] = value
    return items


def fit_record(fit, prefix: str = "") -> Dict:
    """Flat key/value view of a PowerLawFit."""
    goodness = (
        ("r_squared", fit.r_squared)
        if fit.method == "ccdf"
        else ("log_likelihood", fit.log_likelihood)
    )
    items = {
        "method": fit.method,
        "convention": fit.convention,
        "exponent": fit.exponent,
        "raw_slope": fit.raw_slope if fit.raw_slope is not None else "n/a",
        "xmin": fit.xmin,
        "xmax": fit.xmax if fit.xmax is not None else "n/a",
        goodness[0]: goodness[1],
        "ks_distance": fit.ks_distance,
        "n_points": fit.n_points,
    }
    return {prefix + k: v for k, v in items.items()}


def write_simulation_h5(path: str, result) -> str:
    """HDF5 archive of a SimResult: index series, avalanches, degree snapshots."""
    table = np.array(
        [[getattr(a, c) for c in AVALANCHE_COLUMNS] for a in result.avalanches],
        dtype=np.int64,
    ).reshape(-1, len(AVALANCHE_COLUMNS))

    with h5py.File(path, "w") as f:
        f.attrs["d_th"] = result.d_th
        f.attrs["seed"] = result.config.seed
        f.attrs["n_agents"] = result.config.n_agents
        f.attrs["attractiveness"] = result.config.offset
        index = f.create_group("index")
        index.create_dataset("step", data=np.asarray(result.steps))
        index.create_dataset("U_t", data=np.asarray(result.index_values))
        index.create_dataset("alpha_mean", data=np.asarray(result.measured_alpha))
        ds = f.create_dataset("avalanches", data=table)
        ds.attrs["columns"] = ",".join(AVALANCHE_COLUMNS)
        snapshots = f.create_group("degree_snapshots")
        for snap in result.degree_snapshots:
            snapshots.create_dataset(f"{snap.step:09d}", data=snap.in_degrees)
    return path


def read_simulation_h5(path: str) -> Dict[str, np.ndarray]:
    out = {}
    with h5py.File(path, "r") as f:
        out["d_th"] = float(f.attrs["d_th"])
        for key in ("step", "U_t", "alpha_mean"):
            out[key] = f["index"][key][:]
        out["avalanches"] = f["avalanches"][:]
        out["degree_snapshots"] = {
            int(k): f["degree_snapshots"][k][:] for k in f["degree_snapshots"].keys()
        }
    return out


@dataclass
class RunManifest:
    """Everything needed to reproduce a simulate run bit-exactly.

    Attributes:
        config: Flattened config, dotted keys.
        seed: Seed of the run.
        d_th: Threshold actually used, solved when the config says "auto".
        version: critnet version.
        start_time: ISO wall time at start.
        end_time: ISO wall time at the end.
        outputs: Output name -> path.
    """

    config: Dict[str, str] = field(default_factory=dict)
    seed: int = 0
    d_th: Optional[float] = None
    version: str = ""
    start_time: str = ""
    end_time: str = ""
    outputs: Dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"seed={self.seed}",
            f"d_th={format_value(self.d_th)}",
            f"version={self.version}",
            f"start_time={self.start_time}",
            f"end_time={self.end_time}",
        ]
        lines += [f"config.{k}={v}" for k, v in self.config.items()]
        lines += [f"output.{k}={v}" for k, v in self.outputs.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        manifest = cls()
        for line in text.splitlines():
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if key.startswith("config."):
                manifest.config[key[len("config.") :]] = value
            elif key.startswith("output."):
                manifest.outputs[key[len("output.") :]] = value
            elif key == "seed":
                manifest.seed = int(value)
            elif key == "d_th":
                manifest.d_th = None if value == "None" else float(value)
            elif key in ("version", "start_time", "end_time"):
                setattr(manifest, key, value)
        return manifest

    def write(self, path: str) -> str:
        with open(path, "w", newline="\n") as f:
            f.write(self.to_text())
        return path

    @classmethod
    def read(cls, path: str) -> "RunManifest":
        with open(path, "r") as f:
            return cls.from_text(f.read())

    def dotlist(self, exclude: Optional[Iterable[str]] = None) -> list:
        """Config entries as OmegaConf dotlist overrides."""
        exclude = set(exclude or ())
        return [f"{k}={v}" for k, v in self.config.items() if k not in exclude]
