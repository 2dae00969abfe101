"""Scenario configuration, file formats and experiment orchestration.

The harness glues the application modules to flat files: edge lists in,
CSV trajectories and key=value summaries out.  Runs are deterministic
given (config, seed); CSV bodies are byte-stable across repeated runs
(floats are rendered with 17 significant digits and no timestamps enter
the CSV files).
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import localization, opinions, pagerank
from .affine import AffineSystem, fixed_point, iterate_sync, stability_verdict
from .errors import ConfigError, EmptyLog, ParseError, SingularMatrix
from .random_engine import (
    STREAM_KERNELS,
    STREAM_TRUE_STATE,
    ExpectationReport,
    make_stream,
    verify_expectation,
)
from .trajectory import TrajectoryLog, log_points

APPLICATIONS = ("localize", "pagerank", "opinions", "generic-affine")
MODES = ("sync", "gossip", "both")


# ---------------------------------------------------------------- formats

def _float_repr(x) -> str:
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    """Write a CSV with a header row; floats get 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [
                str(c) if isinstance(c, (int, np.integer)) else _float_repr(c)
                for c in row
            ]
            fh.write(",".join(cells) + "\n")


def write_summary(path, entries: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for key, value in entries.items():
            if isinstance(value, float):
                value = _float_repr(value)
            fh.write(f"{key}={value}\n")


def read_summary(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def load_graph(path, kind: str):
    """Parse an edge-list file into an oriented or directed graph.

    Format: one whitespace-separated node pair per line, 0-based ids;
    ``#`` starts a comment, blank lines are skipped; an optional
    ``nodes=K`` line pins the node count (otherwise max id + 1).
    Duplicate edges are rejected at parse time with their line number.
    """
    if kind not in ("oriented", "directed"):
        raise ValueError(f"kind must be 'oriented' or 'directed', got {kind!r}")
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"graph file not found: {path}")
    edges = []
    seen = set()
    n_declared = None
    max_id = -1
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("nodes="):
            try:
                n_declared = int(line.split("=", 1)[1])
            except ValueError:
                raise ParseError(line_no, f"bad node count {line!r}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(line_no, f"expected two node ids, got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(line_no, f"node ids must be integers, got {raw!r}")
        if i < 0 or j < 0:
            raise ParseError(line_no, "node ids must be nonnegative")
        if (i, j) in seen:
            raise ParseError(line_no, f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        edges.append((i, j))
        max_id = max(max_id, i, j)
    n = n_declared if n_declared is not None else max_id + 1
    if kind == "oriented":
        return localization.OrientedGraph(n, tuple(edges))
    return pagerank.WebGraph(n, tuple(edges))


def load_matrix_csv(path) -> np.ndarray:
    """Headerless comma-separated matrix file, one row per line."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"matrix file not found: {path}")
    rows = []
    width = None
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = [float(c) for c in line.split(",")]
        except ValueError:
            raise ParseError(line_no, f"bad numeric row {raw!r}")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(line_no, f"expected {width} values, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(0, f"no data rows in {path}")
    return np.asarray(rows)


def load_vector_csv(path) -> np.ndarray:
    mat = load_matrix_csv(path)
    if mat.shape[1] != 1:
        raise ParseError(0, f"expected one column, got {mat.shape[1]}")
    return mat[:, 0]


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment: application, mode, inputs and parameters."""

    application: str
    mode: str = "gossip"
    graph: str | None = None
    weights: str | None = None
    prejudices: str | None = None
    matrix: str | None = None
    affine_input: str | None = None
    state: str | None = None
    x0: str | None = None
    gamma: float = 0.5
    tau: float | None = None
    m: float = 0.15
    sigma: float = 0.1
    steps: int = 10000
    seed: int = 0
    thin: int = 0
    replications: int = 1
    dump_every: int = 0
    samples: int = 20000
    out: str | None = None

    def __post_init__(self):
        if self.application not in APPLICATIONS:
            raise ConfigError(
                f"unknown application {self.application!r}; expected one of {APPLICATIONS}"
            )
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 < self.m < 1.0:
            raise ConfigError(f"m must be in (0, 1), got {self.m}")
        if self.tau is not None and self.tau <= 0.0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.sigma < 0.0:
            raise ConfigError(f"sigma must be nonnegative, got {self.sigma}")
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.thin < 0 or self.dump_every < 0:
            raise ConfigError("thin and dump_every must be nonnegative")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        needed = {
            "localize": ("graph",),
            "pagerank": ("graph",),
            "opinions": ("weights", "prejudices"),
            "generic-affine": ("matrix", "affine_input"),
        }[self.application]
        for name in needed:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"{self.application} requires --{name.replace('_', '-')}")
            if not Path(value).exists():
                raise ConfigError(f"{name} file not found: {value}")
        if self.application == "generic-affine" and self.mode != "sync":
            raise ConfigError("generic-affine supports mode 'sync' only")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ScenarioConfig":
        """Build from string key/value pairs (config file or merged CLI flags)."""
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if value is None:
                continue
            target = known[name].type
            try:
                if target in ("int", int):
                    kwargs[name] = int(value)
                elif target in ("float", float) or name in ("tau",):
                    kwargs[name] = float(value)
                elif target in ("float | None",):
                    kwargs[name] = float(value)
                else:
                    kwargs[name] = str(value)
            except ValueError:
                raise ConfigError(f"bad value {value!r} for config key {key!r}")
        if "application" not in kwargs:
            raise ConfigError("config must name an application")
        return cls(**kwargs)

    def hash(self) -> str:
        """Stable hash of everything that determines the run (output dir excluded)."""
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name == "out":
                continue
            value = getattr(self, f.name)
            if isinstance(value, float):
                value = _float_repr(value)
            parts.append(f"{f.name}={value}")
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


def parse_config_file(path) -> dict:
    """Flat ``key = value`` text file; # comments and blank lines ignored."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    out = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(line_no, f"expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------- running

def _default_tau(graph: localization.OrientedGraph) -> float:
    # halfway to the divergence threshold
    return 0.5 / graph.max_degree


def _localization_inputs(cfg: ScenarioConfig):
    graph = load_graph(cfg.graph, "oriented")
    if cfg.state is not None:
        s = load_vector_csv(cfg.state)
    else:
        s = make_stream(cfg.seed, STREAM_TRUE_STATE).standard_normal(graph.n)
    meas = localization.synth_measurements(graph, s, cfg.sigma, cfg.seed)
    return graph, meas


def _opinion_network(cfg: ScenarioConfig) -> opinions.InfluenceNetwork:
    return opinions.build_network(
        load_matrix_csv(cfg.weights), load_vector_csv(cfg.prejudices)
    )


def _sync_log(states: np.ndarray, thin: int, oracle: np.ndarray | None, meta: dict) -> TrajectoryLog:
    steps = states.shape[0] - 1
    points = log_points(steps, thin if thin > 0 else max(1, steps // 500))
    columns = {"x": states[points]}
    if oracle is not None:
        columns["err_x_inf"] = np.abs(states[points] - oracle).max(axis=1)
    return TrajectoryLog(steps=points, columns=columns, meta=meta)


def _run_localize_sync(cfg: ScenarioConfig) -> TrajectoryLog:
    graph, meas = _localization_inputs(cfg)
    tau = cfg.tau if cfg.tau is not None else _default_tau(graph)
    traj = localization.grad_descent(graph, meas, tau, cfg.steps)
    oracle = localization.ls_oracle(graph, meas)
    return _sync_log(traj.states, cfg.thin, oracle, {"tau": tau, "seed": cfg.seed})


def _run_localize_gossip(cfg: ScenarioConfig, rep: int) -> TrajectoryLog:
    graph, meas = _localization_inputs(cfg)
    result = localization.run_gossip_localization(
        graph, meas, cfg.gamma, cfg.steps, cfg.seed,
        thin=cfg.thin, stream_path=(rep,),
    )
    return result.log


def _run_pagerank_sync(cfg: ScenarioConfig) -> TrajectoryLog:
    graph = load_graph(cfg.graph, "directed")
    x0 = load_vector_csv(cfg.x0) if cfg.x0 else np.full(graph.n, 1.0 / graph.n)
    traj = pagerank.power_method(graph, cfg.m, cfg.steps, x0)
    pi = fixed_point(pagerank.pagerank_system(graph, cfg.m))
    log = _sync_log(traj.states, cfg.thin, pi, {"m": cfg.m, "seed": cfg.seed})
    log.columns["l1_error_vs_pi"] = np.abs(log.columns["x"] - pi).sum(axis=1)
    return log

def _run_pagerank_gossip(cfg: ScenarioConfig, rep: int) -> TrajectoryLog:
    graph = load_graph(cfg.graph, "directed")
    x0 = load_vector_csv(cfg.x0) if cfg.x0 else None
    result = pagerank.run_gossip_pagerank(
        graph, cfg.m, cfg.steps, cfg.seed, x0=x0,
        thin=cfg.thin, dump_every=cfg.dump_every, stream_path=(rep,),
    )
    return result.log


def _run_opinions_sync(cfg: ScenarioConfig) -> TrajectoryLog:
    net = _opinion_network(cfg)
    traj = iterate_sync(opinions.fj_system(net), net.prejudices, cfg.steps)
    oracle = opinions.fj_fixed_point(net)
    return _sync_log(traj.states, cfg.thin, oracle, {"seed": cfg.seed})


def _run_opinions_gossip(cfg: ScenarioConfig, rep: int) -> TrajectoryLog:
    net = _opinion_network(cfg)
    result = opinions.run_gossip_opinions(
        net, cfg.steps, cfg.seed, thin=cfg.thin, stream_path=(rep,)
    )
    return result.log


def _run_generic_affine(cfg: ScenarioConfig) -> TrajectoryLog:
    system = AffineSystem(load_matrix_csv(cfg.matrix), load_vector_csv(cfg.affine_input))
    x0 = load_vector_csv(cfg.x0) if cfg.x0 else np.zeros(system.dim)
    traj = iterate_sync(system, x0, cfg.steps)
    oracle = None
    if stability_verdict(system).is_stable:
        try:
            oracle = fixed_point(system)
        except SingularMatrix:
            # marginally stable P can pass the certificate yet defeat the solve
            oracle = None
    return _sync_log(traj.states, cfg.thin, oracle, {"seed": cfg.seed})


_GOSSIP_RUNNERS = {
    "localize": _run_localize_gossip,
    "pagerank": _run_pagerank_gossip,
    "opinions": _run_opinions_gossip,
}
_SYNC_RUNNERS = {
    "localize": _run_localize_sync,
    "pagerank": _run_pagerank_sync,
    "opinions": _run_opinions_sync,
    "generic-affine": _run_generic_affine,
}

_HEADLINE_ERROR = {
    "localize": ("err_xtilde_inf", "err_x_inf"),
    "pagerank": ("l1_error_vs_pi",),
    "opinions": ("err_xbar_inf", "err_x_inf"),
    "generic-affine": ("err_x_inf",),
}


def _headline_error(cfg: ScenarioConfig, log: TrajectoryLog) -> tuple:
    for name in _HEADLINE_ERROR[cfg.application]:
        if name in log.columns:
            return name, float(log.columns[name][-1])
    return "", float("nan")


def _write_localization_csvs(out_dir: Path, log: TrajectoryLog, mode: str):
    rows = []
    has_gossip = "xtilde" in log.columns
    for t, step in enumerate(log.steps):
        for node in range(log.columns["x"].shape[1]):
            if has_gossip:
                rows.append(
                    (int(step), node, log.columns["x"][t, node],
                     int(log.columns["kappa"][t, node]), log.columns["xtilde"][t, node])
                )
            else:
                rows.append((int(step), node, log.columns["x"][t, node]))
    header = ["step", "node", "x", "kappa", "x_tilde"] if has_gossip else ["step", "node", "x"]
    write_csv(out_dir / "trajectory.csv", header, rows)


def _write_opinions_csvs(out_dir: Path, log: TrajectoryLog):
    rows = []
    for t, step in enumerate(log.steps):
        for node in range(log.columns["x"].shape[1]):
            rows.append(
                (int(step), node, log.columns["x"][t, node], log.columns["xbar"][t, node])
            )
    write_csv(out_dir / "trajectory.csv", ["step", "node", "x", "x_bar"], rows)


def _write_wide_csv(out_dir: Path, name: str, steps, states: np.ndarray):
    header = ["step"] + [f"x_{i}" for i in range(states.shape[1])]
    rows = [(int(s),) + tuple(states[t]) for t, s in enumerate(steps)]
    write_csv(out_dir / name, header, rows)


def write_run_outputs(cfg: ScenarioConfig, log: TrajectoryLog, out_dir: Path):
    """Write trajectory.csv, errors.csv and app-specific extras for one run."""
    out_dir = Path(out_dir)
    if cfg.application == "localize":
        _write_localization_csvs(out_dir, log, cfg.mode)
    elif cfg.application == "opinions":
        if "xbar" in log.columns:
            _write_opinions_csvs(out_dir, log)
        else:
            _write_wide_csv(out_dir, "trajectory.csv", log.steps, log.columns["x"])
    elif cfg.application == "pagerank":
        if "min_entry" in log.columns:
            rows = [
                (int(s), log.columns["l1_error_vs_pi"][t],
                 log.columns["min_entry"][t], log.columns["sum_entries"][t])
                for t, s in enumerate(log.steps)
            ]
            write_csv(out_dir / "trajectory.csv",
                      ["step", "l1_error_vs_pi", "min_entry", "sum_entries"], rows)
            if "dump_states" in log.meta:
                _write_wide_csv(out_dir, "states.csv",
                                log.meta["dump_steps"], log.meta["dump_states"])
        else:
            _write_wide_csv(out_dir, "trajectory.csv", log.steps, log.columns["x"])
    else:
        _write_wide_csv(out_dir, "trajectory.csv", log.steps, log.columns["x"])

    err_name, _ = _headline_error(cfg, log)
    if err_name:
        rows = [(int(s), log.columns[err_name][t]) for t, s in enumerate(log.steps)]
        write_csv(out_dir / "errors.csv", ["step", "error"], rows)


def _one_gossip_rep(args):
    cfg, rep = args
    return _GOSSIP_RUNNERS[cfg.application](cfg, rep)


def run_scenario(cfg: ScenarioConfig, max_workers: int | None = None) -> TrajectoryLog:
    """Run the configured scenario; returns the primary log (gossip rep 0).

    With ``replications > 1`` the gossip replications fan out over a
    process pool (falling back to serial execution where processes are
    unavailable); results are aggregated in replication order, so the
    summary is deterministic.  When ``cfg.out`` is set, every run writes
    ``trajectory.csv``/``errors.csv`` plus a ``summary.txt``.
    """
    started = time.perf_counter()
    out_root = Path(cfg.out) if cfg.out else None
    modes = ("sync", "gossip") if cfg.mode == "both" else (cfg.mode,)
    primary: TrajectoryLog | None = None
    summary: dict = {
        "application": cfg.application,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "steps": cfg.steps,
        "replications": cfg.replications,
        "config_hash": cfg.hash(),
    }

    for mode in modes:
        mode_dir = None
        if out_root is not None:
            mode_dir = out_root / mode if cfg.mode == "both" else out_root
        mode_cfg = replace(cfg, mode=mode) if cfg.mode == "both" else cfg

        if mode == "sync":
            log = _SYNC_RUNNERS[cfg.application](cfg)
            log.meta["config_hash"] = cfg.hash()
            name, value = _headline_error(mode_cfg, log)
            if name:
                summary[f"sync_final_{name}"] = value
            if mode_dir is not None:
                write_run_outputs(mode_cfg, log, mode_dir)
            if primary is None:
                primary = log
        else:
            reps = list(range(cfg.replications))
            if cfg.replications > 1:
                try:
                    workers = max_workers or min(cfg.replications, os.cpu_count() or 1)
                    with ProcessPoolExecutor(max_workers=workers) as pool:
                        logs = list(pool.map(_one_gossip_rep, [(mode_cfg, r) for r in reps]))
                except (OSError, PermissionError):  # no process support: run serially
                    logs = [_one_gossip_rep((mode_cfg, r)) for r in reps]
            else:
                logs = [_one_gossip_rep((mode_cfg, 0))]
            for rep, log in zip(reps, logs):
                log.meta["config_hash"] = cfg.hash()
                log.meta["replication"] = rep
                name, value = _headline_error(mode_cfg, log)
                if name:
                    summary[f"gossip_final_{name}_rep{rep:03d}"] = value
                if mode_dir is not None:
                    rep_dir = mode_dir / f"rep{rep:03d}" if cfg.replications > 1 else mode_dir
                    write_run_outputs(mode_cfg, log, rep_dir)
            primary = logs[0]

    summary["wall_time_s"] = time.perf_counter() - started
    if out_root is not None:
        write_summary(out_root / "summary.txt", summary)
    assert primary is not None
    return primary


# ----------------------------------------------------- expectation check

@dataclass(frozen=True)
class HarnessExpectationReport:
    """Exact and Monte Carlo views of the kernel-mean identity."""

    exact: ExpectationReport
    mc_p_deviation: float
    mc_u_deviation: float
    mc_std_error: float
    samples: int

    def lines(self) -> list:
        return [
            f"exact_p_deviation={_float_repr(self.exact.p_deviation)}",
            f"exact_u_deviation={_float_repr(self.exact.u_deviation)}",
            f"alpha={_float_repr(self.exact.alpha)}",
            f"exact_pass={self.exact.passed}",
            f"mc_samples={self.samples}",
            f"mc_p_deviation={_float_repr(self.mc_p_deviation)}",
            f"mc_u_deviation={_float_repr(self.mc_u_deviation)}",
            f"mc_std_error={_float_repr(self.mc_std_error)}",
        ]


def scenario_kernels(cfg: ScenarioConfig):
    """Kernel family and lazy target ``(dist, P, u, alpha)`` for the scenario."""
    if cfg.application == "localize":
        graph, meas = _localization_inputs(cfg)
        dist = localization.localization_kernels(graph, meas, cfg.gamma)
        target = localization.gradient_system(graph, meas, cfg.gamma / graph.edge_count)
        return dist, target.p, target.u, 1.0
    if cfg.application == "pagerank":
        graph = load_graph(cfg.graph, "directed")
        dist, alpha = pagerank.pagerank_kernels(graph, cfg.m)
        target = pagerank.pagerank_system(graph, cfg.m)
        return dist, target.p, target.u, alpha
    if cfg.application == "opinions":
        net = _opinion_network(cfg)
        dist = opinions.opinion_kernels(net)
        target = opinions.fj_system(net)
        return dist, target.p, target.u, 1.0 / len(net.edges)
    raise ConfigError(f"no kernel family defined for application {cfg.application!r}")


def verify_expectation_cmd(cfg: ScenarioConfig) -> HarnessExpectationReport:
    """Exact kernel-mean check plus a Monte Carlo cross-estimate."""
    dist, p, u, alpha = scenario_kernels(cfg)
    exact = verify_expectation(dist, p, u, alpha)

    rng = make_stream(cfg.seed, STREAM_KERNELS)
    draws = rng.choice(dist.size, size=cfg.samples, p=dist.probs)
    counts = np.bincount(draws, minlength=dist.size).astype(np.float64)
    mc_p = np.einsum("m,mij->ij", counts, dist.p_stack) / cfg.samples
    mc_u = (counts @ dist.u_stack) / cfg.samples
    lazy_p = (1.0 - alpha) * np.eye(dist.dim) + alpha * p
    mc_p_dev = float(np.abs(mc_p - lazy_p).max())
    mc_u_dev = float(np.abs(mc_u - alpha * u).max())
    # entrywise std error of the MC mean, maximised over entries
    second = np.einsum("m,mij->ij", counts, dist.p_stack**2) / cfg.samples
    entry_var = np.clip(second - mc_p**2, 0.0, None)
    mc_se = float(np.sqrt(entry_var.max() / cfg.samples))

    report = HarnessExpectationReport(
        exact=exact,
        mc_p_deviation=mc_p_dev,
        mc_u_deviation=mc_u_dev,
        mc_std_error=mc_se,
        samples=cfg.samples,
    )
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "expectation_report.txt").write_text("\n".join(report.lines()) + "\n")
    return report


# ---------------------------------------------------------------- plots

def emit_plot_data(log: TrajectoryLog, kind: str, out_path, column: str | None = None) -> Path:
    """Write plot-ready CSV from a log: an error curve or a state fan.

    ``error-curve`` picks ``column`` (or the first 1-D column whose name
    mentions an error) and writes step,error rows.  ``trajectory`` picks
    ``column`` (or the first 2-D column) and writes step,x_0..x_{n-1}.
    """
    log.require_rows()
    out_path = Path(out_path)
    if kind == "error-curve":
        name = column
        if name is None:
            candidates = [
                c for c, arr in log.columns.items() if arr.ndim == 1 and "err" in c
            ]
            if not candidates:
                raise ConfigError("log has no error column for an error-curve")
            name = sorted(candidates)[0]
        if name not in log.columns or log.columns[name].ndim != 1:
            raise ConfigError(f"no scalar column {name!r} in log")
        rows = [(int(s), log.columns[name][t]) for t, s in enumerate(log.steps)]
        write_csv(out_path, ["step", name], rows)
    elif kind == "trajectory":
        name = column
        steps = log.steps
        states = None
        if name is not None and name in log.columns and log.columns[name].ndim == 2:
            states = log.columns[name]
        elif name is None:
            candidates = [c for c, arr in log.columns.items() if arr.ndim == 2]
            if candidates:
                name = sorted(candidates)[0]
                states = log.columns[name]
        if states is None and "dump_states" in log.meta and name in (None, "x"):
            # full-vector dumps ride in meta on their own step grid
            name = "x"
            steps = log.meta["dump_steps"]
            states = log.meta["dump_states"]
        if states is None:
            raise ConfigError(
                f"no per-node column {column!r} in log"
                if column else "log has no per-node column for a trajectory plot"
            )
        header = ["step"] + [f"{name}_{i}" for i in range(states.shape[1])]
        rows = [(int(s),) + tuple(states[t]) for t, s in enumerate(steps)]
        write_csv(out_path, header, rows)
    else:
        raise ConfigError(f"kind must be 'trajectory' or 'error-curve', got {kind!r}")
    return out_path


def read_run_log(run_dir) -> TrajectoryLog:
    """Reconstruct a plot-ready log from a run directory's CSV files."""
    run_dir = Path(run_dir)
    columns: dict = {}
    steps = None

    err_file = run_dir / "errors.csv"
    if err_file.exists():
        body = err_file.read_text().splitlines()
        data = np.asarray([[float(c) for c in line.split(",")] for line in body[1:]])
        if data.size:
            steps = data[:, 0].astype(np.int64)
            columns["error"] = data[:, 1]

    traj_file = run_dir / "trajectory.csv"
    if traj_file.exists():
        body = traj_file.read_text().splitlines()
        header = body[0].split(",")
        data = np.asarray([[float(c) for c in line.split(",")] for line in body[1:]])
        if data.size:
            if header[:2] == ["step", "node"]:
                uniq_steps = np.unique(data[:, 0]).astype(np.int64)
                n = int(data[:, 1].max()) + 1
                for col_idx, name in enumerate(header[2:], start=2):
                    wide = data[:, col_idx].reshape(uniq_steps.shape[0], n)
                    columns[name] = wide
                steps = uniq_steps if steps is None else steps
            elif header[0] == "step" and all(h.startswith("x_") for h in header[1:]):
                steps = data[:, 0].astype(np.int64) if steps is None else steps
                columns["x"] = data[:, 1:]
            else:
                for col_idx, name in enumerate(header[1:], start=1):
                    columns.setdefault(name, data[:, col_idx])
                steps = data[:, 0].astype(np.int64) if steps is None else steps

    # full-vector dumps live on their own (possibly coarser) step grid, so
    # they travel in meta exactly as the in-memory runner logs carry them
    meta: dict = {"source": str(run_dir)}
    dump_file = run_dir / "states.csv"
    if dump_file.exists():
        body = dump_file.read_text().splitlines()
        data = np.asarray([[float(c) for c in line.split(",")] for line in body[1:]])
        if data.size:
            meta["dump_steps"] = data[:, 0].astype(np.int64)
            meta["dump_states"] = data[:, 1:]
            if steps is None:
                steps = meta["dump_steps"]
                columns["x"] = meta["dump_states"]
    if steps is None:
        raise EmptyLog(f"no log files with rows found under {run_dir}")
    return TrajectoryLog(steps=steps, columns=columns, meta=meta)
