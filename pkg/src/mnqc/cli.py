"""Command-line entry point: ``mnqc <subcommand> [--config PATH] [--out DIR] ...``.

Every subcommand writes CSV/JSON files plus ``manifest.json`` into the output
directory. Result files are byte-identical for identical configuration and
seed; only the manifest's ``runtime_s`` varies between runs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import densmat as dm
from . import m2o
from .bench.circuits import build_benchmark, lower_to_cx
from .bench.executor import LinkSpec, LinkUnavailableError, execute
from .bench.gap import gap_scan, prepare
from .bench.qv import quantum_volume
from .bench.topology import NodeTopology, RoutingError, circuit_stats, route
from .config import ConfigError, RunConfig, parse_config
from .distill import DistillationConfig, NoiseParams, nested_distillation
from .dqpe import (
    ESTIMATORS,
    REFERENCE_PHASE,
    DqpeCostQuery,
    cost_report,
    distributed_kickback_likelihood,
    kickback_closed_form,
    qpe_link_error_curve,
    qpe_relative_error,
)
from .gate import teleported_cx
from .pipeline import achievable_frontier, distillation_input, link_operating_point, pareto_front
from .qcpa import (
    QFT_LINK_GATES,
    QFT_LINK_GATES_ROUTED,
    DomainError,
    crossover_infidelity,
    overhead_table,
    rows_to_csv,
)
from .roofline import (
    REFERENCE_CCR,
    REFERENCE_STATS,
    RooflineMachine,
    classify_bound,
    compute_ccr,
    distillation_shift,
    polyline_csv,
)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DOMAIN = 4
EXIT_NUMERICAL = 5
EXIT_LINK = 6
EXIT_IO = 7

SUBCOMMANDS = ("m2o-sweep", "distill", "gate", "gap", "qv", "roofline", "qcpa", "dqpe", "pipeline")


def _plain(x):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return _plain(x.item())
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def rows_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in r.items()})
    return buf.getvalue()


class Writer:
    """Single writer for one run; remembers every file for the manifest."""

    def __init__(self, out: Path):
        self.out = out
        self.outputs = []
        out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        data = text.encode()
        (self.out / name).write_bytes(data)
        self.outputs.append({"path": name, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})

    def manifest(self, command: str, cfg: RunConfig, runtime: float) -> None:
        record = {
            "command": command,
            "config_echo": cfg.echo(),
            "seed": cfg.seed,
            "outputs": sorted(self.outputs, key=lambda o: o["path"]),
            "runtime_s": runtime,
            "versions": {
                "mnqc": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
        }
        (self.out / "manifest.json").write_text(dumps(record))


# -- subcommands ---------------------------------------------------------------


def _operating_point(cfg: RunConfig):
    return link_operating_point(cfg.preset, cfg.pump_power, cfg.pe, cfg.rounds, cfg.noise)


def run_m2o_sweep(cfg: RunConfig, w: Writer, args) -> None:
    preset = m2o.get_preset(cfg.preset)
    by_pe = m2o.sweep_excitation_probability(preset, cfg.grids.pe, cfg.pump_power)
    powers = [m2o.pump_power_for_cooperativity(preset, c) for c in sorted(cfg.grids.cooperativity)]
    by_power = m2o.sweep_pump_power(preset, powers, cfg.pe)
    w.write("m2o_pe_sweep.csv", m2o.results_to_csv(by_pe))
    w.write("m2o_power_sweep.csv", m2o.results_to_csv(by_power))
    interval = m2o.tradeoff_interval(by_pe)
    summary = {
        "preset": cfg.preset,
        "tradeoff_pe_interval": None if interval is None else [by_pe[interval[0]].pe, by_pe[interval[1]].pe],
        "best_fidelity_pe": max(by_pe, key=lambda r: r.fidelity).pe,
        "max_rate_hz": max(r.rate for r in by_pe),
    }
    w.write("m2o_summary.json", dumps(summary))


def run_distill(cfg: RunConfig, w: Writer, args) -> None:
    preset = m2o.get_preset(cfg.preset)
    power = cfg.pump_power or m2o.pump_power_for_cooperativity(preset, 1.0)
    raw = m2o.simulate_heralded_cycle(preset, power, cfg.pe)
    rho = distillation_input(raw)
    tau = 1.0 / raw.rate
    rounds = cfg.grids.max_rounds
    noisy = nested_distillation(rho, DistillationConfig(rounds, tau, cfg.noise))
    ideal = nested_distillation(rho, DistillationConfig(rounds, tau, cfg.noise, ideal_memory=True))
    w.write("distill.csv", noisy.to_csv())
    w.write("distill_ideal_memory.csv", ideal.to_csv())
    infid = [1 - f for f in noisy.fidelities]
    upturn = next((n for n in range(1, len(infid)) if infid[n] > infid[n - 1]), None)
    w.write(
        "distill_summary.json",
        dumps({"raw_fidelity": noisy.fidelities[0], "raw_pair_time": tau, "upturn_round": upturn}),
    )


def run_gate(cfg: RunConfig, w: Writer, args) -> None:
    if args.perfect_ep:
        noiseless = NoiseParams(T1=math.inf, T2=math.inf, depolarizing_prob=0.0)
        res = teleported_cx(dm.werner_state(1.0, "phi+"), noiseless)
        rec = res.record(ep="perfect", local_noise="none")
    else:
        op = _operating_point(cfg)
        rec = op.record()
        rec.update(t_ll_seconds=op.gate_time, f_ll=op.process_fidelity)
    w.write("gate.json", dumps(rec))


def _frontier(cfg: RunConfig):
    pts = achievable_frontier(cfg.preset, cfg.grids.pe, cfg.grids.max_rounds, cfg.noise, cfg.pump_power)
    return pareto_front(pts)


FRONTIER_COLUMNS = ["pe", "rounds", "gate_time", "infidelity", "ep_fidelity", "ep_success_prob"]


def _frontier_csv(points) -> str:
    return rows_csv(
        [{k: (p.infidelity if k == "infidelity" else getattr(p, k)) for k in FRONTIER_COLUMNS} for p in points],
        FRONTIER_COLUMNS,
    )


def run_gap(cfg: RunConfig, w: Writer, args) -> None:
    front = _frontier(cfg)
    w.write("frontier.csv", _frontier_csv(front))
    for b in cfg.benchmarks:
        grid = gap_scan(
            b, cfg.grids.gap_times, cfg.grids.gap_infidelities, cfg.noise, frontier=front, workers=args.threads
        )
        w.write(f"gap_{b}.json", grid.to_json())
        w.write(f"gap_{b}.csv", grid.to_csv())


def run_qv(cfg: RunConfig, w: Writer, args) -> None:
    op = _operating_point(cfg)
    cases = {"no_link": None, "operating_point": LinkSpec(op.gate_time, op.process_fidelity)}
    out = {}
    for name, link in cases.items():
        res = quantum_volume(
            cfg.noise, link, cfg.grids.qv_trials, seed=cfg.seed, max_width=cfg.grids.qv_max_width,
            workers=args.threads,
        )
        out[name] = res.record()
    out["operating_point"]["link"] = {"t_ll_seconds": op.gate_time, "f_ll": op.process_fidelity}
    w.write("qv.json", dumps(out))


def run_roofline(cfg: RunConfig, w: Writer, args) -> None:
    machine = RooflineMachine(t_local=cfg.noise.local_gate_time, t_link=cfg.t_link)
    report = {"machine": {"t_local": machine.t_local, "t_link": machine.t_link, "n_qubits": machine.n_qubits}}
    bench = {}
    for name, stats in REFERENCE_STATS.items():
        routed, routed_stats = route(lower_to_cx(build_benchmark(name)), NodeTopology())
        bench[name] = {
            "formula_ccr": compute_ccr(stats),
            "reference": json.loads(classify_bound(stats, machine, REFERENCE_CCR[name]).to_json()),
            "routed": {
                "stats": routed_stats.__dict__,
                **json.loads(classify_bound(routed_stats, machine).to_json()),
            },
        }
    report["benchmarks"] = bench
    report["distillation_shift"] = {
        mode: [distillation_shift(machine, r, mode).t_link / machine.t_local for r in range(3)]
        for mode in ("tabulated", "recurrence")
    }
    w.write("roofline.json", dumps(report))
    w.write("roofline_polyline.csv", polyline_csv(machine))


def run_qcpa(cfg: RunConfig, w: Writer, args) -> None:
    ks = [int(k) if float(k).is_integer() else k for k in cfg.grids.qcpa_k]
    w.write("qcpa.csv", rows_to_csv(overhead_table(ks, cfg.pec_fidelity)))
    spectators = crossover_infidelity("upper", cfg.t_link, cfg.noise.t_star, 8)
    record = {
        "upper": json.loads(crossover_infidelity("upper").to_json()),
        "lower": json.loads(crossover_infidelity("lower").to_json()),
        "upper_with_spectators": {
            **json.loads(spectators.to_json()),
            "t_ll": cfg.t_link,
            "t_star": cfg.noise.t_star,
            "n_qubits": 8,
        },
        "k_default": QFT_LINK_GATES,
        "k_routed_profile": QFT_LINK_GATES_ROUTED,
    }
    w.write("qcpa_crossover.json", dumps(record))


def run_dqpe(cfg: RunConfig, w: Writer, args) -> None:
    phase = float(REFERENCE_PHASE)
    rows = [
        {"n_ancilla": n, **{e: qpe_relative_error(phase, n, e) for e in ESTIMATORS}} for n in range(1, 10)
    ]
    w.write("dqpe_estimators.csv", rows_csv(rows, ["n_ancilla", *ESTIMATORS]))
    theta, xi = 0.7, 0.2
    kick = [
        {"p": p, "simulated": distributed_kickback_likelihood(p, theta, xi), "closed_form": kickback_closed_form(p, theta, xi)}
        for p in (1, 2, 3)
    ]
    curve = qpe_link_error_curve(cfg.grids.dqpe_t1, cfg.grids.dqpe_link_times, noise=cfg.noise)
    w.write("dqpe_link_error.csv", curve.to_csv())
    costs = {str(eps): cost_report(DqpeCostQuery(epsilon=eps, workers=4)) for eps in (1e-2, 1e-3)}
    w.write(
        "dqpe.json",
        dumps({"phase": phase, "kickback": kick, "baseline_error": curve.baseline_error, "depth_models": costs}),
    )


def run_pipeline(cfg: RunConfig, w: Writer, args) -> None:
    op = _operating_point(cfg)
    rec = op.record()
    rec.update(t_ll_seconds=op.gate_time, f_ll=op.process_fidelity)
    w.write("link.json", dumps(rec))
    link = LinkSpec(op.gate_time, op.process_fidelity)
    machine = RooflineMachine(t_local=cfg.noise.local_gate_time, t_link=max(op.gate_time, cfg.noise.local_gate_time))
    rows = []
    for b in cfg.benchmarks:
        routed = prepare(b)
        res = execute(routed, cfg.noise, link)
        bound = classify_bound(circuit_stats(routed), machine)
        rows.append(
            {
                "benchmark": b,
                "score": res.score,
                "fidelity": res.fidelity,
                "success_prob": res.success_prob,
                "duration": res.duration,
                "link_uses": res.n_link_uses,
                "ccr": bound.ccr,
                "bound": bound.bound,
            }
        )
    cols = ["benchmark", "score", "fidelity", "success_prob", "duration", "link_uses", "ccr", "bound"]
    w.write("benchmarks.csv", rows_csv(rows, cols))


HANDLERS = {
    "m2o-sweep": run_m2o_sweep,
    "distill": run_distill,
    "gate": run_gate,
    "gap": run_gap,
    "qv": run_qv,
    "roofline": run_roofline,
    "qcpa": run_qcpa,
    "dqpe": run_dqpe,
    "pipeline": run_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI-style or .json run configuration")
    common.add_argument("--out", type=Path, help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="root seed (overrides the config)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for grid scans")
    common.add_argument("--preset", help="converter preset (overrides the config)")
    ap = argparse.ArgumentParser(prog="mnqc", description="Two-node quantum computer link and benchmark simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "gate":
            p.add_argument("--perfect-ep", action="store_true", help="ideal Bell pair and noiseless local gates")
    return ap


def load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.out is not None:
        overrides["out"] = str(args.out)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.preset is not None:
        overrides["preset"] = args.preset
    try:
        return cfg.replace(**overrides) if overrides else cfg
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        writer = Writer(Path(cfg.out))
        HANDLERS[args.command](cfg, writer, args)
        writer.manifest(args.command, cfg, time.perf_counter() - start)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except m2o.TruncationError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (LinkUnavailableError, RoutingError) as exc:
        print(f"link error: {exc}", file=sys.stderr)
        return EXIT_LINK
    except (DomainError, ValueError, KeyError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
