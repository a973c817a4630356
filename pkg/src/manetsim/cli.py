"""Batch command-line front end: run scenarios, compare protocols, and
sweep attack kinds, emitting CSV reports and optional JSONL traces.

Exit codes: 0 success, 1 scenario parse/validation problem (the message
names the offending field), 2 I/O or usage failure. Progress goes to
stderr; data goes to files and stdout only.
"""

from __future__ import annotations

import argparse
import dataclasses
import statistics
import sys
from pathlib import Path

from . import adversary, ledger, metrics
from .adversary import AttackType, parse_attack
from .config import Protocol, ScenarioConfig, ScenarioError, load_scenario
from .engine import run_simulation
from .metrics import MetricsReport

CSV_HEADER = ("run_id,protocol,seed,node_count,sim_time_s,pdr_pct,"
              "throughput_pkt_s,throughput_kbps,mean_e2e_delay_s,"
              "routing_overhead_ratio,route_acq_latency_s,dropped_count,"
              "block_height,mean_block_gen_latency_s,detection_rate_pct,"
              "security_level_pct")

DEFAULT_ATTACK_PARAMS = {
    AttackType.GREYHOLE: {"drop_prob": 0.7},
    AttackType.SYBIL: {"identity_count": 3},
    AttackType.HELLO_FLOOD: {"rate_multiplier": 5.0},
    AttackType.DOS_FLOOD: {"rate_pkt_per_s": 50.0},
}


def csv_row(run_id: str, protocol: Protocol, seed: int, r: MetricsReport) -> str:
    """One CSV line; floats use repr so re-parsing reproduces them exactly."""
    fields = [run_id, protocol.value, str(seed), str(r.node_count),
              repr(r.sim_time_s), repr(r.pdr_pct), repr(r.throughput_pkt_per_s),
              repr(r.throughput_bps / 1000.0), repr(r.mean_e2e_delay_s),
              repr(r.routing_overhead_ratio), repr(r.route_acq_latency_s),
              str(r.dropped_count), str(r.block_height),
              repr(r.mean_block_gen_latency_s), repr(r.detection_rate_pct),
              repr(r.security_level_pct)]
    return ",".join(fields)


def parse_csv_row(line: str) -> dict:
    """Inverse of csv_row, keyed by the documented header."""
    values = line.split(",")
    names = CSV_HEADER.split(",")
    out: dict = dict(zip(names, values))
    for key in ("seed", "node_count", "dropped_count", "block_height"):
        out[key] = int(out[key])
    for key in ("sim_time_s", "pdr_pct", "throughput_pkt_s", "throughput_kbps",
                "mean_e2e_delay_s", "routing_overhead_ratio",
                "route_acq_latency_s", "mean_block_gen_latency_s",
                "detection_rate_pct", "security_level_pct"):
        out[key] = float(out[key])
    return out


def _resolve_seeds(config: ScenarioConfig, args) -> list[int]:
    if args.seed_list:
        return [int(s) for s in args.seed_list.split(",")]
    if args.seeds:
        return [config.seed + i for i in range(args.seeds)]
    return [config.seed]


def _run_one(config: ScenarioConfig, seed: int, protocol: Protocol):
    run_config = dataclasses.replace(config, seed=seed, protocol=protocol)
    trace, chain = run_simulation(run_config)
    truth = adversary.ground_truth(run_config)
    report = metrics.compute_report(trace, chain, run_config.node_count,
                                    run_config.sim_duration_s, truth)
    return trace, chain, report


def _load(path: str) -> ScenarioConfig:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def cmd_run(args) -> int:
    config = _load(args.scenario)
    protocol = Protocol(args.protocol) if args.protocol else config.protocol
    seeds = _resolve_seeds(config, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [CSV_HEADER]
    for seed in seeds:
        print(f"running {protocol.value} seed {seed}", file=sys.stderr)
        trace, chain, report = _run_one(config, seed, protocol)
        rows.append(csv_row(f"{protocol.value.lower()}-{seed}", protocol,
                            seed, report))
        if args.emit_trace:
            stem = f"{protocol.value.lower()}_{seed}"
            (out_dir / f"trace_{stem}.jsonl").write_text(trace.export_jsonl(),
                                                         encoding="utf-8")
            (out_dir / f"chain_{stem}.jsonl").write_text(
                ledger.export_chain_jsonl(chain), encoding="utf-8")
    content = "\n".join(rows) + "\n"
    (out_dir / "metrics.csv").write_text(content, encoding="utf-8")
    sys.stdout.write(content)
    return 0


def _mean_stdev(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    stdev = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, stdev


def cmd_compare(args) -> int:
    config = _load(args.scenario)
    protocols = [Protocol(p) for p in args.protocols.split(",")]
    seeds = _resolve_seeds(config, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [CSV_HEADER]
    summary_rows = []
    stats_lines = []
    for protocol in protocols:
        reports = []
        for seed in seeds:
            print(f"running {protocol.value} seed {seed}", file=sys.stderr)
            _, _, report = _run_one(config, seed, protocol)
            reports.append(report)
            rows.append(csv_row(f"{protocol.value.lower()}-{seed}", protocol,
                                seed, report))
        pdr = _mean_stdev([r.pdr_pct for r in reports])
        thr = _mean_stdev([r.throughput_pkt_per_s for r in reports])
        drop = _mean_stdev([float(r.dropped_count) for r in reports])
        delay = _mean_stdev([r.mean_e2e_delay_s for r in reports])
        over = _mean_stdev([r.routing_overhead_ratio for r in reports])
        summary_rows.append((protocol.value, pdr[0], thr[0], int(round(drop[0])),
                             delay[0], over[0]))
        stats_lines.append(
            f"{protocol.value}: pdr {pdr[0]:.2f} +/- {pdr[1]:.2f}, "
            f"throughput {thr[0]:.2f} +/- {thr[1]:.2f} pkt/s, "
            f"dropped {drop[0]:.1f} +/- {drop[1]:.1f}, "
            f"delay {delay[0]:.4f} +/- {delay[1]:.4f} s, "
            f"overhead {over[0]:.3f} +/- {over[1]:.3f}")
    table = metrics.render_comparison(metrics.build_comparison(
        [(row[0], _summary_report(row)) for row in summary_rows]))
    text = table + "\n" + "\n".join(stats_lines) + "\n"
    (out_dir / "metrics.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    (out_dir / "comparison.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _summary_report(row) -> MetricsReport:
    # adapter: only the comparison columns matter here
    return MetricsReport(pdr_pct=row[1], throughput_pkt_per_s=row[2],
                         throughput_bps=0.0, mean_e2e_delay_s=row[4],
                         routing_overhead_ratio=row[5], route_acq_latency_s=0.0,
                         dropped_count=row[3], block_height=0,
                         mean_block_gen_latency_s=0.0, node_count=0,
                         sim_time_s=0.0, detection_rate_pct=0.0,
                         security_level_pct=0.0)


def _matrix_attackers(config: ScenarioConfig, kind_name: str):
    """Rebuild the scenario's attacker list with one attack kind applied."""
    ids = [node_id for node_id, _ in config.attackers]
    if not ids:
        raise ScenarioError("attackers", "scenario defines no attacker nodes")
    atype = AttackType(kind_name)
    if atype is AttackType.WORMHOLE and len(ids) < 2:
        raise ScenarioError("attackers", "WORMHOLE needs at least 2 attackers")
    attackers = []
    for i, node_id in enumerate(ids):
        params = dict(DEFAULT_ATTACK_PARAMS.get(atype, {}))
        if atype is AttackType.WORMHOLE:
            params["peer_id"] = ids[i + 1] if i % 2 == 0 and i + 1 < len(ids) \
                else ids[i - 1]
        attackers.append((node_id, parse_attack(kind_name, params)))
    return tuple(attackers)


def cmd_attack_matrix(args) -> int:
    config = _load(args.scenario)
    names = args.attacks.split(",") if args.attacks else \
        [t.value for t in AttackType]
    for name in names:
        if name not in {t.value for t in AttackType}:
            print(f"attack kind {name!r} is unknown or out of scope",
                  file=sys.stderr)
            return 1
    seeds = _resolve_seeds(config, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["attack,detection_rate_pct_mean,detection_rate_pct_stdev,"
             "pdr_pct_mean,security_level_pct_mean"]
    for name in names:
        matrix_config = dataclasses.replace(
            config, attackers=_matrix_attackers(config, name),
            protocol=Protocol.SRABC)
        detections, pdrs, levels = [], [], []
        for seed in seeds:
            print(f"running SRABC {name} seed {seed}", file=sys.stderr)
            run_config = dataclasses.replace(matrix_config, seed=seed)
            trace, chain = run_simulation(run_config)
            truth = adversary.ground_truth(run_config)
            report = metrics.compute_report(trace, chain,
                                            run_config.node_count,
                                            run_config.sim_duration_s, truth)
            detections.append(report.detection_rate_pct)
            pdrs.append(report.pdr_pct)
            levels.append(report.security_level_pct)
        det = _mean_stdev(detections)
        lines.append(f"{name},{det[0]:.2f},{det[1]:.2f},"
                     f"{statistics.fmean(pdrs):.2f},"
                     f"{statistics.fmean(levels):.2f}")
    content = "\n".join(lines) + "\n"
    (out_dir / "attack_matrix.csv").write_text(content, encoding="utf-8")
    sys.stdout.write(content)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manetsim",
                                     description="MANET routing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seeds", type=int, default=0,
                       help="run N seeds starting at the scenario seed")
        p.add_argument("--seed-list", default="",
                       help="comma-separated explicit seeds")

    run_p = sub.add_parser("run", help="run one scenario")
    common(run_p)
    run_p.add_argument("--protocol", choices=[p.value for p in Protocol],
                       help="override the scenario protocol")
    run_p.add_argument("--emit-trace", action="store_true",
                       help="write JSONL trace and chain per run")

    cmp_p = sub.add_parser("compare", help="compare protocols on one scenario")
    common(cmp_p)
    cmp_p.add_argument("--protocols", default="AODV,QAODV,SRABC",
                       help="comma-separated protocol list")

    mat_p = sub.add_parser("attack-matrix",
                           help="detection rates per attack kind under SRABC")
    common(mat_p)
    mat_p.add_argument("--attacks", default="",
                       help="comma-separated attack kinds (default: all)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        return cmd_attack_matrix(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
