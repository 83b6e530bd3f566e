"""Command-line experiment runner: run, sweep, analyze, verify."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .errors import (
    AdcsError,
    CongestionViolation,
    InfeasibleParameterError,
    RoundCapExceeded,
    ScheduleError,
)
from .graph import check_t_connected, min_window_isoperimetric, window_starts, window_stats
from .params import Reduction, broadcast_rounds, derive_mult_params
from .protocols.inputs import canonicalize_all, histogram
from .protocols.runs import (
    SystemConfig,
    all_to_all_result,
    broadcast_or,
    multiplicity_result,
    rmc_run,
)
from .schedules import KINDS, EvolvingSchedule, load_schedule, make_schedule
from .simulator import DEFAULT_ROUND_CAP

log = logging.getLogger("adcs")

EXIT_OK = 0
EXIT_PROTOCOL_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_CONGESTION = 4
EXIT_INFEASIBLE = 5

PROTOCOLS = ("rmc", "multiplicity", "all2all", "broadcast", "analyze")
DEFAULT_REDUCTION = Reduction(p_div=8, b_div=1000, c_div=2)


class ConfigError(AdcsError):
    pass


@dataclass
class ExperimentConfig:
    protocol: str = "rmc"
    n: int = 3
    ell: int = 1
    T: int = 1
    schedule: str = "static-clique"
    seed: int = 0
    epsilon: int = 1
    i_min: str | None = None
    cap: int | None = None
    mode: str = "full"
    reduce: list[int] = field(default_factory=lambda: [DEFAULT_REDUCTION.p_div,
                                                        DEFAULT_REDUCTION.b_div,
                                                        DEFAULT_REDUCTION.c_div])
    schedule_file: str | None = None
    messages: list[str] | None = None
    target: str | None = None
    sources: list[int] | None = None
    rounds: int | None = None
    strict_audit: bool = False
    trace: str | None = None
    out: str | None = None

    @property
    def i_min_hint(self) -> Fraction | None:
        return None if self.i_min is None else Fraction(self.i_min)

    @property
    def reduction(self) -> Reduction | None:
        return Reduction(*self.reduce) if self.mode == "reduced" else None

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.mode not in ("full", "reduced"):
            raise ConfigError("mode must be full or reduced")
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.epsilon < 1:
            raise ConfigError("epsilon must be a positive integer")
        if self.protocol in ("rmc", "all2all") and not 0 < self.ell < self.n:
            raise ConfigError("need 1 <= ell < n")
        if self.i_min is not None:
            try:
                if Fraction(self.i_min) <= 0:
                    raise ValueError
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad --i-min {self.i_min!r}") from exc
        if len(self.reduce) != 3 or min(self.reduce) < 1:
            raise ConfigError("--reduce takes three positive divisors p,b,c")

    def public(self) -> dict:
        """Configuration as embedded in summaries (output paths excluded)."""
        d = asdict(self)
        for key in ("trace", "out"):
            d.pop(key)
        return d


def build_schedule(cfg: ExperimentConfig) -> EvolvingSchedule:
    if cfg.schedule_file:
        sched = load_schedule(cfg.schedule_file)
        if sched.n != cfg.n or sched.T != cfg.T:
            raise ConfigError(f"schedule file has n={sched.n} T={sched.T}; "
                              f"config says n={cfg.n} T={cfg.T}")
    else:
        sched = make_schedule(cfg.schedule, cfg.n, cfg.T, cfg.seed)
    if not check_t_connected(sched):
        raise ScheduleError(f"schedule is not {cfg.T}-connected at every offset")
    hint = cfg.i_min_hint
    if hint is not None and sched.n <= 20:
        actual = min_window_isoperimetric(sched)
        if hint > actual:
            raise ConfigError(f"--i-min {hint} exceeds the schedule's i_min {actual}")
    return sched


def execute(cfg: ExperimentConfig, trace_sink=None) -> dict:
    """Run one configured experiment and return its summary document."""
    cfg.validate()
    sched = build_schedule(cfg)
    cap = cfg.cap if cfg.cap is not None else DEFAULT_ROUND_CAP
    engine = {"trace_sink": trace_sink, "strict_audit": cfg.strict_audit}
    summary: dict[str, Any] = {"config": cfg.public(), "reduced": cfg.mode == "reduced"}

    if cfg.protocol == "rmc":
        system = SystemConfig(cfg.n, cfg.ell, cfg.T, cfg.epsilon, cfg.i_min_hint, cfg.reduction)
        outcome = rmc_run(system, sched, cap, **engine)
        summary["result"] = outcome.result.summary()
        log.info("execution: %s", outcome.result.execution())
        summary["ground_truth"] = cfg.n
        summary["success"] = all(o == cfg.n for o in outcome.outputs)
        summary["epochs"] = [r.to_dict() for r in outcome.records[0]]
    elif cfg.protocol == "multiplicity":
        msgs = canonicalize_all(_messages(cfg), cfg.n)
        target = msgs[0] if cfg.target is None else canonicalize_all([cfg.target], cfg.n)[0]
        params = derive_mult_params(cfg.n, cfg.T, cfg.i_min_hint, cfg.reduction)
        res = multiplicity_result(msgs, target, cfg.n, sched, params, cap, **engine)
        delta = sum(1 for m in msgs if m == target)
        summary["params"] = params.summary()
        summary["result"] = res.summary()
        summary["ground_truth"] = delta
        summary["success"] = all(o == delta for o in res.outputs)
    elif cfg.protocol == "all2all":
        msgs = canonicalize_all(_messages(cfg), cfg.n)
        system = SystemConfig(cfg.n, cfg.ell, cfg.T, cfg.epsilon, cfg.i_min_hint, cfg.reduction)
        res, _ = all_to_all_result(msgs, system, sched, cap, **engine)
        truth = histogram(msgs)
        summary["result"] = res.summary()
        summary["ground_truth"] = truth
        summary["success"] = all(o == truth for o in res.outputs)
    elif cfg.protocol == "broadcast":
        sources = cfg.sources if cfg.sources is not None else [0]
        bits = [u in sources for u in range(cfg.n)]
        rounds = cfg.rounds if cfg.rounds is not None else broadcast_rounds(
            cfg.n, cfg.T, cfg.i_min_hint or min_window_isoperimetric(sched))
        out = broadcast_or(bits, sched, 0, rounds, trace_sink=trace_sink)
        summary["result"] = {"outputs": out, "rounds": rounds}
        summary["ground_truth"] = any(bits)
        summary["success"] = all(o == any(bits) for o in out)
    else:
        summary.update(analyze_schedule(sched))
        summary["success"] = True
    summary["schedule_fingerprint"] = sched.fingerprint
    return summary


def _messages(cfg: ExperimentConfig) -> list[str | int]:
    if cfg.messages is None:
        return [u % 2 for u in range(cfg.n)]
    if len(cfg.messages) != cfg.n:
        raise ConfigError(f"{len(cfg.messages)} messages for n={cfg.n}")
    return list(cfg.messages)


def analyze_schedule(sched: EvolvingSchedule, d: int | None = None) -> dict:
    """Per-window isoperimetric number and conductance over one period."""
    d = d if d is not None else 2 * sched.n * sched.T
    T = sched.T
    windows = []
    for start in window_starts(sched, T, aligned=True):
        st = window_stats(sched, T, d, start // T)
        windows.append({"window": start // T, "start": start,
                        "isoperimetric": str(st.isoperimetric),
                        "conductance": str(st.conductance),
                        "conductance_bound_holds": st.conductance >= st.isoperimetric / d**T})
    return {
        "n": sched.n, "T": T, "d": d, "period": sched.period,
        "t_connected_every_offset": check_t_connected(sched),
        "t_connected_aligned": check_t_connected(sched, aligned=True),
        "i_min": str(min_window_isoperimetric(sched)),
        "windows": windows,
    }


def _write_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _exit_for(exc: Exception) -> int:
    if isinstance(exc, RoundCapExceeded):
        return EXIT_CAP
    if isinstance(exc, CongestionViolation):
        return EXIT_CONGESTION
    if isinstance(exc, InfeasibleParameterError):
        return EXIT_INFEASIBLE
    if isinstance(exc, (ConfigError, ScheduleError, ValueError)):
        return EXIT_CONFIG
    return EXIT_PROTOCOL_FAILURE


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    overrides = {}
    for f in fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            overrides[f.name] = val
    return replace(cfg, **overrides)


def _csv(kind):
    def parse(text: str):
        return [kind(x) for x in text.split(",") if x.strip()]
    return parse


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        start = time.perf_counter()
        if cfg.trace:
            with open(cfg.trace, "w") as sink:
                summary = execute(cfg, trace_sink=sink)
        else:
            summary = execute(cfg)
        log.info("run finished in %.2fs", time.perf_counter() - start)
    except Exception as exc:  # surfaced as a diagnostic plus exit code
        log.error("%s: %s", type(exc).__name__, exc)
        return _exit_for(exc)
    _write_json(summary, cfg.out)
    if summary.get("result", {}).get("audit", {}).get("ok") is False:
        return EXIT_CONGESTION
    return EXIT_OK if summary["success"] else EXIT_PROTOCOL_FAILURE


def _range(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def sweep_cells(protocol: str, ns: Sequence[int], ells: str, Ts: Sequence[int],
                schedules: Sequence[str], seeds: Sequence[int], mode: str,
                epsilon: int = 1, reduce: Sequence[int] | None = None) -> list[ExperimentConfig]:
    cells = []
    for n in ns:
        ell_values = range(1, n) if ells == "all" else [e for e in _range(ells) if 0 < e < n]
        for ell in ell_values:
            for T in Ts:
                for kind in schedules:
                    for seed in (seeds if kind == "random-T-connected" else [0]):
                        cfg = ExperimentConfig(protocol=protocol, n=n, ell=ell, T=T,
                                               schedule=kind, seed=seed, mode=mode,
                                               epsilon=epsilon)
                        if reduce is not None:
                            cfg.reduce = list(reduce)
                        cells.append(cfg)
    return cells


def _run_cell(cfg: ExperimentConfig) -> dict:
    key = {"n": cfg.n, "ell": cfg.ell, "T": cfg.T, "schedule": cfg.schedule, "seed": cfg.seed}
    try:
        s = execute(cfg)
        res = s.get("result", {})
        return {**key, "status": "pass" if s["success"] else "fail",
                "rounds": res.get("rounds"), "outputs": res.get("outputs"),
                "estimate_path": res.get("estimate_path")}
    except Exception as exc:
        return {**key, "status": "error", "error": f"{type(exc).__name__}: {exc}"}


def sweep(cells: Sequence[ExperimentConfig], workers: int = 1) -> dict:
    """Run every cell; per-cell failures are recorded and the sweep continues."""
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]
    matrix: dict[str, dict[str, str]] = {}
    for row in rows:
        matrix.setdefault(f"n={row['n']}", {})[
            f"ell={row['ell']},T={row['T']},{row['schedule']}#{row['seed']}"] = row["status"]
    return {
        "cells": rows,
        "matrix": matrix,
        "passed": sum(r["status"] == "pass" for r in rows),
        "total": len(rows),
        "reduced": any(c.mode == "reduced" for c in cells),
    }


def cmd_sweep(args: argparse.Namespace) -> int:
    schedules = list(KINDS) if args.schedules == "all" else args.schedules.split(",")
    cells = sweep_cells(args.protocol, _range(args.n), args.ell, _csv(int)(args.T), schedules,
                        _csv(int)(args.seeds), args.mode, args.epsilon, args.reduce)
    report = sweep(cells, args.workers)
    if report["passed"] != report["total"]:
        log.warning("%d of %d cells did not pass", report["total"] - report["passed"],
                    report["total"])
    _write_json(report, args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        if args.schedule_file:
            sched = load_schedule(args.schedule_file)
        else:
            sched = make_schedule(args.schedule, args.n, args.T, args.seed)
        doc = analyze_schedule(sched, args.d)
    except Exception as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return _exit_for(exc)
    _write_json(doc, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import run_checks

    results = run_checks()
    failed = 0
    for name, ok, detail in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""))
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_PROTOCOL_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adcs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--config", help="JSON file with ExperimentConfig fields")
    run.add_argument("--protocol", choices=PROTOCOLS)
    run.add_argument("--n", type=int)
    run.add_argument("--ell", type=int)
    run.add_argument("--T", type=int)
    run.add_argument("--schedule", choices=KINDS)
    run.add_argument("--schedule-file", dest="schedule_file")
    run.add_argument("--seed", type=int)
    run.add_argument("--epsilon", type=int)
    run.add_argument("--i-min", dest="i_min", help="isoperimetric hint, e.g. 1/2")
    run.add_argument("--cap", type=int, help="round cap")
    run.add_argument("--mode", choices=("full", "reduced"))
    run.add_argument("--reduce", type=_csv(int), help="divisors for p,b,c in reduced mode")
    run.add_argument("--messages", type=_csv(str), help="comma-separated bit strings")
    run.add_argument("--target", help="message whose multiplicity is counted")
    run.add_argument("--sources", type=_csv(int), help="broadcast sources")
    run.add_argument("--rounds", type=int, help="broadcast rounds")
    run.add_argument("--strict-audit", dest="strict_audit", action="store_true", default=None)
    run.add_argument("--trace", help="JSON-Lines trace output path")
    run.add_argument("--out", help="summary JSON path (default stdout)")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run a grid of experiments")
    sw.add_argument("--protocol", default="rmc", choices=("rmc",))
    sw.add_argument("--n", default="2-6", help="e.g. 2-6 or 2,3,5")
    sw.add_argument("--ell", default="all")
    sw.add_argument("--T", default="1,2")
    sw.add_argument("--schedules", default="all")
    sw.add_argument("--seeds", default="1,2,3")
    sw.add_argument("--epsilon", type=int, default=1)
    sw.add_argument("--mode", default="full", choices=("full", "reduced"))
    sw.add_argument("--reduce", type=_csv(int), help="divisors for p,b,c in reduced mode")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    an = sub.add_parser("analyze", help="expansion table per window")
    an.add_argument("--schedule-file", dest="schedule_file")
    an.add_argument("--schedule", choices=KINDS, default="static-path")
    an.add_argument("--n", type=int, default=4)
    an.add_argument("--T", type=int, default=1)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--d", type=int, help="share denominator (default 2nT)")
    an.add_argument("--out")
    an.set_defaults(func=cmd_analyze)

    ve = sub.add_parser("verify", help="run the oracle and invariant checks")
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
