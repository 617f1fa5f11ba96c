"""Command line front end.

Subcommands: ``estimate``, ``sweep-mu``, ``sweep-distance``, ``verify-i1dc``
and ``preset <figN>``. Parameters come from the ``RunConfig`` defaults, then
an optional ``--config`` file of ``key = value`` lines, then ``--set key=value``
and per-key flags (``--length-km 50``).

Exit codes: 0 success, 1 invalid configuration (or failed verification),
2 numerical failure such as a zero gain.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import fields, replace

from .channel import GainMode
from .config import PRESETS, RunConfig, coerce, load_config
from .errors import DomainError, RBSPError
from .i1dc import parity_t_rule, previous_outcome_t_rule, verify_i1dc
from .planner import check_protocol, plan, sweep_distance, sweep_mu

CSV_COLUMNS = ["L", "mu", "T", "Q_mu", "Q_v1", "Q_v2", "p1", "m", "N", "S_over_N", "plateau_flag"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if x is None:
        return "inf"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def _csv_row(length, result, flag):
    q_mu, q_v1, q_v2 = result.gains
    return [
        length,
        result.mu,
        result.transmittance,
        q_mu,
        q_v1,
        q_v2,
        result.p1,
        result.group_size,
        result.pulse_count,
        result.efficiency,
        bool(flag),
    ]


def write_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])


def estimate_record(config: RunConfig, both_modes: bool = False) -> dict:
    """Machine-readable result of a single operating point."""
    source = config.source_model()
    result = plan(source, config.channel(), config.protocol(), config.gain_mode(), config.size)
    record = {
        "source": config.source,
        "mode": config.mode,
        "mu": result.mu,
        "L": config.length_km,
        "T": result.transmittance,
        "Q_mu": result.gains[0],
        "Q_v1": result.gains[1],
        "Q_v2": result.gains[2],
        "y0_lower": result.bounds.y0_lower,
        "y1_lower": result.bounds.y1_lower,
        "p1": result.p1,
        "m_real": result.group_size,
        "m_min": result.group_size_min,
        "N": result.pulse_count,
        "S_over_N": result.efficiency,
        "p_fail_group": result.p_fail_group,
        "p_fail_total_bound": result.p_fail_total_bound,
        "plateau_flag": result.dark_dominated,
    }
    if both_modes:
        other = GainMode.PAPER_APPROX if config.gain_mode() is GainMode.EXACT else GainMode.EXACT
        alt = plan(source, config.channel(), config.protocol(), other, config.size)
        record.update(
            {
                f"{other.value}.Q_mu": alt.gains[0],
                f"{other.value}.p1": alt.p1,
                f"{other.value}.S_over_N": alt.efficiency,
            }
        )
    return record


def _json(record) -> str:
    # JSON has no infinity; an unusable operating point reports null
    clean = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in record.items()}
    return json.dumps(clean)


def cmd_estimate(config: RunConfig, out, both_modes=False, as_json=False, output=None):
    record = estimate_record(config, both_modes)
    if as_json:
        out.write(_json(record) + "\n")
    else:
        for key, value in record.items():
            out.write(f"{key} = {_fmt(value) if not isinstance(value, str) else value}\n")
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_json(record) + "\n")


def mu_sweep_rows(config: RunConfig):
    mus = config.mu_values()
    if len(mus) == 0:
        raise DomainError("empty intensity grid")
    results = sweep_mu(config.source_model(), config.channel(), config.protocol(), mus, config.gain_mode(), config.size)
    return [_csv_row(config.length_km, r, r.dark_dominated) for r in results]


def distance_sweep_rows(config: RunConfig):
    lengths = config.lengths()
    if len(lengths) == 0:
        raise DomainError("empty distance grid")
    source = config.source_model()
    # validate everything except the intensity, which is optimised
    check_protocol(source.with_mu(config.mu_max), config.protocol())
    rows = sweep_distance(
        source,
        config.channel(),
        config.protocol(),
        lengths,
        config.gain_mode(),
        config.mu_grid(),
        workers=config.workers,
    )
    return [_csv_row(r.length_km, r.plan, r.plateau_flag) for r in rows]


def _emit_csv(rows, output, out):
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, out)


def cmd_preset(fig: str, outdir: str, out, workers: int = 1):
    if fig not in PRESETS:
        raise DomainError(f"unknown preset {fig!r}; choose from {', '.join(PRESETS)}")
    preset = PRESETS[fig]
    os.makedirs(outdir, exist_ok=True)
    for label, config in preset.curves.items():
        config = replace(config, workers=workers)
        rows = mu_sweep_rows(config) if preset.kind == "mu" else distance_sweep_rows(config)
        path = os.path.join(outdir, f"{fig}_{label}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        out.write(f"{path}\n")


def cmd_verify_i1dc(k, trials, seed, exhaustive, wrong_rule, out) -> int:
    rule = previous_outcome_t_rule if wrong_rule else parity_t_rule
    report = verify_i1dc(k, trials, seed, exhaustive=exhaustive, t_rule=rule)
    out.write(report.summary() + "\n")
    for phases, outcomes, fid in report.failures[:20]:
        out.write(f"  failing phases={list(phases)} outcomes={list(outcomes)} fidelity={fid:.6g}\n")
    return EXIT_OK if report.passed else EXIT_INVALID


def _add_config_options(parser):
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    for f in fields(RunConfig):
        parser.add_argument("--" + f.name.replace("_", "-"), dest="cfg_" + f.name, default=None, metavar=f.name.upper())


def build_config(args) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config(args.config))
    for item in args.set:
        if "=" not in item:
            raise DomainError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = coerce(*item.split("=", 1))
        values[key] = value
    for f in fields(RunConfig):
        raw = getattr(args, "cfg_" + f.name, None)
        if raw is not None:
            key, value = coerce(f.name, raw)
            values[key] = value
    return replace(RunConfig(), **values)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbsp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="resources at one operating point")
    _add_config_options(p)
    p.add_argument("--both-modes", action="store_true", help="also report the other gain model")
    p.add_argument("--json", action="store_true", help="print a JSON record instead of key = value lines")
    p.add_argument("--output", help="also write the JSON record to this file")

    for name, text in (("sweep-mu", "S/N over a grid of signal intensities"), ("sweep-distance", "optimal S/N over a grid of lengths")):
        p = sub.add_parser(name, help=text)
        _add_config_options(p)
        p.add_argument("--output", help="CSV file (default: stdout)")

    p = sub.add_parser("verify-i1dc", help="check the theta reconstruction against the simulator")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true", help="all 8**k phase tuples")
    p.add_argument("--wrong-rule", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("preset", help="write the CSV curves of a figure preset")
    p.add_argument("figure", choices=sorted(PRESETS))
    p.add_argument("--outdir", default=".")
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    args = make_parser().parse_args(argv)
    try:
        if args.command == "verify-i1dc":
            return cmd_verify_i1dc(args.k, args.trials, args.seed, args.exhaustive, args.wrong_rule, out)
        if args.command == "preset":
            cmd_preset(args.figure, args.outdir, out, args.workers)
            return EXIT_OK
        config = build_config(args)
        if args.command == "estimate":
            cmd_estimate(config, out, args.both_modes, args.json, args.output)
        elif args.command == "sweep-mu":
            _emit_csv(mu_sweep_rows(config), args.output, out)
        else:
            _emit_csv(distance_sweep_rows(config), args.output, out)
    except (DomainError, ValueError) as exc:
        violations = getattr(exc, "violations", [str(exc)])
        err.write("invalid configuration:\n" + "".join(f"  - {v}\n" for v in violations))
        return EXIT_INVALID
    except (RBSPError, ArithmeticError) as exc:
        err.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
