"""Command-line entry point: spectrum, hysteresis, table1, chi-scan."""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile

import numpy as np
import yaml

from .config import ConfigError, RunConfig, flag_names
from .defect import SolverSettings
from .errors import ConvergenceError
from .response import (
    TABLE1_DELTA_P,
    TABLE1_REFERENCE,
    auto_trace,
    chi_scan,
    defect_peak,
    linear_spectrum,
    summarize,
    table1_row,
    trace_hysteresis,
)
from .susceptibility import AtomicParams
from .tmm import midgap_omega, omega_grid, quarter_wave_gap, standard_stack

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.9g}"


def _round(x):
    # 9 significant digits in structured records too
    return None if x is None else float(f"{x:.9g}")


def write_atomic(path: str | None, text: str) -> None:
    """Write all of ``text`` or nothing: temp file in the target dir, then rename."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(command: str, config: RunConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# dopedpc {command}\n")
    for line in config.dump().splitlines():
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def record_text(command: str, config: RunConfig, payload: dict) -> str:
    doc = {"command": command, "config": config.to_dict(), **payload}
    return yaml.safe_dump(doc, sort_keys=False)


def _stack(config: RunConfig):
    s = config.stack
    return standard_stack(s.lambda_pc, s.n_a, s.n_b, s.n_d, s.n0)


def _atomic(config: RunConfig) -> AtomicParams:
    a = config.atomic
    return AtomicParams(a.delta_p, a.omega_c0, a.sgc_p, a.s1)


def _settings(config: RunConfig) -> SolverSettings:
    s = config.solver
    return SolverSettings(tol=s.tol, relaxation=s.relaxation, max_iter=s.max_iter)


def cmd_spectrum(config: RunConfig, out: str | None, form: str | None) -> int:
    w_pc = midgap_omega(config.stack.lambda_pc)
    grid = omega_grid(w_pc, config.sweep.spectrum_points, config.sweep.spectrum_span)
    spectrum = linear_spectrum(_stack(config), _atomic(config), grid)
    if form == "record":
        half_gap = quarter_wave_gap(config.stack.n_a, config.stack.n_b)
        peak = defect_peak(spectrum, (1 - half_gap) * w_pc, (1 + half_gap) * w_pc)
        payload = {
            "points": len(spectrum),
            "midgap_omega": _round(w_pc),
            "defect_peak": None
            if peak is None
            else {"omega": _round(peak.omega), "T": _round(peak.t), "fwhm": _round(peak.fwhm)},
        }
        write_atomic(out, record_text("spectrum", config, payload))
    else:
        write_atomic(out, csv_text("spectrum", config, ["omega", "T"], spectrum))
    return EXIT_OK


def _summary_payload(summary, curve) -> dict:
    return {
        "summary": {
            "bistable": summary.bistable,
            "switch_up_ui": _round(summary.switch_up_ui),
            "switch_down_ui": _round(summary.switch_down_ui),
            "loop_width": _round(summary.loop_width),
            "contrast": _round(summary.contrast),
            "switch_up_ii": _round(summary.switch_up_ii),
            "switch_down_ii": _round(summary.switch_down_ii),
            "loop_width_ii": _round(summary.loop_width_ii),
        },
        "chi3_re": _round(curve.chi3.real),
        "points": len(curve.points),
        "u_f_max": _round(curve.points[-1].u_f),
    }


def cmd_hysteresis(config: RunConfig, out: str | None, form: str | None) -> int:
    stack, atomic, settings = _stack(config), _atomic(config), _settings(config)
    sweep = config.sweep
    omega = config.probe.omega_p
    try:
        if sweep.u_f_max is None:
            curve, summary = auto_trace(
                stack,
                atomic,
                n_points=sweep.hysteresis_points,
                u_f_start=sweep.u_f_start,
                max_doublings=sweep.max_doublings,
                omega=omega,
                settings=settings,
            )
        else:
            curve = trace_hysteresis(
                stack,
                atomic,
                sweep.u_f_max,
                sweep.hysteresis_points,
                omega,
                settings,
                max_halvings=config.solver.max_halvings,
            )
            summary = summarize(curve)
    except ConvergenceError as exc:
        print(f"error: solver did not converge at u_f={exc.u_f!r}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    payload = _summary_payload(summary, curve)
    if form == "record":
        write_atomic(out, record_text("hysteresis", config, payload))
        return EXIT_OK
    columns = ["u_f", "u_plus", "u_minus", "T", "u_i", "iterations"]
    rows = [
        (p.u_f, p.fields.u_plus, p.fields.u_minus, p.t, p.u_i, p.iterations)
        for p in curve.points
    ]
    summary_text = record_text("hysteresis", config, payload)
    if out is None or out == "-":
        write_atomic(None, csv_text("hysteresis", config, columns, rows))
        sys.stderr.write(summary_text)
    else:
        write_atomic(out, csv_text("hysteresis", config, columns, rows))
        write_atomic(out + ".summary.yaml", summary_text)
    return EXIT_OK


TABLE1_COLUMNS = [
    "p",
    "omega_c0",
    "chi1_re",
    "chi1_re_ref",
    "chi3_re",
    "chi3_re_ref",
    "u_i",
    "u_i_ref",
    "chi1_ok",
    "chi3_ok",
    "u_i_ok",
]


def _table1_rows(config: RunConfig):
    stack = _stack(config)
    return [
        table1_row(
            p,
            w0,
            stack,
            delta_p=TABLE1_DELTA_P,
            omega=config.probe.omega_p,
            n_points=config.sweep.hysteresis_points,
            settings=_settings(config),
        )
        for p, w0 in TABLE1_REFERENCE
    ]


def _flag(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def table1_text(rows) -> str:
    header = (
        f"{'p':>5} {'Oc0':>4} | {'Re chi1':>15} {'ref':>8} | "
        f"{'Re chi3':>15} {'ref':>9} | {'U_i':>11} {'ref':>5} | flags"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.sgc_p:>5g} {r.omega_c0:>4g} | {fmt(r.chi1_re):>15} {r.reference[0]:>8} | "
            f"{fmt(r.chi3_re):>15} {r.reference[1]:>9} | {fmt(r.threshold_ui):>11} "
            f"{r.reference[2]:>5} | chi1 {_flag(r.chi1_ok)}, chi3 {_flag(r.chi3_ok)}, "
            f"U_i {_flag(r.threshold_ok)}"
        )
        if r.error:
            lines.append(f"      error: {r.error}")
    passed = sum(r.ok for r in rows)
    lines.append(f"{passed}/{len(rows)} rows pass")
    return "\n".join(lines) + "\n"


def cmd_table1(config: RunConfig, out: str | None, form: str | None) -> int:
    rows = _table1_rows(config)
    if form == "csv":
        data = [
            (
                r.sgc_p,
                r.omega_c0,
                r.chi1_re,
                float(r.reference[0]),
                r.chi3_re,
                float(r.reference[1]),
                r.threshold_ui,
                float(r.reference[2]),
                int(r.chi1_ok),
                int(r.chi3_ok),
                int(r.threshold_ok),
            )
            for r in rows
        ]
        text = csv_text("table1", config, TABLE1_COLUMNS, data)
    elif form == "record":
        payload = {
            "delta_p": TABLE1_DELTA_P,
            "rows": [
                {
                    "p": r.sgc_p,
                    "omega_c0": r.omega_c0,
                    "chi1_re": _round(r.chi1_re),
                    "chi3_re": _round(r.chi3_re),
                    "u_i": _round(r.threshold_ui),
                    "i_i": _round(r.threshold_ii),
                    "reference": {
                        "chi1_re": r.reference[0],
                        "chi3_re": r.reference[1],
                        "u_i": r.reference[2],
                    },
                    "pass": {"chi1": r.chi1_ok, "chi3": r.chi3_ok, "u_i": r.threshold_ok},
                    "error": r.error,
                }
                for r in rows
            ],
        }
        text = record_text("table1", config, payload)
    else:
        text = table1_text(rows)
    write_atomic(out, text)
    return EXIT_FAILED if any(r.error for r in rows) else EXIT_OK


def cmd_chi_scan(config: RunConfig, out: str | None, form: str | None) -> int:
    c = config.chi_scan
    deltas = np.linspace(c.delta_min, c.delta_max, c.delta_points)
    axis = np.linspace(c.axis_min, c.axis_max, c.axis_points)
    if c.axis == "sgc_p":
        rows = chi_scan(deltas, axis, [config.atomic.omega_c0])
    else:
        rows = chi_scan(deltas, [config.atomic.sgc_p], axis)
    if form == "record":
        best = max(rows, key=lambda r: r.chi3.real)
        payload = {
            "rows": len(rows),
            "max_re_chi3": {
                "delta_p": _round(best.delta_p),
                "omega_c0": _round(best.omega_c0),
                "sgc_p": _round(best.sgc_p),
                "value": _round(best.chi3.real),
            },
        }
        write_atomic(out, record_text("chi-scan", config, payload))
        return EXIT_OK
    columns = ["delta_p", "omega_c0", "sgc_p", "chi1_re", "chi1_im", "chi3_re", "chi3_im"]
    data = [
        (r.delta_p, r.omega_c0, r.sgc_p, r.chi1.real, r.chi1.imag, r.chi3.real, r.chi3.imag)
        for r in rows
    ]
    write_atomic(out, csv_text("chi-scan", config, columns, data))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "hysteresis": cmd_hysteresis,
    "table1": cmd_table1,
    "chi-scan": cmd_chi_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "record"], dest="form")
    common.add_argument(
        "--seed-free",
        action="store_true",
        help="no-op; every computation is deterministic",
    )
    overrides = common.add_argument_group("config overrides")
    for dotted, _ in flag_names():
        overrides.add_argument(
            f"--{dotted}", dest=dotted, default=argparse.SUPPRESS, metavar="VALUE"
        )

    parser = argparse.ArgumentParser(
        prog="dopedpc",
        description="Optical bistability in an atom-doped 1D photonic crystal.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "linear transmission spectrum of the doped stack",
        "hysteresis": "nonlinear transmission versus incident intensity",
        "table1": "thresholds and susceptibilities for the six reference rows",
        "chi-scan": "susceptibility grid over detuning and p or omega_c0",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def load_config(args) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else RunConfig()
    for dotted, _ in flag_names():
        if dotted in vars(args):
            config.override(dotted, vars(args)[dotted])
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigError as exc:
        for key, message in exc.errors.items():
            print(f"error: {key}: {message}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](config, args.out, args.form)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
