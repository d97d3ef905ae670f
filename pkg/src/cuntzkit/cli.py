"""Command-line front end: verification, spectra, traces, states, reports.

Configuration comes from flags, optionally backed by a key=value file;
flags win.  Exit codes: 0 success (verify: every check verified), 1 failed
checks, 2 invalid configuration, 3 exact-arithmetic resource cap exceeded.
Rationals are emitted as strings; floats carry 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import __version__, adjudicator, spectral, states
from .cache import BlockCache
from .operators import (
    D_VARIANTS,
    OPERATOR_NAMES,
    GradeIndex,
    ResourceCapExceeded,
    assemble_D,
)
from .words import EMPTY, text, words_up_to

COMMANDS = (
    "verify", "spectrum", "heat-trace", "frohlich", "commutators",
    "adjudicate", "report",
)

CONFIG_KEYS = (
    "n", "max_grade", "t", "variant", "format", "cache_dir", "exact_cap",
    "suite", "out",
)


class ConfigError(Exception):
    """Rejected run configuration."""


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    max_grade: int = 4
    t_grid: tuple = (1.0, 0.5, 0.25)
    variant: Optional[str] = None
    fmt: str = "json"
    cache_dir: Optional[Path] = None
    exact_cap: int = 729
    suites: tuple = ()
    out: Optional[Path] = None

    def validate(self) -> "RunConfig":
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.max_grade < 0:
            raise ConfigError("max-grade must be nonnegative")
        if self.exact_cap < 1:
            raise ConfigError("exact-cap must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if not self.t_grid:
            raise ConfigError("t grid must be nonempty")
        if any(t <= 0 for t in self.t_grid):
            raise ConfigError("t values must be positive")
        if self.variant is not None and self.variant not in (
                D_VARIANTS + OPERATOR_NAMES):
            raise ConfigError(f"unknown variant {self.variant!r}")
        return self


def _f17(x) -> str:
    return format(float(x), ".17g")


def _word_text(word) -> str:
    return text(word) or "-"


def read_config_file(path: Path) -> dict:
    """key=value lines; blank lines and # comments ignored."""
    values = {}
    try:
        raw = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file: {err}") from err
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected key=value")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_t(raw: str) -> tuple:
    try:
        return tuple(float(part) for part in raw.split(","))
    except ValueError as err:
        raise ConfigError(f"bad t grid {raw!r}") from err


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"bad integer for {key}: {raw!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuntzkit",
        description="Exact groupoid-model diagnostics and adjudication.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path,
                        help="key=value config file; flags take precedence")
    parser.add_argument("--n", type=int, help="alphabet size (default 2)")
    parser.add_argument("--max-grade", type=int, dest="max_grade",
                        help="largest |mu|+|nu| handled (default 4)")
    parser.add_argument("--t", help="comma-separated positive t grid")
    parser.add_argument("--variant",
                        help="operator variant (d_tilde, d_kappa, ...)")
    parser.add_argument("--format", dest="fmt",
                        help="json or csv (default json)")
    parser.add_argument("--cache-dir", type=Path, dest="cache_dir",
                        help="directory for persisted exact blocks")
    parser.add_argument("--exact-cap", type=int, dest="exact_cap",
                        help="largest exact block dimension (default 729)")
    parser.add_argument("--suite",
                        help="comma-separated verdict families for verify")
    parser.add_argument("--out", type=Path,
                        help="output file (directory for report)")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    cfg = RunConfig()
    if "n" in file_values:
        cfg = replace(cfg, n=_parse_int(file_values["n"], "n"))
    if "max_grade" in file_values:
        cfg = replace(cfg, max_grade=_parse_int(file_values["max_grade"],
                                                "max_grade"))
    if "t" in file_values:
        cfg = replace(cfg, t_grid=_parse_t(file_values["t"]))
    if "variant" in file_values:
        cfg = replace(cfg, variant=file_values["variant"])
    if "format" in file_values:
        cfg = replace(cfg, fmt=file_values["format"])
    if "cache_dir" in file_values:
        cfg = replace(cfg, cache_dir=Path(file_values["cache_dir"]))
    if "exact_cap" in file_values:
        cfg = replace(cfg, exact_cap=_parse_int(file_values["exact_cap"],
                                                "exact_cap"))
    if "suite" in file_values:
        cfg = replace(cfg, suites=tuple(file_values["suite"].split(",")))
    if "out" in file_values:
        cfg = replace(cfg, out=Path(file_values["out"]))
    if args.n is not None:
        cfg = replace(cfg, n=args.n)
    if args.max_grade is not None:
        cfg = replace(cfg, max_grade=args.max_grade)
    if args.t is not None:
        cfg = replace(cfg, t_grid=_parse_t(args.t))
    if args.variant is not None:
        cfg = replace(cfg, variant=args.variant)
    if args.fmt is not None:
        cfg = replace(cfg, fmt=args.fmt)
    if args.cache_dir is not None:
        cfg = replace(cfg, cache_dir=args.cache_dir)
    if args.exact_cap is not None:
        cfg = replace(cfg, exact_cap=args.exact_cap)
    if args.suite is not None:
        cfg = replace(cfg, suites=tuple(args.suite.split(",")))
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    return cfg.validate()


def _emit(cfg: RunConfig, payload: str, stdout) -> None:
    if cfg.out is not None:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        cfg.out.write_text(payload)
    else:
        stdout.write(payload)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _blocks(max_grade: int):
    for g in range(max_grade + 1):
        for k in range(g + 1):
            yield GradeIndex(g - 2 * k, k)


def cmd_verify(cfg: RunConfig, stdout) -> int:
    verdicts = adjudicator.structural_suite(cfg.n, cfg.max_grade, cfg.exact_cap)
    if cfg.suites:
        families = {v.id.split(".")[0] for v in verdicts}
        unknown = set(cfg.suites) - families
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}")
        verdicts = [v for v in verdicts if v.id.split(".")[0] in cfg.suites]
    if cfg.fmt == "json":
        payload = json.dumps({"meta": {"N": cfg.n, "max_grade": cfg.max_grade,
                                       "version": __version__},
                              "verdicts": [v.to_dict() for v in verdicts]},
                             indent=2) + "\n"
    else:
        payload = _csv_text(["id", "status", "witnesses", "nonzero"], [
            [v.id, v.status, len(v.witnesses),
             sum(1 for w in v.witnesses if w["residual"] != "0")]
            for v in verdicts
        ])
    _emit(cfg, payload, stdout)
    return 0 if all(v.status == "verified" for v in verdicts) else 1


def _spectrum_rows(cfg: RunConfig) -> list:
    variant = cfg.variant or "d_tilde"
    store = BlockCache(cfg.cache_dir) if cfg.cache_dir else None
    rows = []
    for grade in _blocks(cfg.max_grade):
        if store is not None:
            builder = assemble_D if variant in D_VARIANTS else None
            block = (store.get(variant, cfg.n, grade, cfg.exact_cap,
                               builder=builder)
                     if builder else
                     store.get(variant, cfg.n, grade, cfg.exact_cap))
            pairs = spectral.spectrum(block).pairs
        else:
            pairs = spectral.block_eigenvalues(variant, cfg.n, grade,
                                               cfg.exact_cap)
        for value, mult in pairs:
            rows.append((grade.n, grade.k, value, mult))
    return rows


def cmd_spectrum(cfg: RunConfig, stdout) -> int:
    rows = _spectrum_rows(cfg)
    if cfg.fmt == "csv":
        payload = _csv_text(["n", "k", "eigenvalue", "multiplicity"], [
            [n, k, _f17(value), mult] for n, k, value, mult in rows
        ])
    else:
        payload = json.dumps({
            "variant": cfg.variant or "d_tilde",
            "rows": [{"n": n, "k": k, "eigenvalue": float(value),
                      "multiplicity": mult} for n, k, value, mult in rows],
        }, indent=2) + "\n"
    _emit(cfg, payload, stdout)
    return 0


def cmd_heat_trace(cfg: RunConfig, stdout) -> int:
    variant = cfg.variant or "d_tilde"
    rows = spectral.heat_trace(variant, cfg.t_grid, cfg.n, cfg.max_grade,
                               cfg.exact_cap)
    if cfg.fmt == "csv":
        payload = _csv_text(["t", "partial_trace", "tail_bound"], [
            [_f17(r["t"]), _f17(r["partial_trace"]), _f17(r["tail_bound"])]
            for r in rows
        ])
    else:
        payload = json.dumps({"variant": variant, "rows": rows},
                             indent=2) + "\n"
    _emit(cfg, payload, stdout)
    return 0


def cmd_frohlich(cfg: RunConfig, stdout) -> int:
    variant = cfg.variant or "d_tilde"
    records = []
    for t in cfg.t_grid:
        for rho in words_up_to(cfg.n, 1):
            for sigma in words_up_to(cfg.n, 1):
                value = states.frohlich(variant, rho, sigma, t, cfg.n,
                                        cfg.max_grade)
                records.append((variant, t, rho, sigma, value))
    if cfg.fmt == "csv":
        payload = _csv_text(
            ["variant", "t", "rho", "sigma", "value", "error_bound"], [
                [v, _f17(t), _word_text(rho), _word_text(sigma),
                 _f17(gv.value), _f17(gv.error_bound)]
                for v, t, rho, sigma, gv in records
            ])
    else:
        payload = json.dumps({"rows": [
            {"variant": v, "t": t, "rho": _word_text(rho),
             "sigma": _word_text(sigma), "value": gv.value,
             "error_bound": gv.error_bound, "exact_zero": gv.exact_zero}
            for v, t, rho, sigma, gv in records
        ]}, indent=2) + "\n"
    _emit(cfg, payload, stdout)
    return 0


def cmd_commutators(cfg: RunConfig, stdout) -> int:
    op = cfg.variant or "P_F"
    profiles = []
    for letter in range(1, cfg.n + 1):
        profile = spectral.commutator_svd(op, ((letter,), EMPTY), cfg.n,
                                          cfg.max_grade,
                                          exact_cap=cfg.exact_cap)
        profiles.append((letter, profile))
    if cfg.fmt == "csv":
        rows = []
        for letter, profile in profiles:
            for index, value in enumerate(profile.s_values):
                rows.append([op, f"S_{letter}", index, _f17(value)])
        payload = _csv_text(["op", "generator", "index", "singular_value"],
                            rows)
    else:
        payload = json.dumps({"op": op, "profiles": [
            {"generator": f"S_{letter}",
             "s_values": list(profile.s_values),
             "fit": profile.fit,
             "schatten": {str(p): value
                          for p, value in profile.schatten.items()}}
            for letter, profile in profiles
        ]}, indent=2) + "\n"
    _emit(cfg, payload, stdout)
    return 0


def cmd_adjudicate(cfg: RunConfig, stdout) -> int:
    if cfg.fmt != "json":
        raise ConfigError("adjudicate emits JSON only")
    payload = json.dumps(adjudicator.report(cfg.n, cfg.max_grade,
                                            cfg.exact_cap), indent=2) + "\n"
    _emit(cfg, payload, stdout)
    return 0


def cmd_report(cfg: RunConfig, stdout) -> int:
    """Aggregated summary plus delimited data and rendered figures."""
    from . import plotting

    out_dir = cfg.out if cfg.out is not None else Path("report")
    out_dir.mkdir(parents=True, exist_ok=True)
    variant = cfg.variant or "d_tilde"

    suite = adjudicator.structural_suite(cfg.n, cfg.max_grade, cfg.exact_cap)
    adjudication = adjudicator.report(cfg.n, cfg.max_grade, cfg.exact_cap)
    spectrum_rows = _spectrum_rows(cfg)
    trace_rows = spectral.heat_trace(variant, cfg.t_grid, cfg.n,
                                     cfg.max_grade, cfg.exact_cap)

    verdict_rows = [v.to_dict() for v in suite] + adjudication["verdicts"]
    (out_dir / "verdicts.csv").write_text(_csv_text(
        ["id", "status", "witnesses", "nonzero"], [
            [v["id"], v["status"], len(v["witnesses"]),
             sum(1 for w in v["witnesses"] if w["residual"] != "0")]
            for v in verdict_rows
        ]))
    (out_dir / "spectrum.csv").write_text(_csv_text(
        ["n", "k", "eigenvalue", "multiplicity"], [
            [n, k, _f17(value), mult] for n, k, value, mult in spectrum_rows
        ]))
    (out_dir / "heat_trace.csv").write_text(_csv_text(
        ["t", "partial_trace", "tail_bound"], [
            [_f17(r["t"]), _f17(r["partial_trace"]), _f17(r["tail_bound"])]
            for r in trace_rows
        ]))
    (out_dir / "adjudication.json").write_text(
        json.dumps(adjudication, indent=2) + "\n")

    plotting.save_spectrum_figure(out_dir / "spectrum.png", variant,
                                  spectrum_rows)
    plotting.save_heat_trace_figure(out_dir / "heat_trace.png", variant,
                                    trace_rows)
    plotting.save_residual_figure(out_dir / "residuals.png",
                                  adjudication["verdicts"])

    lines = [
        f"cuntzkit report (version {__version__})",
        f"N = {cfg.n}, max grade = {cfg.max_grade}, variant = {variant}",
        "",
        "structural suite:",
    ]
    for v in suite:
        lines.append(f"  {v.id}: {v.status}")
    lines.append("")
    lines.append("adjudication:")
    for v in adjudication["verdicts"]:
        lines.append(f"  {v['id']}: {v['status']}")
        if v["status"] != "verified":
            bad = next(w for w in v["witnesses"] if w["residual"] != "0")
            lines.append(
                f"    e.g. {bad['input']}: paper {bad['paper']}, "
                f"oracle {bad['oracle']}, residual {bad['residual']}")
    lines.append("")
    lines.append("files: verdicts.csv, spectrum.csv, heat_trace.csv, "
                 "adjudication.json, spectrum.png, heat_trace.png, "
                 "residuals.png")
    summary = "\n".join(lines) + "\n"
    (out_dir / "summary.txt").write_text(summary)
    stdout.write(summary)
    return 0


COMMAND_FNS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "heat-trace": cmd_heat_trace,
    "frohlich": cmd_frohlich,
    "commutators": cmd_commutators,
    "adjudicate": cmd_adjudicate,
    "report": cmd_report,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 0 if err.code in (0, None) else 2
    try:
        cfg = make_config(args)
        return COMMAND_FNS[args.command](cfg, stdout)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ResourceCapExceeded as err:
        print(f"resource cap exceeded: {err}", file=sys.stderr)
        return 3
    except AssertionError as err:
        print(f"failed assertion: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
