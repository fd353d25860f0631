"""Command-line interface.

Subcommands: gen (write a dataset), run (benchmark sweep), spectrum
(variance spectrum), table (markdown comparison). Exit codes: 0 ok,
2 config error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..chanforge import GenConfig, generate_dataset, save_dataset
from ..errors import ConfigError, DataError, FormatError, InputError
from .config import ExperimentConfig
from .report import (emit_comparison_table, load_reference_constants,
                     read_results_csv, write_results_csv, write_spectrum_csv)
from .runner import emit_variance_spectrum, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _cmd_gen(args) -> int:
    if args.config:
        cfg = GenConfig.from_file(args.config)
        overrides = {}
        if args.profile is not None:
            overrides["profile"] = args.profile
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.count is not None:
            overrides["count"] = args.count
        if overrides:
            from dataclasses import replace
            cfg = replace(cfg, **overrides)
    else:
        cfg = GenConfig(
            profile=args.profile if args.profile is not None else "low-spread-30ns",
            seed=args.seed if args.seed is not None else 0,
            count=args.count if args.count is not None else 1,
        )
    dataset = generate_dataset(cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(dataset, out)
    sidecar = out.with_name(out.name + ".cfg")
    sidecar.write_text(cfg.to_text())
    print(f"wrote {len(dataset)} samples to {out} ({out.stat().st_size} bytes); "
          f"config sidecar {sidecar}")
    return EXIT_OK


def _out_dir(cfg: ExperimentConfig, override) -> Path:
    out = Path(override) if override else Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    out = _out_dir(cfg, args.out_dir)
    rows = run_experiment(cfg)
    results_csv = out / "results.csv"
    write_results_csv(rows, results_csv)
    figure = out / "gcs_vs_k.png"
    from .figures import plot_gcs_vs_k  # defer: pulls in matplotlib
    plot_gcs_vs_k(rows, figure)
    print(f"wrote {results_csv} and {figure} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    out = _out_dir(cfg, args.out_dir)
    rows = emit_variance_spectrum(cfg)
    spectrum_csv = out / "spectrum.csv"
    write_spectrum_csv(rows, spectrum_csv)
    figure = out / "variance_spectrum.png"
    from .figures import plot_variance_spectrum
    plot_variance_spectrum(rows, figure)
    print(f"wrote {spectrum_csv} and {figure} ({len(rows)} components)")
    return EXIT_OK


def _cmd_table(args) -> int:
    rows = read_results_csv(args.results)
    refs = load_reference_constants(args.refs)
    table = emit_comparison_table(rows, refs)
    if args.out:
        Path(args.out).write_text(table)
        print(f"wrote {args.out}")
    else:
        print(table, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csipca",
        description="PCA-based downlink CSI feedback compression toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a channel dataset (CFR1 file)")
    gen.add_argument("--profile", help="stock profile name or profile file path")
    gen.add_argument("--seed", type=int, help="generator seed (default 0)")
    gen.add_argument("--count", type=int, help="number of samples (default 1)")
    gen.add_argument("--config", help="generator config file; flags override it")
    gen.add_argument("--out", required=True, help="output dataset path")
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="run a benchmark sweep")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--out-dir", help="override the config's out_dir")
    run.set_defaults(func=_cmd_run)

    spectrum = sub.add_parser("spectrum", help="emit the variance spectrum")
    spectrum.add_argument("--config", required=True, help="experiment config file")
    spectrum.add_argument("--out-dir", help="override the config's out_dir")
    spectrum.set_defaults(func=_cmd_spectrum)

    table = sub.add_parser("table", help="render a markdown comparison table")
    table.add_argument("--results", required=True, help="results.csv from a run")
    table.add_argument("--refs", help="reference constants CSV (default: packaged)")
    table.add_argument("--out", help="write the table here instead of stdout")
    table.set_defaults(func=_cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
