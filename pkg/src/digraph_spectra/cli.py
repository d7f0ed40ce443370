"""``digraph-spectra`` command line.

Exit status: 0 success, 1 contract violation (failed expectation, failed
check, bound violation in the safe regime), 2 config or I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DigraphSpectraError
from .experiments import load_config, run_experiment

EXIT_OK, EXIT_CONTRACT, EXIT_CONFIG = 0, 1, 2


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    except DigraphSpectraError as exc:  # ConfigError and degree validation errors
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.out or str(Path("results") / Path(args.config).stem)
    try:
        res = run_experiment(cfg, out_dir=out, jobs=args.jobs, seed_root=args.seed_root)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DigraphSpectraError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    print(f"{cfg.kind}: {len(res.rows)} rows written to {res.out_dir}")
    for note in res.notes:
        print(f"note: {note}")
    for f in res.failures:
        print(f"FAILED: {f}")
    return EXIT_OK if res.ok else EXIT_CONTRACT


def _cmd_oracle(args) -> int:
    from .oracle import format_checks_csv, format_proto_path, parse_oracle_file, tech_bound_check

    try:
        text = Path(args.file).read_text()
        seq, paths = parse_oracle_file(text)
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, DigraphSpectraError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.c > 1:
        print("input error: --c must exceed 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        checks = [(format_proto_path(pp, seq), tech_bound_check(seq, pp, args.c))
                  for pp in paths]
    except DigraphSpectraError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    csv_text = format_checks_csv(checks)
    if args.out:
        try:
            Path(args.out).write_text(csv_text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(csv_text)
    bad = [lit for lit, chk in checks if chk.in_regime and not chk.holds]
    for lit in bad:
        print(f"FAILED: bound violated in regime for {lit}", file=sys.stderr)
    return EXIT_CONTRACT if bad else EXIT_OK


def _cmd_check(args) -> int:
    from .checks import run_checks

    failed = 0
    for name, ok, detail in run_checks():
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return EXIT_CONTRACT if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="digraph-spectra",
                                description="Spectra of random directed configuration graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed-root", type=int, default=None, help="override seed_root")
    r.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    r.add_argument("--out", default=None, help="output directory")
    r.set_defaults(func=_cmd_run)

    o = sub.add_parser("oracle", help="exact correlation values for proto-paths in a file")
    o.add_argument("file")
    o.add_argument("--c", type=float, default=2.0)
    o.add_argument("--out", default=None, help="write CSV here instead of stdout")
    o.set_defaults(func=_cmd_oracle)

    c = sub.add_parser("check", help="run the built-in invariant suite")
    c.set_defaults(func=_cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
