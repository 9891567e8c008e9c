"""Command-line entry point: ``qdecay run | list | selftest``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .errors import CapabilityError, ConfigError, QDecayError, ReportIOError
from .scenario import CHECK_ORDER, ScenarioConfig, dumps, emit_report, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _summary(check: str, res: dict) -> str:
    status = "PASS" if res.get("passed") else "FAIL"
    if "error" in res:
        return f"{status}  {check}: {res['error']}"
    keys = [k for k in ("C", "limit", "exponent", "slow", "slope", "C0_fitted", "sup_first",
                        "sup_second") if k in res]
    detail = ", ".join(f"{k}={res[k]:.6g}" if isinstance(res[k], float) else f"{k}={res[k]}"
                       for k in keys)
    bad = [k for k, v in res.get("expectations", {}).items() if not v["ok"]]
    if bad:
        detail += "  unmet: " + ", ".join(bad)
    return f"{status}  {check}: {detail}"


def cmd_run(args) -> int:
    cfg = ScenarioConfig.load(args.config)
    cfg = cfg.with_overrides(seed=args.seed, out=args.out, checks=args.check)
    report = run_scenario(cfg)
    for check, res in report.results.items():
        print(_summary(check, res))
    out = cfg.output.get("dir")
    if out:
        for p in emit_report(report, out):
            print(f"wrote {p}")
    print("all checks passed" if report.passed else "some checks failed")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_list(args) -> int:
    from .gallery.catalog import describe
    for name, sig, summary in describe():
        print(f"{name:16s} {sig:45s} {summary}")
    print("\nchecks: " + ", ".join(CHECK_ORDER))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import run_acceptance
    t0 = time.perf_counter()
    report = run_acceptance(seed=args.seed)
    for line in report.lines():
        print(line)
    print(f"{'all criteria passed' if report.passed else 'some criteria failed'}"
          f" ({time.perf_counter() - t0:.1f} s)")
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "selftest.json").write_text(dumps(report.to_dict()))
            (out / "timing.json").write_text(dumps(report.timing()))
        except OSError as exc:
            raise ReportIOError(f"cannot write to {out}: {exc}") from exc
        print(f"wrote {out / 'selftest.json'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdecay", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario config")
    run.add_argument("config", help="scenario JSON file")
    run.add_argument("--seed", type=int, default=None, help="override sampling.seed")
    run.add_argument("--out", default=None, help="write report.json and CSVs here")
    run.add_argument("--check", action="append", choices=CHECK_ORDER, default=None,
                     help="run only this check (repeatable)")
    run.set_defaults(fn=cmd_run)
    lst = sub.add_parser("list", help="list gallery metrics")
    lst.set_defaults(fn=cmd_list)
    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--out", default=None, help="write selftest.json here")
    st.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (ConfigError, CapabilityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReportIOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except QDecayError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
