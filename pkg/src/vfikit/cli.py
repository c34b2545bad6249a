"""Command line entry point: ``vfikit run`` and ``vfikit check``."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .scenario import load_config, run_scenario, summarize, write_log

log = logging.getLogger("vfikit")


def _run_one(args):
    config, name, dt, strict = args
    cfg = load_config(config)
    if dt is not None:
        cfg = cfg.with_dt(dt)
    return run_scenario(cfg, name, strict_singular=strict)


def _scenarios(cfg, which: str) -> list[str]:
    if which == "all":
        return sorted(cfg.scenarios)
    if which not in cfg.scenarios:
        raise SystemExit(f"unknown scenario {which!r}; choose from {', '.join(sorted(cfg.scenarios))} or all")
    return [which]


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    names = _scenarios(cfg, args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(str(args.config), n, args.dt, args.strict_singular) for n in names]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(args.jobs, len(jobs))) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    for res in results:
        write_log(res.records, out / f"{res.name}.csv", cfg.moving.n)
    text = summarize(results)
    (out / "summary.txt").write_text(text)
    print(text, end="")
    if not args.no_plots:
        from .plotting import write_figures
        for p in write_figures(results, out):
            log.info("wrote %s", p)
    return 0 if all(r.summary["matches"] is not False for r in results) else 1


def cmd_check(args) -> int:
    try:
        cfg = load_config(args.config)
        cfg.static_line()
        cfg.moving.fkm(cfg.q0)
    except (ValueError, KeyError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    print(f"{args.config}: ok ({cfg.moving.n}-joint moving arm, {len(cfg.scenarios)} scenarios, "
          f"dt={cfg.dt:g} s, duration={cfg.duration:g} s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vfikit", description="Two-arm VFI scenario runner.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one or all scenarios")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--scenario", default="all", help="S1..S5 or all (default)")
    run.add_argument("--dt", type=float, default=None, help="control period in seconds (overrides the config)")
    run.add_argument("--out", default="out", help="output directory (default: ./out)")
    run.add_argument("--strict-singular", action="store_true",
                     help="abort on a singular distance Jacobian instead of dropping the row")
    run.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    run.add_argument("--no-plots", action="store_true")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="validate a config without running it")
    check.add_argument("--config", required=True, type=Path)
    check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "dt", None) is not None and not args.dt > 0:
        print("--dt must be positive", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
