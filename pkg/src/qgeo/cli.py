"""Command line entry point: ``qgeo run | list | validate | schema``.

Exit codes: 0 when every report row passes, 1 when any row fails, 2 for
configuration errors (unreadable file, bad JSON, schema violation, invalid
parameters).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import QGeoError, SchemaError
from .report import emit_report
from .scenarios import CATALOG, config_schema, run_scenario, validate_config

log = logging.getLogger("qgeo")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgeo", description="Run modular-momentum and gauge-geometry scenarios.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its report")
    run.add_argument("scenario", choices=sorted(CATALOG))
    run.add_argument("--config", help="JSON configuration file")
    run.add_argument("--out", help="output directory (overrides output.dir)")
    run.add_argument("--format", choices=["csv", "json"], help="report format (overrides output.format)")
    run.add_argument("--seed", type=int, help="random seed (overrides seed)")
    run.add_argument("--workers", type=int, help="threads for sweep points (overrides workers)")
    run.add_argument("--dynamic", action="store_true", help="evolve packets instead of the kinematic sweep")

    sub.add_parser("list", help="list the scenario catalog")

    val = sub.add_parser("validate", help="schema-check a configuration without running it")
    val.add_argument("--config", required=True)

    sch = sub.add_parser("schema", help="print the JSON schema of a scenario configuration")
    sch.add_argument("scenario", nargs="?", choices=sorted(CATALOG))
    return ap


def _run(args) -> int:
    config = _load(args.config) if args.config else {"scenario": args.scenario}
    if not isinstance(config, dict):
        raise SchemaError("configuration must be a JSON object")
    if config.setdefault("scenario", args.scenario) != args.scenario:
        raise SchemaError(f"config is for {config['scenario']!r}, not {args.scenario!r}", ("scenario",))
    if args.seed is not None:
        config["seed"] = args.seed
    if args.workers is not None:
        config["workers"] = args.workers
    output = dict(config.get("output", {}))
    if args.out is not None:
        output["dir"] = args.out
    if args.format is not None:
        output["format"] = args.format
    if output:
        config["output"] = output
    resolved = validate_config(config)
    errors = []
    rows = run_scenario(config, dynamic=args.dynamic, errors=errors)
    for msg in errors:
        log.error(msg)
    out = resolved["output"]
    path = emit_report(rows, out["dir"], out["name"], out["format"])
    failed = [r for r in rows if not r.passed]
    for r in failed:
        log.warning("FAIL %s sweep=%s %s error=%.3g", r.scenario, r.sweep, r.quantity, r.abs_error)
    print(f"{args.scenario}: {len(rows) - len(failed)}/{len(rows)} rows passed -> {path}")
    return EXIT_FAIL if failed else EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "list":
            for name, sc in sorted(CATALOG.items()):
                print(f"{name:14s} {sc.description}")
            return EXIT_OK
        if args.command == "schema":
            print(json.dumps(config_schema(args.scenario), indent=1))
            return EXIT_OK
        if args.command == "validate":
            validate_config(_load(args.config))
            print("ok")
            return EXIT_OK
        return _run(args)
    except (OSError, json.JSONDecodeError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QGeoError as exc:
        print(f"invalid parameters: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
