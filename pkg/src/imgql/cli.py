"""Command-line entry point: ``imgql SPEC.imgql [options]``.

Exit codes: 0 success, 1 error in the specification, 2 error while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from .ccl import CclConfig
from .errors import EvalError, SpecError
from .executor import run
from .kernels import default_workers
from .taskgraph import compile_text

EXIT_OK, EXIT_SPEC, EXIT_RUNTIME = 0, 1, 2


def stdlib_path():
    return Path(str(resources.files("imgql") / "data" / "stdlib.imgql"))


def build_parser():
    p = argparse.ArgumentParser(prog="imgql", description="Spatial model checker for 2D images.")
    p.add_argument("spec", help="specification file (.imgql)")
    p.add_argument("--workers", type=int, default=1,
                   help=f"worker threads (0 = one per CPU, here {default_workers()})")
    p.add_argument("--reconnect-interval", type=int, default=8, metavar="K",
                   help="main iterations between reconnect passes in labelling (default 8)")
    p.add_argument("--max-rounds", type=int, default=None,
                   help="labelling round budget (default 4 * (width + height))")
    p.add_argument("--dump-dag", action="store_true", help="print the task graph before running")
    p.add_argument("--json-report", metavar="PATH", help="write a JSON run report")
    lib = p.add_mutually_exclusive_group()
    lib.add_argument("--stdlib", metavar="PATH", help="standard library to import first")
    lib.add_argument("--no-stdlib", action="store_true", help="do not import a standard library")
    p.add_argument("--debug-ccl", nargs="?", const="ccl-debug", metavar="DIR",
                   help="dump every labelling iteration as a coloured PNG into DIR")
    p.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    log = logging.getLogger("imgql")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    saved = log.level, log.propagate
    log.addHandler(handler)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    log.propagate = False
    try:
        return _main(args, log)
    finally:
        log.removeHandler(handler)
        log.setLevel(saved[0])
        log.propagate = saved[1]


def _main(args, log):
    stdlib = None if args.no_stdlib else (args.stdlib or stdlib_path())
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
        graph = compile_text(text, source=args.spec, stdlib=stdlib)
        config = CclConfig(args.reconnect_interval, args.max_rounds)
    except (SpecError, OSError, ValueError) as exc:
        log.error("error: %s", exc)
        return EXIT_SPEC
    if args.dump_dag:
        sys.stdout.write(graph.dump())
    workers = args.workers if args.workers > 0 else default_workers()
    try:
        report = run(graph, workers=workers, ccl_config=config, debug_ccl=args.debug_ccl)
    except EvalError as exc:
        log.error("error: %s", exc)
        return EXIT_RUNTIME
    log.info("computation finished in %.1f ms (%d tasks)", report.total_ms, report.task_count)
    if args.json_report:
        Path(args.json_report).write_text(json.dumps(report.to_json(), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
