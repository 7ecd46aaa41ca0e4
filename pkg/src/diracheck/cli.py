"""Command-line front end.

Exit codes: 0 all checks pass, 1 at least one failure, 2 unattested-only,
3 scene rejected by the parser.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import SceneError
from .report import FAIL, PASS, UNATTESTED, emit_report
from .runner import run_checks
from .scene import parse_scene


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="diracheck",
                                     description="symbolic Dirac-geometry verifier")
    sub = parser.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", help="run the checks of a scene file")
    chk.add_argument("scene", help="path to the scene file (UTF-8 s-expressions)")
    chk.add_argument("--format", choices=("text", "json"), default="text")
    chk.add_argument("--output", default=None, help="write the report to a file")
    chk.add_argument("--filter", default=None, metavar="CHECK-ID-PREFIX",
                     help="only run checks whose id starts with the prefix")
    args = parser.parse_args(argv)

    with open(args.scene, "rb") as fh:
        text = fh.read().decode("utf-8")
    try:
        scene = parse_scene(text)
    except SceneError as exc:
        sys.stderr.write(f"{args.scene}:{exc}\n")
        return 3

    root = run_checks(scene, filter_prefix=args.filter)
    color = os.environ.get("DIRACHECK_COLOR", "0") == "1" and args.format == "text"
    payload = emit_report(root, args.format, color=color)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()

    if root.status == FAIL:
        return 1
    if root.status == UNATTESTED:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
