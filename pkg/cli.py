"""
Command-line front end.

    python cli.py roots B2
    python cli.py weyl A2 --bruhat
    python cli.py qmatrix A2 [--word 121]
    python cli.py calibrate A2
    python cli.py check pn 3 --tuple tuple.txt
    python cli.py check flag A2 --tuple tuple.txt [--parabolic 1] [--route weights]
    python cli.py check model p2.model --tuple tuple.txt [--dim4|--dim5|--wu]
    python cli.py buhstaber 7

Exit codes: 0 pass/success, 1 failing verdict, 2 usage or engine error.
Reports go to stdout (`--json` for structured output), logs to stderr.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from bott_samelson import q_matrix, q_matrix_for_word, q_matrix_table
from errors import EngineError
from gate import (
    buhstaber_bound,
    calibrate,
    check_flag,
    check_flag_weights,
    check_model,
    check_projective,
    load_convention,
    save_calibration,
)
from manifold_models import flag_model, ingest, projective_space, read_tuple
from reports import Verdict
from root_system import build
from settings import get_settings
from weyl import bruhat_leq, enumerate_group, parse_indices

logger = logging.getLogger(__name__)


# ---------------------------
# Commands
# ---------------------------
def cmd_roots(args: argparse.Namespace) -> int:
    datum = build(args.type)
    if args.json:
        print(json.dumps({
            "type": str(datum.cartan_type),
            "rank": datum.rank,
            "cartan": [list(row) for row in datum.cartan],
            "positive_roots": [list(a.root_coords) for a in datum.positive_roots],
        }, indent=2))
    else:
        print(f"{datum.cartan_type}: rank {datum.rank}, {datum.n} positive roots")
        for a in datum.positive_roots:
            print(f"  {a.root_coords}  height {a.height}  weight {a.coords}")
    return 0


def cmd_weyl(args: argparse.Namespace) -> int:
    datum = build(args.type)
    elements = enumerate_group(datum)
    covers = []
    if args.bruhat:
        for w in elements:
            for u in elements:
                if u.length == w.length - 1 and bruhat_leq(u, w):
                    covers.append((u.render(), w.render()))
    if args.json:
        payload = {"type": str(datum.cartan_type), "order": len(elements),
                   "elements": [{"word": w.render(), "length": w.length} for w in elements]}
        if args.bruhat:
            payload["covers"] = [list(c) for c in covers]
        print(json.dumps(payload, indent=2))
    else:
        print(f"W({datum.cartan_type}): {len(elements)} elements")
        for w in elements:
            print(f"  {w.render()}  length {w.length}")
        for u, w in covers:
            print(f"  {u} < {w}")
    return 0


def cmd_qmatrix(args: argparse.Namespace) -> int:
    datum = build(args.type)
    rows = q_matrix_for_word(datum, parse_indices(args.word)) if args.word else q_matrix(datum)
    table = q_matrix_table(rows)
    if args.json:
        print(json.dumps(table, indent=2))
    else:
        for w, row in table.items():
            body = " + ".join(f"{q}*[X_{v}]" if q != "1" else f"[X_{v}]" for v, q in row.items())
            print(f"{w}: {body}")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    report = calibrate(args.type)
    path = save_calibration(report, args.output)
    if args.json:
        print(report.to_json())
    else:
        print(f"twist sign {report.twist_sign:+d}, Schubert index {report.schubert_index} "
              f"({len(report.outcomes)} oracle runs on {', '.join(report.types)})")
        print(f"saved to {path}")
    return 0


def cmd_buhstaber(args: argparse.Namespace) -> int:
    value = buhstaber_bound(args.q)
    print(json.dumps({"q": args.q, "m": value}) if args.json else value)
    return 0


def _emit(verdict: Verdict, as_json: bool) -> int:
    print(verdict.to_json() if as_json else verdict.render())
    return 0 if verdict.passed else 1


def cmd_check(args: argparse.Namespace) -> int:
    if args.target == "pn":
        n = int(args.subject)
        t = read_tuple(args.tuple, projective_space(n))
        return _emit(check_projective(n, t, args.stop_on_failure), args.json)

    if args.target == "flag":
        convention = load_convention(args.calibration)
        flag = flag_model(args.subject, parse_indices(args.parabolic))
        t = read_tuple(args.tuple, flag)
        if args.route == "weights":
            verdict = check_flag_weights(flag, t, convention, args.stop_on_failure, sample=args.sample)
        else:
            verdict = check_flag(flag, t, convention, args.stop_on_failure)
        return _emit(verdict, args.json)

    model = ingest(args.subject)
    t = read_tuple(args.tuple, model)
    return _emit(check_model(model, t, args.mode, args.stop_on_failure, args.sample), args.json)


# ---------------------------
# CLI + Main
# ---------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Structured output")

    p = argparse.ArgumentParser(description="Chern-class realizability checks and Schubert calculus")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("roots", parents=[common], help="Positive roots of a Cartan type")
    s.add_argument("type", help="Cartan type, e.g. A2, B3, A1xC2")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("weyl", parents=[common], help="Weyl group elements")
    s.add_argument("type")
    s.add_argument("--bruhat", action="store_true", help="Also list Bruhat covers")
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("qmatrix", parents=[common], help="ch(O_Xw) td in the Schubert basis")
    s.add_argument("type")
    s.add_argument("--word", help="Fixed reduced word of w0, e.g. 121")
    s.set_defaults(func=cmd_qmatrix)

    s = sub.add_parser("calibrate", parents=[common], help="Fix and persist the flag-route convention")
    s.add_argument("type", help="Rank <= 2 Cartan type")
    s.add_argument("--output", default=None, help="Calibration file (default CALIBRATION_FILE)")
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("buhstaber", parents=[common], help="Buhstaber torsion bound m(q)")
    s.add_argument("q", type=int)
    s.set_defaults(func=cmd_buhstaber)

    s = sub.add_parser("check", parents=[common], help="Check a Chern tuple")
    s.add_argument("target", choices=["pn", "flag", "model"])
    s.add_argument("subject", help="n for pn, a Cartan type for flag, a model file for model")
    s.add_argument("--tuple", required=True, help="Chern tuple file")
    s.add_argument("--parabolic", default="", help="1-based simple roots generating W_I, e.g. 1,3")
    s.add_argument("--route", choices=["cells", "weights"], default="cells")
    s.add_argument("--calibration", default=None, help="Calibration file (default CALIBRATION_FILE)")
    s.add_argument("--stop-on-failure", action="store_true", help="Stop at the first failing condition")
    s.add_argument("--sample", type=int, default=None, help="Evaluate a seeded sample of N twist conditions (SAMPLE_SEED)")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--dim4", dest="mode", action="store_const", const="dim4")
    mode.add_argument("--dim5", dest="mode", action="store_const", const="dim5")
    mode.add_argument("--wu", dest="mode", action="store_const", const="wu")
    mode.add_argument("--torsion-free", dest="mode", action="store_const", const="torsion-free")
    s.set_defaults(func=cmd_check, mode=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format="%(asctime)s | %(levelname)s | %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logger.info(f"Running {args.command}")
    try:
        code = args.func(args)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
