"""Command-line front end.

Exit codes: 0 optimal solution, 2 infeasible (certificate emitted), 1 input or
internal error (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import oracle, prefetch, sched_equal, sched_tallsmall
from .errors import InstanceError, SizeGuard, Violations
from .generate import DEFAULTS, generate
from .graphlp import Infeasible

log = logging.getLogger("skeletonlp")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_equal(data: dict, verify: bool, oracle_check: bool) -> tuple[int, dict]:
    inst = sched_equal.EqualInstance.from_json(data)
    try:
        sched = sched_equal.solve(inst)
    except Infeasible as exc:
        out = {"status": "infeasible", "solution": sched_equal.solution_json(None, inst.length, exc.cycle),
               "verified": (not verify) or exc.weight < 0}
        if oracle_check:
            out["oracle_agreement"] = not oracle.brute_equal(inst).feasible
        return EXIT_INFEASIBLE, out
    out = {"status": "optimal", "objective": sched.total_completion(inst.length),
           "solution": sched_equal.solution_json(sched, inst.length)}
    out["verified"] = _verified(lambda: sched_equal.verify_equal(inst, sched), verify)
    if oracle_check:
        ref = oracle.brute_equal(inst)
        out["oracle_agreement"] = ref.feasible and ref.objective == out["objective"]
    return EXIT_OK, out


def run_tallsmall(data: dict, verify: bool, oracle_check: bool) -> tuple[int, dict]:
    inst = sched_tallsmall.TallSmallInstance.from_json(data)
    try:
        sched = sched_tallsmall.solve(inst)
    except Infeasible as exc:
        out = {"status": "infeasible", "solution": sched_tallsmall.solution_json(None, exc.cycle),
               "verified": (not verify) or exc.weight < 0}
        if oracle_check:
            out["oracle_agreement"] = not oracle.brute_tallsmall(inst).feasible
        return EXIT_INFEASIBLE, out
    out = {"status": "optimal", "objective": sched.tall_completion(),
           "solution": sched_tallsmall.solution_json(sched)}
    out["verified"] = _verified(lambda: sched_tallsmall.verify_tallsmall(inst, sched), verify)
    if oracle_check:
        ref = oracle.brute_tallsmall(inst)
        out["oracle_agreement"] = ref.feasible and ref.objective == out["objective"]
    return EXIT_OK, out


def run_prefetch(data: dict, verify: bool, oracle_check: bool) -> tuple[int, dict]:
    inst = prefetch.PrefetchInstance.from_json(data)
    fetches, stall, _ = prefetch.solve(inst)
    out = {"status": "optimal", "objective": stall, "solution": prefetch.solution_json(fetches, stall)}
    out["verified"] = _verified(lambda: prefetch.simulate(inst, fetches) == stall, verify)
    if oracle_check:
        ref = oracle.brute_prefetch(inst)
        out["oracle_agreement"] = ref.feasible and ref.objective == stall
    return EXIT_OK, out


def _verified(check, enabled: bool) -> bool:
    if not enabled:
        return False
    try:
        result = check()
    except Violations as exc:
        log.error("verification failed: %s", exc)
        return False
    return result is not False


RUNNERS = {"equal": run_equal, "tallsmall": run_tallsmall, "prefetch": run_prefetch}


def solve_document(command: str, text: str, verify: bool = True,
                   oracle_check: bool = False) -> tuple[int, str]:
    """Solve one instance given as JSON text; returns (exit code, output JSON)."""
    data = json.loads(text)
    if not isinstance(data, dict):
        raise InstanceError("instance JSON must be an object")
    code, out = RUNNERS[command](data, verify, oracle_check)
    out = {"format": 1, "problem": command, **out}
    if verify and not out["verified"]:
        print("error: solver output failed verification", file=sys.stderr)
        code = EXIT_ERROR
    if oracle_check and not out["oracle_agreement"]:
        print("error: solver and brute-force oracle disagree", file=sys.stderr)
        code = EXIT_ERROR
    return code, dumps(out)


def _is_inline(source: str) -> bool:
    return source.lstrip().startswith(("{", "["))


def _read_input(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    if _is_inline(source):
        return source
    return Path(source).read_text()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _solve_one(command: str, text: str, args) -> tuple[int, str | None]:
    try:
        return solve_document(command, text, args.verify, args.oracle_check)
    except (json.JSONDecodeError, InstanceError, FileNotFoundError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
    except SizeGuard as exc:
        print(f"error: --oracle-check: {exc}", file=sys.stderr)
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR, None


def cmd_solve(args) -> int:
    src = None if args.input == "-" or _is_inline(args.input) else Path(args.input)
    if src is not None and src.is_dir():
        if not args.out:
            print("error: --out DIR is required when --input is a directory", file=sys.stderr)
            return EXIT_ERROR
        dest = Path(args.out)
        dest.mkdir(parents=True, exist_ok=True)
        worst = EXIT_OK
        for path in sorted(src.glob("*.json")):
            code, text = _solve_one(args.command, path.read_text(), args)
            if text is not None:
                (dest / path.name).write_text(text)
            worst = max(worst, code, key=lambda c: (0, 2, 1)[c])
        return worst
    try:
        text = _read_input(args.input)
    except (OSError, FileNotFoundError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_ERROR
    code, out = _solve_one(args.command, text, args)
    if out is not None:
        _emit(out, args.out)
    return code


def cmd_gen(args) -> int:
    params = {k: getattr(args, k) for k in DEFAULTS[args.kind] if getattr(args, k, None) is not None}
    try:
        inst = generate(args.kind, args.seed, **params)
    except (ValueError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(dumps(inst.to_json()), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skeletonlp",
                                     description="Exact skeleton-LP solvers for scheduling and prefetching.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("equal", "equal-length jobs, minimum total completion"),
                            ("tallsmall", "tall/small unit jobs"),
                            ("prefetch", "offline prefetching, minimum stall")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True,
                       help="instance file, directory of *.json files, inline JSON, or - for stdin")
        p.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True)
        p.add_argument("--oracle-check", action="store_true",
                       help="cross-check against the brute-force oracle (tiny instances only)")
        p.add_argument("--out", help="output file (or directory in batch mode)")
        p.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="seeded random instance")
    g.add_argument("kind", choices=sorted(DEFAULTS))
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--machines", type=int)
    g.add_argument("--length", type=int)
    g.add_argument("--release-max", dest="release_max", type=int)
    g.add_argument("--slack", type=int)
    g.add_argument("--horizon", type=int)
    g.add_argument("--tall-fraction", dest="tall_fraction", type=float)
    g.add_argument("--cache-size", dest="cache_size", type=int)
    g.add_argument("--fetch-duration", dest="fetch_duration", type=int)
    g.add_argument("--alphabet", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
