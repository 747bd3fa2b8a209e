"""Command-line front end.

    bsigma list [--json]
    bsigma verify NAME --seeds 0..100 [--window N] [--threshold M] [--budget B]
                  [--mutate psi-off-by-one|bound-minus-one] [--jobs J] [--json]
    bsigma adversary GAME --candidate NAME_OR_FILE [--budget B] [--seed S] [--out PATH]
    bsigma generate PROBLEM --seed S [--show N]

Reports are JSON lines. ``verify`` exits 0 iff every seed passes;
``adversary`` exits 0 on a defeat and 2 when the candidate survived the budget.
"""
from __future__ import annotations

import argparse
import json
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import games, harness, reductions
from .errors import LabError, MalformedCandidate
from .problems import DEFAULT_THRESHOLD, DEFAULT_WINDOW, Family, ProblemId, generate


def seed_range(text: str) -> range:
    """``A..B`` (B exclusive) or a single seed."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b))
        return range(int(text), int(text) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}; use A..B") from None


def cmd_list(args) -> int:
    if args.json:
        print(reductions.listing_json())
        return 0
    print("problems: " + ", ".join(p.value for p in ProblemId))
    for entry in reductions.listing():
        tag = " [strong]" if entry["strong"] else ""
        print(f"{entry['name']}: {entry['source']} -> {entry['target']} ({entry['anchor']}){tag}")
    return 0


def _verify_one(job: tuple) -> dict:
    name, seed, kw = job
    return harness.verify_seed(name, seed, **kw)


def cmd_verify(args) -> int:
    name = args.reduction
    reductions.get(name)
    kw = {"window": args.window, "threshold": args.threshold, "budget": args.budget,
          "mutate": args.mutate}
    jobs = [(name, s, kw) for s in args.seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_verify_one, jobs))
    else:
        records = [_verify_one(j) for j in jobs]
    records.sort(key=lambda r: r["seed"])
    summary = harness.summarize(name, records)
    for r in records:
        print(json.dumps(r) if args.json else _line(r))
    print(json.dumps(summary) if args.json else
          f"{name}: {summary['passed']}/{summary['total']} pass"
          + (f", {summary['fixture_errors']} fixture errors" if summary["fixture_errors"] else "")
          + (f", use-check: {summary['use-check']}" if "use-check" in summary else ""))
    return 0 if summary["passed"] == summary["total"] else 1


def _line(r: dict) -> str:
    phases = " ".join(f"{k}={v}" for k, v in r["phases"].items())
    extra = f"  {json.dumps(r['witnesses'])}" if r["witnesses"] else ""
    return f"{r['reduction']} seed={r['seed']} {r['status']}: {phases}{extra}"


def cmd_adversary(args) -> int:
    tr = games.play(args.game, args.candidate, args.budget, args.seed)
    out = Path(args.out) if args.out else Path(tempfile.gettempdir()) / \
        f"{args.game}-{Path(args.candidate).stem}-{args.seed}.json"
    out.write_text(json.dumps(tr.to_json(), indent=1))
    print(json.dumps({"game": tr.game, "candidate": tr.candidate, "seed": tr.seed,
                      "budget_used": tr.budget_used, "verdict": tr.verdict.status.value,
                      "detail": tr.verdict.detail, "transcript": str(out)}))
    return 0 if tr.verdict.status.value == "defeated" else 2


def cmd_generate(args) -> int:
    inst, _ = generate(args.problem, args.seed)
    if isinstance(inst, Family):
        body = {f"W{e}": sorted(w.members_at(args.show)) for e, w in enumerate(inst.sets)}
    elif inst.arity == 1:
        body = {"colors": [inst.color(x) for x in inst.domain_below(args.show)]}
    else:
        body = {"colors": [[inst.color(x, s) for s in range(x + 1, args.show)] for x in range(args.show)]}
    print(json.dumps({"problem": args.problem, "seed": args.seed, "name": inst.name, **body}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bsigma", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="problems and catalog reductions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", help="run a reduction end to end over seeds")
    p.add_argument("reduction")
    p.add_argument("--seeds", type=seed_range, default=range(0, 10))
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.add_argument("--budget", type=int, default=harness.DEFAULT_BUDGET)
    p.add_argument("--mutate", choices=sorted(harness.MUTATIONS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    # reductions never see spoilers; the flag exists so scripts can say so
    p.add_argument("--no-spoiler-to-reductions", action="store_true", default=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("adversary", help="play a diagonalization game")
    p.add_argument("game", choices=games.GAMES)
    p.add_argument("--candidate", required=True, help="built-in name or JSON transducer file")
    p.add_argument("--budget", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="transcript path (default: temp dir)")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("generate", help="print a seeded instance")
    p.add_argument("problem", choices=[x.value for x in ProblemId])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--show", type=int, default=20)
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedCandidate as exc:
        print(json.dumps({"error": "malformed-candidate", "detail": str(exc)}), file=sys.stderr)
        return 3
    except (KeyError, LabError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
