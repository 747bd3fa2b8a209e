"""Budgeted diagonalization games against candidate functionals.

A game either defeats its candidate within the budget or reports
``survived-budget``. Survival is not a win for the candidate: a finite run
cannot show that no functional works, only that this one was not caught.

Budgets count steps: each oracle query and each committed output of the
candidate costs one, and so does each adversary move.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import count
from pathlib import Path
from typing import Any, Callable

from .coding import left, mix, right, set_decode
from .colorings import ColoringInstance, ColoringSpoiler
from .errors import MalformedCandidate
from .functional import (Kind, MonotoneFunctional, OraclePrefix, OutputPrefix, Pending,
                         PointwiseFunctional, Status, Verdict)
from .machines import EnumSet, SpoilerTag
from .problems import Family, FamilySpoiler, ProblemId, Solution, validate
from .streams import Stream

DEFAULT_PATIENCE = 16


@dataclass
class GameTranscript:
    game: str
    candidate: str
    seed: int
    budget: int
    moves: list[dict] = field(default_factory=list)
    budget_used: int = 0
    verdict: Verdict = field(default_factory=lambda: Verdict(Status.UNKNOWN))

    def to_json(self) -> dict:
        return {"game": self.game, "candidate": self.candidate, "seed": self.seed,
                "budget": self.budget, "budget_used": self.budget_used,
                "verdict": self.verdict.to_json(), "moves": self.moves}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def commitments(self) -> dict[int, int]:
        """Every oracle answer the adversary gave, in one map."""
        out: dict[int, int] = {}
        for move in self.moves:
            for p, v in move["oracle"]:
                if p in out and out[p] != v:
                    raise AssertionError(f"position {p} retracted")
                out[p] = v
        return out


class _LazyTape:
    """Oracle prefix whose unanswered positions are decided on first query."""

    def __init__(self, decide: Callable[[int], int]):
        self.decide = decide
        self.answers: dict[int, int] = {}
        self.fresh: list[tuple[int, int]] = []

    def __contains__(self, p: int) -> bool:
        return True

    def __getitem__(self, p: int) -> int:
        if p not in self.answers:
            v = self.decide(p)
            self.answers[p] = v
            self.fresh.append((p, v))
        return self.answers[p]

    def commit(self, p: int, v: int) -> None:
        assert p not in self.answers, "commitments are never retracted"
        self.answers[p] = v
        self.fresh.append((p, v))

    def drain(self) -> list[list[int]]:
        out, self.fresh = [list(e) for e in self.fresh], []
        return out


# -- candidates ----------------------------------------------------------------

def _single(rule: Callable[[Callable[[int], int]], int]) -> Callable:
    def at(n, ask):
        if n > 0:
            raise Pending
        return rule(ask)
    return at


def _forever(ask):
    for x in count():
        ask(x)


def _majority(ask, first: int = 100) -> int:
    tally: dict[int, int] = {}
    for x in range(first):
        c = ask(x) - 1
        tally[c] = tally.get(c, 0) + 1
    return min(tally, key=lambda c: (-tally[c], c))


RT1_CANDIDATES: dict[str, tuple[MonotoneFunctional, str]] = {
    "constant-hole": (PointwiseFunctional("constant-hole", _single(lambda ask: 0)), "hole"),
    "first-color": (PointwiseFunctional("first-color", _single(lambda ask: ask(0) - 1)), "hole"),
    "majority-of-first-100": (PointwiseFunctional("majority-of-first-100", _single(_majority)), "hole"),
    "never-commits": (PointwiseFunctional("never-commits", _single(_forever)), "hole"),
    "evens": (PointwiseFunctional("evens", lambda n, ask: 2 * n), "set"),
}

NAIVE_RT1 = ("constant-hole", "first-color", "majority-of-first-100")


def _stage_count(ask) -> int:
    """Watch the family until ten quiet stages pass, then bound by the stage count."""
    n = ask(0)
    quiet, top = 0, -1
    for t in count():
        changed = False
        for e in range(n):
            for x in set_decode(ask(1 + t * n + e)):
                top, changed = max(top, x), True
        quiet = 0 if changed else quiet + 1
        if quiet >= 10:
            return max(t + 1, top + 1)


UNION_CANDIDATES: dict[str, MonotoneFunctional] = {
    "immediate-bound-100": PointwiseFunctional("immediate-bound-100", _single(lambda ask: 100), Kind.FAMILY),
    "stage-count": PointwiseFunctional("stage-count", _single(_stage_count), Kind.FAMILY),
    "never-commits": PointwiseFunctional("never-commits", _single(_forever), Kind.FAMILY),
}


def naive_union_phi(k: int = 2) -> PointwiseFunctional:
    """Member e collects the points of color e, each entering one stage after itself."""
    def rule(pos, ask):
        if pos == 0:
            return k
        t, e = divmod(pos - 1, k)
        return 1 << t if ask(t) - 1 == e else 0
    return PointwiseFunctional("color-classes", rule, Kind.FUNCTION, Kind.FAMILY)


def _least_color_below_bound(ask) -> int:
    b = ask(right(0))
    colors = [ask(left(x)) - 1 for x in range(b)]
    return min(colors, default=0)


PAIR_CANDIDATES: dict[str, tuple[MonotoneFunctional, MonotoneFunctional]] = {
    "naive": (naive_union_phi(), PointwiseFunctional("least-color-below-bound", _single(_least_color_below_bound))),
    "empty-constant": (
        PointwiseFunctional("empty-family", lambda pos, ask: 1 if pos == 0 else 0, Kind.FUNCTION, Kind.FAMILY),
        PointwiseFunctional("constant-0", _single(lambda ask: 0)),
    ),
    "changing": (naive_union_phi(), PointwiseFunctional("bound-parity", _single(lambda ask: ask(right(0)) % 2))),
}


# -- finite transducers from JSON ------------------------------------------------

def _kind(name: str) -> Kind:
    """Accept a Kind value or its first word ("function", "set", "family")."""
    for k in Kind:
        if name in (k.value, k.value.split("-")[0]):
            return k
    raise ValueError(f"unknown kind {name!r}")


def transducer(spec: dict, name: str = "transducer") -> PointwiseFunctional:
    """A functional from a finite state table.

    ``spec = {"start": s, "states": {s: state}, "in": kind, "out": kind}``;
    a state is ``{"query": p, "on": {"<answer>": next, "*": next}}`` or
    ``{"emit": v, "next": next}``; a missing ``next`` (or ``null``) ends the
    output. ``p`` may be an integer or ``{"offset": d}`` for position ``n + d``.
    With ``"mode": "stream"`` (the default) output position n is the n-th
    value emitted by one run; with ``"mode": "pointwise"`` the table is run
    afresh for each n and output n is the first value emitted.
    """
    try:
        states = spec["states"]
        start = spec["start"]
        kinds = _kind(spec.get("in", "function")), _kind(spec.get("out", "function"))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedCandidate(f"{name}: {exc}") from None
    for sname, st in states.items():
        if not isinstance(st, dict) or ("query" in st) == ("emit" in st):
            raise MalformedCandidate(f"{name}: state {sname!r} must either query or emit")
        targets = list(st.get("on", {}).values()) if "query" in st else [st.get("next")]
        for t in targets:
            if t is not None and t not in states:
                raise MalformedCandidate(f"{name}: state {sname!r} jumps to unknown {t!r}")
        if "query" in st and "*" not in st.get("on", {}):
            raise MalformedCandidate(f"{name}: state {sname!r} needs a '*' branch")
    if start not in states:
        raise MalformedCandidate(f"{name}: unknown start state {start!r}")
    pointwise = spec.get("mode", "stream") == "pointwise"
    if spec.get("mode", "stream") not in ("stream", "pointwise"):
        raise MalformedCandidate(f"{name}: unknown mode {spec['mode']!r}")

    def rule(n, ask):
        state, emitted = start, 0
        while state is not None:
            st = states[state]
            if "emit" in st:
                if pointwise or emitted == n:
                    return int(st["emit"])
                emitted += 1
                state = st.get("next")
            else:
                q = st["query"]
                p = n + q["offset"] if isinstance(q, dict) else int(q)
                a = str(ask(p))
                state = st["on"].get(a, st["on"]["*"])
        raise Pending
    return PointwiseFunctional(name, rule, *kinds)


def load_candidate(source: str | Path) -> dict[str, PointwiseFunctional]:
    """Load ``{"xi": spec}`` or ``{"phi": spec, "psi": spec}`` from a JSON file."""
    try:
        data = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedCandidate(f"cannot read candidate {source}: {exc}") from None
    if not isinstance(data, dict) or not data:
        raise MalformedCandidate(f"{source}: expected an object of transducers")
    return {k: transducer(v, f"{Path(source).stem}.{k}") for k, v in data.items()}


# -- game: non-triviality of the pigeonhole problem -----------------------------

def _rt1_final(k: int, answers: dict[int, int], avoid: int, name: str) -> ColoringInstance:
    """Total coloring: committed answers (tape values are color + 1), then never ``avoid``."""
    others = [c for c in range(k) if c != avoid]
    top = max(answers, default=-1) + 1

    def color(t):
        x = t[0]
        return answers[x] - 1 if x in answers else others[x % len(others)]
    schedule = {c: Stream.where(lambda x, c=c: color((x,)) == c, start=top) for c in others}
    spoiler = ColoringSpoiler(infinite_holes=frozenset(others), witness_schedule=schedule,
                              member_bound=lambda m: top + k * (m + 1))
    return ColoringInstance(1, k, color, None, spoiler=spoiler, name=name)


def game_nontrivial_rt1(xi: MonotoneFunctional, budget: int, k: int = 2, seed: int = 0,
                        variant: str = "hole", patience: int = 1, name: str | None = None,
                        threshold: int = 8) -> GameTranscript:
    """Adversary colors points lazily, then starves the class Xi committed to."""
    if k < 2:
        raise ValueError("need at least two colors")
    tr = GameTranscript("nontrivial-rt1", name or xi.name, seed, budget)
    avoid: list[int] = []

    def decide(p: int) -> int:
        if avoid:
            return (avoid[0] + 1 + mix(seed, p) % (k - 1)) % k + 1
        return mix(seed, p) % k + 1
    tape = _LazyTape(decide)
    window = 1 if variant == "hole" else threshold
    out = xi.eval(tape, budget, window=window)
    used = out.steps
    tr.moves.append({"oracle": tape.drain(), "outputs": out.values()})
    if not out.entries:
        tr.budget_used = used
        tr.verdict = Verdict(Status.SURVIVED, None, "no commitment within budget")
        return tr
    first = out.values()[0]
    avoid.append(first if variant == "hole" else tape[first] - 1)
    moves = 0
    x = max(tape.answers, default=-1) + 1
    while moves < patience and used < budget:
        tape.commit(x, decide(x))
        tr.moves.append({"oracle": tape.drain(), "outputs": []})
        x, moves, used = x + 1, moves + 1, used + 1
    tr.budget_used = used
    if moves < patience:
        tr.verdict = Verdict(Status.SURVIVED, first, "committed, but no budget left to respond")
        return tr
    final = _rt1_final(k, tape.answers, avoid[0], f"adversary[{seed}]")
    if variant == "hole":
        v = validate(ProblemId.RT1, final, Solution.hole(first), window=x + 64, threshold=threshold)
        broken = v.status is Status.FAIL
    else:
        # only committed elements count: a set candidate still owes the rest
        colors = {final.color(y) for y in out.values()}
        broken = len(colors) > 1
        v = Verdict.fail(out.values(), f"committed elements carry colors {sorted(colors)}") if broken \
            else Verdict(Status.SURVIVED, out.values(), "committed elements agree so far")
    tr.verdict = Verdict(Status.DEFEATED, first, v.detail) if broken else \
        Verdict(Status.SURVIVED, first, v.detail)
    return tr


# -- game: the pigeonhole problem is not strongly reducible to finite union -----

def _union_state(out: OutputPrefix) -> tuple[int, int, int]:
    """(members, complete stages, 1 + largest element enumerated) of a family-tape prefix."""
    vals = out.values()
    if not vals:
        return 0, 0, 0
    n = vals[0]
    if n < 1:
        raise MalformedCandidate(f"family size {n} is not positive")
    stages = (len(vals) - 1) // n
    top = -1
    for pos in range(1, 1 + stages * n):
        code = vals[pos]
        if code < 0:
            raise MalformedCandidate(f"negative set code at position {pos}")
        t = (pos - 1) // n
        if code and code.bit_length() - 1 > t:
            raise MalformedCandidate(f"stage {t} enumerates {code.bit_length() - 1}, not below {t + 1}")
        if code:
            top = max(top, code.bit_length() - 1)
    return n, stages, top + 1


def game_rt1_vs_finite_union(phi: MonotoneFunctional, psi: MonotoneFunctional, budget: int,
                             k: int = 2, patience: int = DEFAULT_PATIENCE, seed: int = 0,
                             name: str | None = None) -> GameTranscript:
    """Color stage s with anything but the color psi currently claims."""
    if phi.out_kind is not Kind.FAMILY:
        raise MalformedCandidate(f"{phi.name} does not emit a family")
    tr = GameTranscript("rt1-vs-union", name or f"{phi.name}/{psi.name}", seed, budget)
    colors: dict[int, int] = {}         # tape values: color + 1
    claims: list[int | None] = []
    used = 0
    fam = OutputPrefix()
    for s in count():
        if used >= budget:
            break
        # read the family up to stage s; later stages may depend on unplayed points
        oracle = OraclePrefix.from_dict(colors)
        fam = phi.eval(oracle, budget - used, window=1, resume=fam)
        used += fam.steps
        if fam.entries:
            n = fam.values()[0]
            fam = phi.eval(oracle, max(budget - used, 0), window=1 + (s + 1) * max(n, 1), resume=fam)
            used += fam.steps
        _, _, bound = _union_state(fam)
        joint = {left(x): v for x, v in colors.items()}
        joint[right(0)] = bound
        claim_out = psi.eval(OraclePrefix.from_dict(joint), max(budget - used, 0), window=1)
        used += claim_out.steps
        claim = claim_out.values()[0] if claim_out.entries else None
        if used >= budget:
            break
        c = 0 if claim is None else claim
        colors[s] = (c + 1) % k + 1
        used += 1
        claims.append(claim)
        tr.moves.append({"oracle": [[s, colors[s]]], "outputs": fam.values()[-4:] + [claim]})
        recent = claims[-patience:]
        if len(recent) == patience and recent[0] is not None and len(set(recent)) == 1:
            starved = [x for x in range(s - patience + 1, s + 1) if colors[x] - 1 == recent[0]]
            if not starved:
                final = _rt1_final(k, colors, recent[0], f"adversary[{seed}]")
                v = validate(ProblemId.RT1, final, Solution.hole(recent[0]), window=s + 64)
                tr.budget_used = used
                tr.verdict = Verdict(Status.DEFEATED, recent[0],
                                     f"claim {recent[0]} held for {patience} stages; {v.detail}")
                return tr
    tr.budget_used = used
    tr.verdict = Verdict(Status.SURVIVED, claims[-1] if claims else None, "no stable claim within budget")
    return tr


# -- game: finite union is not trivial ------------------------------------------

def _union_family(n: int, entries: dict[int, int], name: str) -> Family:
    sets = []
    for e in range(n):
        table = {x: s for (f, x), s in entries.items() if f == e}
        bound = max(table, default=-1) + 1
        tag = SpoilerTag(finite=True, final_membership=table.__contains__, bound=bound,
                         settling=table.__getitem__, settle_stage=max(table.values(), default=0))
        sets.append(EnumSet.from_table(e, table, f"A{e}", tag))
    top = max((x for _, x in entries), default=-1) + 1
    settle = max(entries.values(), default=0)
    return Family(tuple(sets), FamilySpoiler(union_bound=top, settle_stage=settle), name)


def game_nontrivial_finite_union(xi: MonotoneFunctional, budget: int, seed: int = 0,
                                 patience: int = 1, name: str | None = None) -> GameTranscript:
    """Enumerate nothing until Xi commits a bound b, then enumerate b + 1."""
    n = 1 + seed % 3
    tr = GameTranscript("nontrivial-union", name or xi.name, seed, budget)
    tape = _LazyTape(lambda p: n if p == 0 else 0)
    out = xi.eval(tape, budget, window=1)
    used = out.steps
    tr.moves.append({"oracle": tape.drain(), "outputs": out.values()})
    if not out.entries:
        tr.budget_used = used
        tr.verdict = Verdict(Status.SURVIVED, None, "no bound committed within budget")
        return tr
    b = out.values()[0]
    if used + patience > budget:
        tr.budget_used = used
        tr.verdict = Verdict(Status.SURVIVED, b, "committed, but no budget left to respond")
        return tr
    queried = max(((p - 1) // n for p in tape.answers if p > 0), default=-1)
    stage = max(queried + 1, b + 1)        # delta at this stage lands at stage + 1
    tape.commit(1 + stage * n, 1 << (b + 1))
    tr.moves.append({"oracle": tape.drain(), "outputs": []})
    used += 1
    tr.budget_used = used
    fam = _union_family(n, {(0, b + 1): stage + 1}, f"adversary[{seed}]")
    v = validate(ProblemId.FINITE_UNION, fam, Solution.bound(b), window=stage + 2)
    status = Status.DEFEATED if v.status is Status.FAIL else Status.SURVIVED
    tr.verdict = Verdict(status, b, v.detail)
    return tr


GAMES = ("nontrivial-rt1", "rt1-vs-union", "nontrivial-union")


def play(game: str, candidate: str, budget: int, seed: int = 0, **kw: Any) -> GameTranscript:
    """Run a game against a built-in candidate name or a JSON transducer file."""
    if game == "nontrivial-rt1":
        if candidate in RT1_CANDIDATES:
            xi, variant = RT1_CANDIDATES[candidate]
        else:
            xi, variant = load_candidate(candidate)["xi"], kw.pop("variant", "hole")
        return game_nontrivial_rt1(xi, budget, seed=seed, variant=variant, name=candidate, **kw)
    if game == "rt1-vs-union":
        if candidate in PAIR_CANDIDATES:
            phi, psi = PAIR_CANDIDATES[candidate]
        else:
            loaded = load_candidate(candidate)
            if "phi" not in loaded or "psi" not in loaded:
                raise MalformedCandidate(f"{candidate}: needs both phi and psi")
            phi, psi = loaded["phi"], loaded["psi"]
        return game_rt1_vs_finite_union(phi, psi, budget, seed=seed, name=candidate, **kw)
    if game == "nontrivial-union":
        xi = UNION_CANDIDATES.get(candidate) or load_candidate(candidate)["xi"]
        return game_nontrivial_finite_union(xi, budget, seed=seed, name=candidate, **kw)
    raise KeyError(f"unknown game {game!r}; choose from {', '.join(GAMES)}")


def replay(transcript: GameTranscript, **kw: Any) -> bool:
    """Re-run the game from (candidate, seed, budget) and compare transcripts."""
    again = play(transcript.game, transcript.candidate, transcript.budget, transcript.seed, **kw)
    return again.to_json() == transcript.to_json()
