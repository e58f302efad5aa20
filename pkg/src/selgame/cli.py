"""``simctl``: simulate, verify, duel and inspect.

Exit codes: 0 success, 1 invariant or legality violation, 2 configuration
error.  Summaries go to stdout as JSON, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .adversaries import ConfigError
from .config import RunConfig
from .covers import coset_cover, whole_cover
from .engine import (
    COUNTABLE_ONE,
    G1_NBD,
    G1_OPEN,
    LegalityFault,
    StopPlay,
    Transcript,
    play,
    probe_coverage,
    report,
    validate_transcript,
)
from .groups import BOX, Element, MalformedElementError
from .moves import WINDOW_B, FiniteSet, NbdCover, RepSet, contained_in
from .topology import ContractError, ResourceError

OK, VIOLATION, CONFIG = 0, 1, 2


def _err(msg: str) -> None:
    print(f"simctl: {msg}", file=sys.stderr)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def parse_seeds(text: str) -> list[int]:
    """``"1,4,7"`` or ``"0-9"`` or a mix of both."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(-?\d+)-(-?\d+)", part)
        if m:
            out.extend(range(int(m.group(1)), int(m.group(2)) + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("no seeds given")
    return out


def out_path(template: str | None, seed, batch: bool) -> str:
    if template is None:
        return f"transcript-{seed}.jsonl"
    if "{seed}" in template:
        return template.format(seed=seed)
    if not batch:
        return template
    p = Path(template)
    return str(p.with_name(f"{p.stem}.seed{seed}{p.suffix or '.jsonl'}"))


def run_config(cfg: RunConfig) -> tuple[int, dict]:
    """Play one configured run, save its transcript and summarize it."""
    try:
        one, two = cfg.make_one(), cfg.make_two()
    except ConfigError as exc:
        return CONFIG, {"seed": cfg.seed, "error": str(exc)}
    code = OK
    try:
        t = play(cfg.game_spec(), one, two, cfg.innings, seed=cfg.seed, probes=cfg.probes)
    except LegalityFault as fault:
        t, code = fault.transcript, VIOLATION
        _err(str(fault))
    except (ContractError, ResourceError) as exc:
        return CONFIG, {"seed": cfg.seed, "error": str(exc)}
    if cfg.out:
        t.save(cfg.out)
    summary = {
        "seed": cfg.seed,
        "out": cfg.out,
        "status": t.summary["status"],
        "innings": t.summary["innings"],
        "coverage": t.summary["coverage"],
    }
    return code, summary


def _run_dict(d: dict) -> tuple[int, dict]:
    return run_config(RunConfig.from_dict(d))


def cmd_simulate(args) -> int:
    try:
        cfg = RunConfig.load(args.config)
        seeds = parse_seeds(args.seeds) if args.seeds else [args.seed if args.seed is not None else cfg.seed]
        batch = len(seeds) > 1
        runs = [
            cfg.with_overrides(seed=s, innings=args.innings, out=out_path(args.out or cfg.out, s, batch))
            for s in seeds
        ]
    except (ConfigError, ValueError) as exc:
        _err(f"config error: {exc}")
        return CONFIG
    if args.jobs > 1 and batch:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_dict, [r.to_dict() for r in runs]))
    else:
        results = [run_config(r) for r in runs]
    codes = [c for c, _ in results]
    for c, s in results:
        if c == CONFIG:
            _err(f"config error: {s.get('error')}")
    _emit([s for _, s in results] if batch else results[0][1])
    return max(codes)


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    if args.suite not in SUITES:
        _err(f"unknown suite {args.suite!r}; known: {', '.join(SUITES)}")
        return CONFIG
    rep = run_suite(args.suite, seed=args.seed, scale=args.scale)
    _emit(rep.to_json())
    return OK if rep.ok else VIOLATION


def inspect_report(t: Transcript) -> dict:
    violations = report(validate_transcript(t))
    coverage = [{"probe": p.to_json(), "innings": probe_coverage(t, p)} for p in t.probes()]
    return {
        "game": t.kind,
        "seed": t.seed,
        "one": t.header.get("one"),
        "two": t.header.get("two"),
        "innings": len(t.records),
        "status": t.summary.get("status"),
        "coverage": coverage,
        "violations": violations,
    }


def cmd_inspect(args) -> int:
    try:
        t = Transcript.load(args.transcript)
    except (OSError, ValueError) as exc:
        _err(f"cannot read transcript: {exc}")
        return CONFIG
    rep = inspect_report(t)
    _emit(rep)
    return VIOLATION if rep["violations"] else OK


# duel: a human plays ONE


class BadMove(ValueError):
    pass


def _parse_indices(text: str, window) -> tuple:
    text = text.strip().strip("{}[]()")
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        idx = tuple(sorted({int(p) for p in parts}))
    except ValueError:
        raise BadMove(f"could not read indices from {text!r}") from None
    outside = [i for i in idx if i not in window]
    if outside:
        raise BadMove(f"indices {outside} are outside the window {list(window)}")
    return idx


class HumanOne:
    """ONE driven by lines of text; malformed moves are re-asked, "q" quits."""

    HELP = {
        G1_NBD: "indices of B, e.g. '0 1' (empty line for U_0 = G; 'window' on the box track)",
        G1_OPEN: "indices pinned by a coset cover, e.g. '0 2', or 'whole'",
        COUNTABLE_ONE: "'reps 0 1' for all reps of U_{0,1}, or a JSON list of elements like [[[0,1]],[]]",
    }

    def __init__(self, game: str, spec, stdin, stdout):
        self.game, self.spec = game, spec
        self.stdin, self.stdout = stdin, stdout
        self.prev = None

    def descriptor(self) -> dict:
        return {"kind": "human"}

    def _say(self, msg: str) -> None:
        print(msg, file=self.stdout, flush=True)

    def _parse(self, line: str, window):
        line = line.strip()
        if self.game == G1_NBD:
            if line == WINDOW_B:
                if self.spec.track != BOX:
                    raise BadMove("'window' is only a legal B on the box track")
                return NbdCover(WINDOW_B)
            return NbdCover(_parse_indices(line, window))
        if self.game == G1_OPEN:
            if line == "whole":
                return whole_cover()
            return coset_cover(_parse_indices(line, window), self.spec)
        if line.startswith("reps"):
            W = RepSet(_parse_indices(line[4:], window), self.spec)
        else:
            try:
                items = [self.spec.element(Element.from_json(x)) for x in json.loads(line)]
            except (ValueError, TypeError, MalformedElementError) as exc:
                raise BadMove(f"could not read a list of elements: {exc}") from None
            for x in items:
                if not window.covers(x.support()):
                    raise BadMove(f"{x} leaves the window {list(window)}")
            W = FiniteSet(items)
        if W.first() is None:
            raise BadMove("the set must be nonempty")
        if self.prev is not None and not contained_in(self.prev, W):
            raise BadMove("the new set must contain the previous one")
        return W

    def move(self, n, history, window):
        if history:
            self._say(f"TWO answered: {_describe(history[-1][1])}")
        while True:
            self.stdout.write(f"inning {n}, ONE [{self.HELP[self.game]}; q quits]> ")
            self.stdout.flush()
            line = self.stdin.readline()
            if not line or line.strip().lower() in ("q", "quit"):
                raise StopPlay()
            try:
                mv = self._parse(line, window)
            except BadMove as exc:
                self._say(f"not a legal move: {exc}")
                continue
            if self.game == COUNTABLE_ONE:
                self.prev = mv
            return mv


def _describe(move) -> str:
    if hasattr(move, "to_json"):
        return json.dumps(move.to_json(), sort_keys=True)
    return str(move)


def duel(cfg: RunConfig, stdin=None, stdout=None) -> Transcript:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    one = HumanOne(cfg.game, cfg.group, stdin, stdout)
    t = play(cfg.game_spec(), one, cfg.make_two(), cfg.innings, seed=cfg.seed, probes=cfg.probes)
    if t.records and t.summary["status"] == "truncated":
        print(f"TWO answered: {json.dumps(t.records[-1]['twoMove'], sort_keys=True)}", file=stdout)
    return t


def cmd_duel(args, stdin=None, stdout=None) -> int:
    try:
        cfg = RunConfig.load(args.config).with_overrides(seed=args.seed, innings=args.innings, out=args.out)
        t = duel(cfg, stdin, stdout)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return CONFIG
    except LegalityFault as fault:
        _err(str(fault))
        if cfg.out and fault.transcript is not None:
            fault.transcript.save(cfg.out)
        return VIOLATION
    if cfg.out:
        t.save(cfg.out)
    rep = inspect_report(t)
    _emit(rep)
    return VIOLATION if rep["violations"] else OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="simctl", description="Selection-game simulator on direct sums of groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured play (or a batch of seeds)")
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--seeds", help="batch seeds, e.g. '0-9' or '1,5,9'")
    sim.add_argument("--innings", type=int)
    sim.add_argument("--out", help="transcript path; '{seed}' is replaced per run")
    sim.add_argument("--jobs", type=int, default=1, help="parallel processes for a batch")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run a named invariant suite")
    ver.add_argument("suite")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--scale", type=float, default=1.0)
    ver.set_defaults(func=cmd_verify)

    du = sub.add_parser("duel", help="play ONE by hand against a TWO strategy")
    du.add_argument("--config", required=True)
    du.add_argument("--seed", type=int)
    du.add_argument("--innings", type=int)
    du.add_argument("--out")
    du.set_defaults(func=cmd_duel)

    ins = sub.add_parser("inspect", help="re-validate a transcript and summarize it")
    ins.add_argument("transcript")
    ins.set_defaults(func=cmd_inspect)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
