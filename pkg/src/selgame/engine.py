"""Referee for G1-style selection games and the countable-1 game.

A play is recorded as JSON-lines: a header, one record per inning with the
fields ``inning``, ``oneMove``, ``twoMove`` and ``instrumentation``, and a
closing summary.  Legality is re-checkable from that text alone: the live
referee and the offline validator run the same :class:`RuleChecker`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Protocol

from .covers import UnknownCoverError, build_cover
from .groups import BOX, PRODUCT, Element, GroupSpec, MalformedElementError, Window
from .moves import CountableSet, CoverPick, NbdCover, build_set, contained_in
from .topology import BasicOpen, CoverError, CoverOracle, coset, coset_rep, in_piece, open_subset

G1_NBD = "g1-nbd"
G1_OPEN = "g1-open"
COUNTABLE_ONE = "countable-one"
GAME_KINDS = (G1_NBD, G1_OPEN, COUNTABLE_ONE)

FORMAT = "selgame-transcript/1"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class GameSpec:
    kind: str
    group: GroupSpec
    window: Window
    inning_cap: int = 10_000

    def __post_init__(self):
        if self.kind not in GAME_KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        if self.inning_cap < 1:
            raise ValueError("inning cap must be at least 1")


class OneStrategy(Protocol):
    def move(self, inning: int, history: list, window: Window) -> Any: ...

    def descriptor(self) -> dict: ...


class TwoStrategy(Protocol):
    def respond(self, inning: int, move: Any, window: Window) -> tuple[Any, dict]: ...

    def descriptor(self) -> dict: ...


@dataclass(frozen=True)
class Violation:
    inning: int | None
    rule: str
    detail: str
    player: str = ""

    def to_json(self) -> dict:
        return {"inning": self.inning, "rule": self.rule, "detail": self.detail, "player": self.player}


class LegalityFault(RuntimeError):
    def __init__(self, violation: Violation, transcript: "Transcript | None" = None):
        who = f"{violation.player} " if violation.player else ""
        super().__init__(f"inning {violation.inning}: {who}broke {violation.rule}: {violation.detail}")
        self.violation = violation
        self.inning = violation.inning
        self.transcript = transcript


class StopPlay(Exception):
    """Raised by a strategy to end the play early without a fault."""


@dataclass
class Transcript:
    header: dict
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.header["game"]

    @property
    def spec(self) -> GroupSpec:
        return GroupSpec.from_dict(self.header["group"])

    @property
    def seed(self):
        return self.header.get("seed")

    def probes(self) -> list[Element]:
        return [Element.from_json(p) for p in self.header.get("probes", [])]

    def to_text(self) -> str:
        lines = [dumps({"header": self.header})]
        lines += [dumps(r) for r in self.records]
        lines.append(dumps({"summary": self.summary}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        header, summary, records = None, {}, []
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "header" in obj:
                header = obj["header"]
            elif "summary" in obj:
                summary = obj["summary"]
            else:
                records.append(obj)
        if header is None:
            raise ValueError("transcript has no header line")
        return cls(header, records, summary)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "Transcript":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def two_members(self) -> list[BasicOpen | Element]:
        out = []
        for r in self.records:
            mv = r["twoMove"]
            if self.kind == G1_NBD:
                out.append(BasicOpen.from_json(mv))
            elif self.kind == G1_OPEN:
                out.append(BasicOpen.from_json(mv["open"]))
            else:
                out.append(Element.from_json(mv["point"]))
        return out


def probe_coverage(t: Transcript, probe: Element) -> list[int]:
    """Innings whose TWO move contains ``probe`` (equals it, in the countable-1 game)."""
    spec = t.spec
    hits = []
    for r, mv in zip(t.records, t.two_members()):
        if isinstance(mv, Element):
            if mv == probe:
                hits.append(r["inning"])
        elif mv.contains(probe, spec):
            hits.append(r["inning"])
    return hits


class RuleChecker:
    """Stateful per-inning legality and instrumentation checks."""

    def __init__(self, header: dict):
        self.kind = header["game"]
        self.spec = GroupSpec.from_dict(header["group"])
        self.window = Window(header.get("window", []))
        self.prev_set: CountableSet | None = None
        self.prev_refined: frozenset = frozenset()
        self.prev_window = self.window
        self.expected = 0
        self.meet: list[CoverOracle] = []

    def check(self, rec: dict, live_one=None) -> list[Violation]:
        n = rec.get("inning")
        out: list[Violation] = []

        def bad(rule, detail, player=""):
            out.append(Violation(n, rule, detail, player))

        if n != self.expected:
            bad("inning-sequence", f"expected inning {self.expected}, got {n}")
        self.expected = (n if isinstance(n, int) else self.expected) + 1
        instr = rec.get("instrumentation", {})
        window = Window(instr.get("window", self.prev_window.indices))
        if not set(self.prev_window) <= set(window):
            bad("window-monotone", "window shrank")
        self.prev_window = window
        try:
            if self.kind == G1_NBD:
                self._check_nbd(rec, window, bad)
            elif self.kind == G1_OPEN:
                self._check_open(rec, window, bad, live_one)
            else:
                self._check_c1(rec, window, bad)
        except (KeyError, TypeError, ValueError) as exc:
            if not out:
                bad("malformed-record", f"{type(exc).__name__}: {exc}")
        return out

    # G1(O_nbd, O)
    def _check_nbd(self, rec, window, bad):
        one = rec["oneMove"]
        B = frozenset(one["B"])
        if one.get("countable") and self.spec.track == PRODUCT:
            bad("product-track-finite-B", "neighborhoods must declare a finite index set", "ONE")
        if not window.covers(B):
            bad("window-support", f"B={sorted(B)} leaves the window", "ONE")
        played = BasicOpen.from_json(rec["twoMove"])
        rep = coset_rep(played, self.spec)
        if rep is None or played.indices != B:
            bad("two-plays-coset", f"{played} is not a coset of U_{sorted(B)}", "TWO")
        self._check_nbd_instr(rec.get("instrumentation", {}), B, played, bad)

    def _check_nbd_instr(self, instr, B, played, bad):
        if "refined" not in instr:
            return
        refined = frozenset(instr["refined"])
        if refined != self.prev_refined | B:
            bad("refinement", f"refined set {sorted(refined)} is not the running union")
        self.prev_refined = refined
        rep = self.spec.element(Element.from_json(instr["rep"]))
        if not rep.support() <= refined:
            bad("rep-support", f"rep {rep} not supported in the refined set")
        if coset(rep, B, self.spec) != played:
            bad("played-coset", "played coset differs from the rep's coset of U_B")
        if "refinedCoset" in instr and BasicOpen.from_json(instr["refinedCoset"]) != coset(rep, refined, self.spec):
            bad("refined-coset", "recorded refined coset is inconsistent")

    # G1(O, O)
    def _check_open(self, rec, window, bad, live_one):
        desc = rec["oneMove"]
        try:
            cover = build_cover(desc, self.spec)
        except UnknownCoverError:
            if live_one is None:
                bad("cover-reproducible", f"cannot rebuild cover {desc.get('label')!r}", "ONE")
                return
            cover = live_one
        if cover.bound is not None and not window.covers(cover.bound):
            bad("window-support", "cover bound leaves the window", "ONE")
        pick = CoverPick.from_json(rec["twoMove"])
        point = self.spec.element(pick.point)
        chosen = cover.choose(point)
        if not chosen.contains(point, self.spec):
            bad("one-plays-cover", f"cover misses {point}", "ONE")
        if chosen != pick.member:
            bad("two-picks-member", f"{pick.member} is not the cover's member at {point}", "TWO")
        instr = rec.get("instrumentation", {})
        if "innerCoset" in instr:
            inner = BasicOpen.from_json(instr["innerCoset"])
            if not open_subset(inner, pick.member, self.spec):
                bad("containment", f"played member does not contain inner coset {inner}")
            if "lebesgueB" in instr and inner.indices != frozenset(instr["lebesgueB"]):
                bad("inner-neighborhood", "inner coset is not a coset of the Lebesgue neighborhood")
        if "piece" in instr and "witness" in instr:
            w = Element.from_json(instr["witness"])
            if not in_piece(w, instr["piece"], self.spec):
                bad("witness-piece", f"witness {w} outside piece {instr['piece']}")
            if w != point:
                bad("witness-point", "played point is not the recorded witness")

    # countable-1 game
    def _check_c1(self, rec, window, bad):
        W = build_set(rec["oneMove"], self.spec)
        if W.first() is None:
            bad("nonempty", "ONE offered an empty set", "ONE")
        if self.prev_set is not None and not contained_in(self.prev_set, W):
            bad("monotone", "W_n does not contain W_{n-1}", "ONE")
        self.prev_set = W
        b = Element.from_json(rec["twoMove"]["point"])
        if b not in W:
            bad("two-picks-member", f"{b} is not in W_n", "TWO")


def validate_transcript(t: Transcript) -> list[Violation]:
    """Every legality and instrumentation violation in ``t``; empty means valid."""
    try:
        checker = RuleChecker(t.header)
    except (KeyError, ValueError) as exc:
        return [Violation(None, "header", str(exc))]
    out = []
    for rec in t.records:
        out.extend(checker.check(rec))
    return out


def report(violations: Iterable[Violation]) -> list[dict]:
    return [v.to_json() for v in violations]


def _one_json(kind, move, window, spec, inning):
    if kind == G1_NBD:
        if not isinstance(move, NbdCover):
            raise LegalityFault(Violation(inning, "move-type", f"expected a neighborhood cover, got {type(move).__name__}", "ONE"))
        if move.B == "window" and spec.track != BOX:
            raise LegalityFault(Violation(inning, "product-track-finite-B", "whole-window B needs the box track", "ONE"))
        return move.to_json(window)
    if kind == G1_OPEN:
        if not isinstance(move, CoverOracle):
            raise LegalityFault(Violation(inning, "move-type", f"expected a cover oracle, got {type(move).__name__}", "ONE"))
        return move.descriptor()
    if not isinstance(move, CountableSet):
        raise LegalityFault(Violation(inning, "move-type", f"expected a countable set, got {type(move).__name__}", "ONE"))
    return move.to_json()


def _two_json(kind, move, inning):
    if kind == G1_NBD and isinstance(move, BasicOpen):
        return move.to_json()
    if kind == G1_OPEN and isinstance(move, CoverPick):
        return move.to_json()
    if kind == COUNTABLE_ONE and isinstance(move, Element):
        return {"point": move.to_json()}
    raise LegalityFault(Violation(inning, "move-type", f"unexpected TWO move {type(move).__name__}", "TWO"))


def play(
    game: GameSpec,
    one,
    two,
    innings: int,
    seed=None,
    probes: Iterable[Element] = (),
) -> Transcript:
    """Referee ``innings`` innings and return the transcript.

    Raises :class:`LegalityFault` (carrying the partial transcript) on the
    first illegal move.  A completed play is "truncated", never "won"; ONE
    may end it early by raising :class:`StopPlay` ("stopped").
    """
    if innings < 1 or innings > game.inning_cap:
        raise ValueError(f"innings must lie in 1..{game.inning_cap}")
    spec, window = game.group, game.window
    probes = [spec.element(p) for p in probes]
    for p in probes:
        if not window.covers(p.support()):
            raise ValueError(f"probe {p} leaves the window")
    header = {
        "format": FORMAT,
        "game": game.kind,
        "group": spec.to_dict(),
        "window": window.to_json(),
        "seed": seed,
        "one": one.descriptor(),
        "two": two.descriptor(),
        "innings": innings,
        "probes": [p.to_json() for p in probes],
    }
    t = Transcript(header)
    checker = RuleChecker(header)
    history: list = []
    for n in range(innings):
        try:
            try:
                move = one.move(n, list(history), window)
            except StopPlay:
                return _close(t, "stopped")
            one_json = _one_json(game.kind, move, window, spec, n)
            two_move, instr = two.respond(n, move, window)
            two_json = _two_json(game.kind, two_move, n)
        except LegalityFault as fault:
            fault.transcript = _close(t, "fault")
            raise
        except CoverError as exc:
            fault = LegalityFault(Violation(n, "one-plays-cover", str(exc), "ONE"), _close(t, "fault"))
            raise fault from exc
        except MalformedElementError as exc:
            fault = LegalityFault(Violation(n, "malformed-move", str(exc)), _close(t, "fault"))
            raise fault from exc
        rec = {
            "inning": n,
            "oneMove": one_json,
            "twoMove": two_json,
            "instrumentation": {**instr, "window": window.to_json()},
        }
        # round-trip through text so live and offline checks see the same bytes
        rec = json.loads(dumps(rec))
        live = move if game.kind == G1_OPEN else None
        problems = checker.check(rec, live_one=live)
        if problems:
            t.records.append(rec)
            raise LegalityFault(problems[0], _close(t, "fault"))
        t.records.append(rec)
        history.append((move, two_move))
    return _close(t, "truncated")


def _close(t: Transcript, status: str) -> Transcript:
    cov = [{"probe": p.to_json(), "innings": probe_coverage(t, p)} for p in t.probes()]
    t.summary = {"status": status, "innings": len(t.records), "coverage": cov}
    return t
