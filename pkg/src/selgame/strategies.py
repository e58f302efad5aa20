"""TWO's strategies, the counter-play constructor and the Rothberger selector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .covers import RefinementMeet
from .engine import G1_OPEN, LegalityFault, Transcript, Violation
from .groups import BOX, PRODUCT, Element, GroupSpec, IDENTITY, Window, restrict
from .moves import CountableSet, CoverPick, NbdCover, RepSet
from .schedule import CantorSchedule, pair, unpair
from .topology import (
    DEFAULT_PIECE_CAP,
    BasicOpen,
    ContractError,
    CoverError,
    CoverOracle,
    NbdSubgroup,
    coset,
    coset_equal,
    enumerate_cosets,
    height_key,
    in_piece,
    iter_compact_piece,
    lebesgue_compact,
    lebesgue_pgroup,
    open_subset,
    translate_inside,
)

SCAN_CAP = 100_000


class CountableOneTwo:
    """Bookkeeping strategy for TWO in the countable-1 game.

    Members of ONE's sets get ranks in order of discovery, and inning ``n``
    plays the member ranked ``unpair(n)[0]``.  By inning ``n`` TWO ranks
    ``n + 1`` members when it can: mostly the first unranked member of the
    newest set, and on every ``sweep_period``-th rank the next unranked
    member of a Cantor sweep over (set, position) pairs of all sets so far.
    The sweep is what reaches members whose position in later sets keeps
    drifting; the newest-set scan keeps early ranks on the finest sets.
    """

    def __init__(self, schedule=CantorSchedule, sweep_period: int = 4):
        if sweep_period < 1:
            raise ValueError("sweep period must be positive")
        self.schedule = schedule
        self.sweep_period = sweep_period
        self.sets: list[CountableSet] = []
        self._prefix: list[list[Element]] = []
        self._iters: list = []
        self._done: list[bool] = []
        self.ranked: list[Element] = []
        self.rank_of: dict[Element, int] = {}
        self.cursor = 0

    def descriptor(self) -> dict:
        return {"kind": "c1", "sweepPeriod": self.sweep_period}

    def _item(self, k: int, p: int) -> Element | None:
        pre = self._prefix[k]
        while len(pre) <= p and not self._done[k]:
            nxt = next(self._iters[k], None)
            if nxt is None:
                self._done[k] = True
            else:
                pre.append(nxt)
        return pre[p] if p < len(pre) else None

    def _scan(self, n: int) -> Element | None:
        for p in range(SCAN_CAP):
            x = self._item(n, p)
            if x is None:
                return None
            if x not in self.rank_of:
                return x
        return None

    def _sweep(self, n: int) -> Element | None:
        while True:
            k, p = unpair(self.cursor)
            if k > n:
                return None
            self.cursor += 1
            x = self._item(k, p)
            if x is not None and x not in self.rank_of:
                return x

    def _discover(self, n: int) -> list[int]:
        new = []
        while len(self.ranked) < n + 1:
            if len(self.ranked) % self.sweep_period == self.sweep_period - 1:
                sources = (self._sweep, self._scan)
            else:
                sources = (self._scan, self._sweep)
            x = None
            for src in sources:
                x = src(n)
                if x is not None:
                    break
            if x is None:
                break
            self.rank_of[x] = len(self.ranked)
            new.append(len(self.ranked))
            self.ranked.append(x)
        return new

    def respond(self, inning: int, W: CountableSet, window: Window | None = None):
        if not isinstance(W, CountableSet):
            raise LegalityFault(Violation(inning, "move-type", "expected a countable set", "ONE"))
        if len(self.sets) != inning:
            raise ValueError("bookkeeping strategy must see every inning in order")
        self.sets.append(W)
        self._prefix.append([])
        self._iters.append(iter(W))
        self._done.append(False)
        first = self._item(inning, 0)
        if first is None:
            raise LegalityFault(Violation(inning, "nonempty", "ONE offered an empty set", "ONE"))
        new = self._discover(inning)
        r, j = unpair(inning)
        if r < len(self.ranked) and self.ranked[r] in W:
            b, fallback = self.ranked[r], False
        else:
            b, fallback = first, True
        info = {
            "slot": [r, j],
            "rank": self.rank_of.get(b),
            "fallback": fallback,
            "ranked": len(self.ranked),
            "newRanks": new,
        }
        return b, info


class IdentityTwo:
    """Always answers the identity coset ``U_B`` itself."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec

    def descriptor(self) -> dict:
        return {"kind": "identity"}

    def respond(self, inning, move, window):
        if not isinstance(move, NbdCover):
            raise LegalityFault(Violation(inning, "move-type", "expected a neighborhood cover", "ONE"))
        return coset(IDENTITY, move.resolve(window), self.spec), {}


class NbdTwo:
    """TWO's strategy in G1(O_nbd, O).

    ONE's ``U_{B_n}`` is replaced by ``U_{C_n}``, ``C_n = B_0 ∪ ... ∪ B_n``;
    the reps of ``U_{C_n}`` are fed as ONE's move in an internal countable-1
    game, whose answer ``x_n`` yields the legal play ``x_n * U_{B_n}``.
    """

    def __init__(self, spec: GroupSpec, schedule=CantorSchedule, sweep_period: int = 4):
        self.spec = spec
        self.refined: frozenset = frozenset()
        self.c1 = CountableOneTwo(schedule, sweep_period)

    def descriptor(self) -> dict:
        return {"kind": "nbd", "sweepPeriod": self.c1.sweep_period}

    def respond(self, inning: int, move: NbdCover, window: Window):
        if not isinstance(move, NbdCover):
            raise LegalityFault(Violation(inning, "move-type", "expected a neighborhood cover", "ONE"))
        B = move.resolve(window)
        self.refined = self.refined | B
        A = RepSet(self.refined, self.spec)
        x, info = self.c1.respond(inning, A)
        played = coset(x, B, self.spec)
        instr = {
            "B": sorted(B),
            "refined": sorted(self.refined),
            "rep": x.to_json(),
            "refinedCoset": coset(x, self.refined, self.spec).to_json(),
            "repsSeen": info["ranked"],
            "repsTotal": A.size,
            "rank": info["rank"],
            "slot": info["slot"],
            "fallback": info["fallback"],
        }
        return played, instr


class PGroupTwo:
    """TWO in G1(O, O) on a Lindelöf P-group: ``U_{B*}`` then the inner strategy.

    The inner strategy answers ``c_n * N_n`` and TWO plays the cover's
    member at ``c_n``, which contains that whole coset.
    """

    def __init__(self, spec: GroupSpec, inner: NbdTwo | None = None):
        if spec.track != BOX:
            raise ContractError("the P-group strategy needs the box track")
        self.spec = spec
        self.inner = inner or NbdTwo(spec)

    def descriptor(self) -> dict:
        return {"kind": "pgroup", "inner": self.inner.descriptor()}

    def respond(self, inning: int, cover: CoverOracle, window: Window):
        if not isinstance(cover, CoverOracle):
            raise LegalityFault(Violation(inning, "move-type", "expected a cover oracle", "ONE"))
        N = lebesgue_pgroup(cover)
        inner_coset, info = self.inner.respond(inning, NbdCover(sorted(N.B)), window)
        c = Element.from_json(info["rep"])
        chosen = cover.choose(c)
        if not chosen.contains(c, self.spec):
            raise CoverError(c, chosen, cover.label)
        instr = {
            "lebesgueB": sorted(N.B),
            "innerCoset": inner_coset.to_json(),
            "rep": info["rep"],
            "refined": info["refined"],
            "rank": info["rank"],
            "slot": info["slot"],
        }
        return CoverPick(c, chosen), instr


class SigmaTwo:
    """TWO in G1(O, O) on a sigma-compact direct sum.

    ONE's covers are met into a running refinement; a Lebesgue neighborhood
    for that meet over the inning's compact piece is handed to the inner
    strategy as a simulated ONE move, and TWO plays ONE's member at a piece
    point of the inner coset.
    """

    def __init__(self, spec: GroupSpec, inner: NbdTwo | None = None, cap: int | None = DEFAULT_PIECE_CAP):
        if spec.track != PRODUCT:
            raise ContractError("the sigma-compact strategy needs the product track")
        self.spec = spec
        self.inner = inner or NbdTwo(spec)
        self.meet = RefinementMeet()
        self.cap = cap

    def descriptor(self) -> dict:
        return {"kind": "sigma", "inner": self.inner.descriptor()}

    def respond(self, inning: int, cover: CoverOracle, window: Window):
        if not isinstance(cover, CoverOracle):
            raise LegalityFault(Violation(inning, "move-type", "expected a cover oracle", "ONE"))
        spec = self.spec
        self.meet.extend(cover)
        U = lebesgue_compact(self.meet.oracle(), inning, window, spec, self.cap)
        inner_coset, info = self.inner.respond(inning, NbdCover(sorted(U.B)), window)
        xn = Element.from_json(info["rep"])
        canon = restrict(xn, U.B)
        if in_piece(canon, inning, spec):
            x, branch = canon, "witness"
        else:
            x, branch = next(iter_compact_piece(inning, window, spec)), "fallback"
        meet_member = self.meet.choose(x)
        chosen = cover.choose(x)
        if not chosen.contains(x, spec):
            raise CoverError(x, chosen, cover.label)
        instr = {
            "piece": inning,
            "lebesgueB": sorted(U.B),
            "innerCoset": inner_coset.to_json(),
            "witness": x.to_json(),
            "branch": branch,
            "meetMember": meet_member.to_json(),
            "rep": info["rep"],
            "refined": info["refined"],
            "rank": info["rank"],
            "slot": info["slot"],
        }
        return CoverPick(x, chosen), instr


def meets_piece(x: Element, B, n: int, spec: GroupSpec) -> bool:
    """Whether ``x * U_B`` meets the compact piece ``n``."""
    return in_piece(restrict(x, B), n, spec)


# target sets and selectors


@dataclass(frozen=True)
class TargetSet:
    """The set ``X`` TWO must cover: a predicate, cut into pieces ``X ∩ G_m``."""

    contains: Callable[[Element], bool] = lambda x: True
    label: str = "G"

    def piece(self, m: int, window: Window, spec: GroupSpec, cap=DEFAULT_PIECE_CAP) -> list[Element]:
        """``X ∩ G_m`` in height order, so low pieces come first in every ``X_m``."""
        pts = [x for x in iter_compact_piece(m, window, spec, cap) if self.contains(x)]
        return sorted(pts, key=lambda x: height_key(x, spec))


WHOLE_GROUP = TargetSet()


class GreedySelector:
    """Online Rothberger selector for a finite target piece.

    Each call gets the next neighborhood and returns the first target point
    not yet covered by the translates handed out so far, so every target
    point is covered by the time the selector has been called ``len(targets)``
    times.  ``skip`` marks points already covered some other way.
    """

    def __init__(self, targets: Iterable[Element], spec: GroupSpec):
        self.targets = list(targets)
        self.spec = spec
        self.chosen: list[tuple[Element, NbdSubgroup]] = []
        self._covered = [False] * len(self.targets)

    def next(self, N: NbdSubgroup, skip: Callable[[Element], bool] | None = None) -> Element:
        if not self.targets:
            return IDENTITY
        if skip is not None:
            for i, t in enumerate(self.targets):
                if not self._covered[i] and skip(t):
                    self._covered[i] = True
        k = next((i for i, c in enumerate(self._covered) if not c), None)
        if k is None:
            k = len(self.chosen) % len(self.targets)
        x = self.targets[k]
        self.chosen.append((x, N))
        for i, t in enumerate(self.targets):
            if not self._covered[i] and coset_equal(t, x, N.B):
                self._covered[i] = True
        return x


def roth_selector(neighborhoods: Iterable[NbdSubgroup], spec: GroupSpec, window: Window | None = None) -> list[Element]:
    """``f_n`` with ``f_n * U_n`` covering every element supported in ``C = ∪ B_n``.

    ``f_n`` is the ``n``-th element of the canonical enumeration of
    elements supported in ``C``; an element of rank ``r`` lies in
    ``f_r * U_r`` because ``U_r`` contains the identity.
    """
    nbds = list(neighborhoods)
    C = frozenset().union(*(N.B for N in nbds)) if nbds else frozenset()
    if window is not None:
        C = C & frozenset(window)
    gen = enumerate_cosets(C, spec)
    return [next(gen, IDENTITY) for _ in nbds]


def selector_coverage(fs, neighborhoods, x: Element) -> int | None:
    """First index ``n`` with ``x ∈ f_n * U_n``."""
    for n, (f, N) in enumerate(zip(fs, neighborhoods)):
        if coset_equal(x, f, N.B):
            return n
    return None


def shift_into_target(x: Element, N: NbdSubgroup, targets: Iterable[Element]) -> Element | None:
    """A target point ``y`` with ``x*N ∩ X ⊆ y*N*N``, or None if ``x*N`` misses ``X``.

    ``N`` is a subgroup, so ``y*N*N = y*N``; every point of the
    intersection is checked against it.
    """
    hit = [z for z in targets if coset_equal(z, x, N.B)]
    if not hit:
        return None
    y = hit[0]
    assert all(coset_equal(z, y, N.B) for z in hit)
    return y


class CounterPlayTwo:
    """Builds, inning by inning, a play that defeats a given ONE strategy.

    Inning ``k`` belongs to the partition piece ``S_m`` with ``m =
    unpair(k)[0]``.  TWO queries ONE's cover over the compact piece ``G_m``
    for a finite subcover, takes the Lebesgue neighborhood ``N_k``, asks the
    selector of ``X_m`` for a point ``x_k`` and plays the subcover member
    at ``x_k``, which contains ``x_k * N_k``.  Selectors skip points that an
    earlier played member already contains.  Only the one branch actually
    played is computed.
    """

    def __init__(self, spec: GroupSpec, target: TargetSet = WHOLE_GROUP, cap: int | None = DEFAULT_PIECE_CAP):
        if spec.track != PRODUCT:
            raise ContractError("the counter-play construction needs the product track")
        self.spec = spec
        self.target = target
        self.cap = cap
        self.selectors: dict[int, GreedySelector] = {}
        self.played: list[BasicOpen] = []

    def descriptor(self) -> dict:
        return {"kind": "counterplay", "target": self.target.label}

    def respond(self, k: int, cover: CoverOracle, window: Window):
        if not isinstance(cover, CoverOracle):
            raise LegalityFault(Violation(k, "move-type", "expected a cover oracle", "ONE"))
        spec = self.spec
        m = unpair(k)[0]
        subcover: dict[BasicOpen, Element] = {}
        for x in iter_compact_piece(m, window, spec, self.cap):
            O = cover.choose(x)
            if not O.contains(x, spec):
                raise CoverError(x, O, cover.label)
            subcover.setdefault(O, x)
        N = lebesgue_compact(cover, m, window, spec, self.cap)
        if m not in self.selectors:
            self.selectors[m] = GreedySelector(self.target.piece(m, window, spec, self.cap), spec)
        xk = self.selectors[m].next(N, skip=lambda t: any(T.contains(t, spec) for T in self.played))
        T = cover.choose(xk)
        self.played.append(T)
        if T not in subcover or not translate_inside(xk, N, T, spec):
            raise AssertionError("Lebesgue neighborhood failed on its own piece")
        instr = {
            "piece": m,
            "subcover": len(subcover),
            "lebesgueB": sorted(N.B),
            "innerCoset": coset(xk, N.B, spec).to_json(),
            "witness": xk.to_json(),
        }
        return CoverPick(xk, T), instr


def counter_play(one, spec: GroupSpec, window: Window, innings: int = 64, probes=(), target: TargetSet = WHOLE_GROUP, seed=None, cap=DEFAULT_PIECE_CAP) -> Transcript:
    """The play against ONE's strategy ``one`` built by :class:`CounterPlayTwo`."""
    from .engine import GameSpec, play

    game = GameSpec(G1_OPEN, spec, window)
    return play(game, one, CounterPlayTwo(spec, target, cap), innings, seed=seed, probes=probes)


def inner_coverage(t: Transcript, probe: Element) -> list[int]:
    """Innings whose recorded inner coset contains ``probe``."""
    spec = t.spec
    out = []
    for r in t.records:
        inner = r.get("instrumentation", {}).get("innerCoset")
        if inner is not None and BasicOpen.from_json(inner).contains(probe, spec):
            out.append(r["inning"])
    return out


# Claims 1-4 of the neighborhood-game argument, checked on a finished play

def claim_violations(t: Transcript, probe: Element) -> list[Violation]:
    """Check the per-inning claims for ``probe`` against the refined moves.

    The witness ``y_n`` is the probe cut down to ``C_n``; it must be one of
    the reps ``A_n`` ONE was simulated to offer, and the claims are then
    checked as set inclusions between cosets.
    """
    spec = t.spec
    recs = [r for r in t.records if "refined" in r.get("instrumentation", {})]
    out: list[Violation] = []
    if not recs:
        return out
    Cs = [frozenset(r["instrumentation"]["refined"]) for r in recs]
    final = Cs[-1]
    L = coset(probe, final, spec)
    ys: list[Element] = []
    for r, C in zip(recs, Cs):
        n = r["inning"]
        y = restrict(probe, C)
        if y not in RepSet(C, spec) or not coset_equal(y, probe, C):
            out.append(Violation(n, "claim1", f"{y} is not a rep of the probe's coset"))
        if not open_subset(L, coset(y, C, spec), spec):
            out.append(Violation(n, "claim1", f"L not inside {y}*U_C"))
        ys.append(y)
    for k in range(1, len(ys)):
        n = recs[k]["inning"]
        if not Cs[k - 1] <= Cs[k]:
            out.append(Violation(n, "monotone-refinement", "refined sets shrank"))
        if not open_subset(coset(ys[k], Cs[k], spec), coset(ys[k - 1], Cs[k - 1], spec), spec):
            out.append(Violation(n, "claim2", f"{ys[k]}*U_C not inside previous coset"))
        if not ys[k - 1].support() <= ys[k].support():
            out.append(Violation(n, "claim3", "rep supports not increasing"))
    for r, y in zip(recs, ys):
        if not y.support() <= probe.support():
            out.append(Violation(r["inning"], "claim4", f"support of {y} escapes the probe's"))
    # once the support is stable the rep itself is stable
    for k in range(len(ys) - 1, 0, -1):
        if ys[k - 1].support() != ys[-1].support():
            break
        if ys[k - 1] != ys[-1]:
            out.append(Violation(recs[k - 1]["inning"], "stabilization", "stable support but moving rep"))
    return out


def stable_rep(t: Transcript, probe: Element) -> tuple[Element, int]:
    """The probe's final rep and the first inning from which it is constant."""
    recs = [r for r in t.records if "refined" in r.get("instrumentation", {})]
    ys = [restrict(probe, r["instrumentation"]["refined"]) for r in recs]
    s = len(ys) - 1
    while s > 0 and ys[s - 1] == ys[-1]:
        s -= 1
    return ys[-1], recs[s]["inning"]


def schedule_prediction(t: Transcript, probe: Element) -> list[int]:
    """Innings at which the bookkeeping schedule must cover ``probe``.

    These are the innings after the probe's rep stabilised that serve the
    rep's rank, once that rank has been handed out.
    """
    y, s = stable_rep(t, probe)
    rank = None
    for r in t.records:
        ins = r["instrumentation"]
        if Element.from_json(ins.get("rep", [])) == y and ins.get("rank") is not None and r["inning"] >= s:
            rank = ins["rank"]
            break
    if rank is None:
        return []
    return [
        r["inning"]
        for r in t.records
        if r["inning"] >= s and unpair(r["inning"])[0] == rank and r["instrumentation"].get("repsSeen", r["instrumentation"].get("ranked", 0)) > rank
    ]


__all__ = [
    "CountableOneTwo",
    "IdentityTwo",
    "NbdTwo",
    "PGroupTwo",
    "SigmaTwo",
    "CounterPlayTwo",
    "GreedySelector",
    "TargetSet",
    "WHOLE_GROUP",
    "counter_play",
    "roth_selector",
    "selector_coverage",
    "shift_into_target",
    "meets_piece",
    "inner_coverage",
    "claim_violations",
    "stable_rep",
    "schedule_prediction",
    "pair",
]
