"""Named invariant suites behind ``simctl verify``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .adversaries import make_one
from .config import default_probes
from .covers import random_cover
from .engine import COUNTABLE_ONE, G1_NBD, G1_OPEN, GameSpec, LegalityFault, play, probe_coverage, validate_transcript
from .groups import BOX, PRODUCT, ComponentGroup, Element, GroupSpec, IDENTITY, Window, op, inv, symmetric_group_3, window_elements
from .schedule import CantorSchedule, pair, unpair
from .strategies import (
    CountableOneTwo,
    CounterPlayTwo,
    NbdTwo,
    TargetSet,
    claim_violations,
    counter_play,
    roth_selector,
    schedule_prediction,
    selector_coverage,
)
from .topology import (
    NbdSubgroup,
    compact_piece,
    coset,
    coset_equal,
    enumerate_cosets,
    lebesgue_compact,
    lebesgue_pgroup,
    open_subset,
)


@dataclass
class VerifyReport:
    suite: str
    cases: int = 0
    violations: list = field(default_factory=list)
    wall: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, invariant: str, detail: str, inning=None) -> None:
        self.violations.append({"invariant": invariant, "inning": inning, "detail": detail})

    def to_json(self) -> dict:
        return {"suite": self.suite, "cases": self.cases, "violations": self.violations, "wallSeconds": round(self.wall, 3)}


def component_kinds() -> dict:
    return {
        "integers": ComponentGroup.integers(),
        "cyclic2": ComponentGroup.cyclic(2),
        "cyclic6": ComponentGroup.cyclic(6),
        "s3": symmetric_group_3(),
    }


def random_element(rng: random.Random, spec: GroupSpec, W: Window, max_rank: int = 4, max_support: int = 3) -> Element:
    idx = rng.sample(list(W), rng.randint(0, min(max_support, len(W))))
    out = []
    for i in idx:
        g = spec.component(i)
        top = max_rank if g.order is None else g.order - 1
        out.append((i, g.unrank(rng.randint(0, top))))
    return spec.element(out)


def _scaled(base: int, scale: float) -> int:
    return max(1, int(base * scale))


# group-axioms


def suite_group_axioms(seed: int, scale: float, rep: VerifyReport) -> None:
    rng = random.Random(f"group-axioms|{seed}")
    W = Window.first(6)
    for name, g in component_kinds().items():
        for msg in g.axiom_violations(limit=3):
            rep.add("component-axioms", f"{name}: {msg}")
        spec = GroupSpec.uniform(g)
        e = IDENTITY
        for _ in range(_scaled(10_000, scale)):
            rep.cases += 1
            a, b, c = (random_element(rng, spec, W) for _ in range(3))
            B = frozenset(rng.sample(list(W), rng.randint(0, len(W))))
            B2 = B | frozenset(rng.sample(list(W), rng.randint(0, 2)))
            if op(op(a, b, spec), c, spec) != op(a, op(b, c, spec), spec):
                rep.add("associativity", f"{name}: {a}, {b}, {c}")
            if op(a, e, spec) != a or op(e, a, spec) != a:
                rep.add("identity", f"{name}: {a}")
            if op(a, inv(a, spec), spec) != e:
                rep.add("inverse", f"{name}: {a}")
            U = coset(e, B, spec)
            ua, ub = a if U.contains(a, spec) else None, b if U.contains(b, spec) else None
            if ua is not None and ub is not None and not U.contains(op(ua, inv(ub, spec), spec), spec):
                rep.add("subgroup", f"{name}: U_{sorted(B)} not closed at {a}, {b}")
            if U.contains(a, spec) != U.contains(inv(a, spec), spec):
                rep.add("symmetry", f"{name}: {a}")
            # U_B * U_B = U_B: any element of U_B is a product of two, and products stay inside
            if ua is not None and not U.contains(op(ua, op(ua, ua, spec), spec), spec):
                rep.add("idempotence", f"{name}: {a}")
            same = coset_equal(a, b, B)
            if same != (coset(a, B, spec) == coset(b, B, spec)):
                rep.add("coset-partition", f"{name}: {a}, {b} over {sorted(B)}")
            if same != coset(a, B, spec).contains(b, spec):
                rep.add("coset-partition", f"{name}: membership vs equality for {a}, {b}")
            if same != coset(e, B, spec).contains(op(inv(a, spec), b, spec), spec):
                rep.add("coset-partition", f"{name}: a^-1 b test for {a}, {b}")
            if not open_subset(coset(e, B2, spec), coset(e, B, spec), spec):
                rep.add("antitone", f"{name}: U_{sorted(B2)} not inside U_{sorted(B)}")
            if coset(a, B2, spec).contains(b, spec) and not coset(a, B, spec).contains(b, spec):
                rep.add("antitone", f"{name}: pointwise for {a}, {b}")


# lebesgue


def _member_holds(x: Element, N: NbdSubgroup, O, W: Window, spec: GroupSpec, max_rank: int) -> bool:
    """Brute force: every window element of ``x*N`` with small values lies in ``O``.

    Members allow at most ``2*spread + 1`` values per index, so five distinct
    values per free coordinate always include one a member rejects.
    """
    fixed = {i: v for i, v in x.items if i in N.B}
    free = [i for i in W if i not in N.B]
    sub = Window(free)
    for z in window_elements(sub, spec, max_rank):
        y = spec.element(list(fixed.items()) + list(z.items))
        if not O.contains(y, spec):
            return False
    return True


def random_oracle(rng: random.Random, W: Window, spec: GroupSpec, declared=None):
    pool = rng.sample(list(W), rng.randint(0, len(W)))
    declared = rng.random() < 0.5 if declared is None else declared
    return random_cover(rng.randrange(1 << 30), pool, spec, p=rng.choice([0.3, 0.6, 0.9]), spread=rng.randint(0, 1), declared=declared)


def suite_lebesgue(seed: int, scale: float, rep: VerifyReport) -> None:
    rng = random.Random(f"lebesgue|{seed}")
    kinds = [ComponentGroup.integers(), ComponentGroup.cyclic(2), ComponentGroup.cyclic(6), symmetric_group_3()]
    for _ in range(_scaled(1000, scale)):
        g = rng.choice(kinds)
        spec = GroupSpec.uniform(g)
        W = Window.first(rng.randint(1, 4))
        n = rng.randint(0, 2)
        cover = random_oracle(rng, W, spec)
        N = lebesgue_compact(cover, n, W, spec)
        members = {cover.choose(y) for y in compact_piece(n, W, spec)}
        for x in compact_piece(n, W, spec):
            rep.cases += 1
            if not any(_member_holds(x, N, O, W, spec, 4) for O in [cover.choose(x), *members]):
                rep.add("lebesgue-compact", f"no member contains {x}*U_{sorted(N.B)}")
    spec_box = [GroupSpec.uniform(g, track=BOX) for g in kinds]
    for _ in range(_scaled(1000, scale)):
        spec = rng.choice(spec_box)
        W = Window.first(rng.randint(1, 4))
        cover = random_oracle(rng, W, spec, declared=True)
        N = lebesgue_pgroup(cover)
        for _ in range(_scaled(200, scale)):
            rep.cases += 1
            x = random_element(rng, spec, W, max_rank=6)
            if not open_subset(coset(x, N.B, spec), cover.choose(x), spec):
                rep.add("lebesgue-pgroup", f"{x}*U_{sorted(N.B)} escapes its member")


# claims


def nbd_scenarios():
    return [
        GroupSpec.uniform(ComponentGroup.integers(), track=PRODUCT),
        GroupSpec.uniform(ComponentGroup.cyclic(2), track=BOX),
    ]


def suite_claims(seed: int, scale: float, rep: VerifyReport, plays: int = 50, innings: int = 64) -> None:
    W = Window.first(8)
    kinds = ["randomNbd", "shrinkingNbd", "probeHunter"]
    for k in range(_scaled(plays, scale)):
        spec = nbd_scenarios()[k % 2]
        kind = kinds[k % 3]
        s = seed * 1000 + k
        one = make_one({"kind": kind, "seed": s}, G1_NBD, spec, W)
        probes = default_probes(W, spec)
        try:
            t = play(GameSpec(G1_NBD, spec, W), one, NbdTwo(spec), innings, seed=s, probes=probes)
        except LegalityFault as fault:
            rep.add("legality", str(fault), fault.inning)
            continue
        for p in probes:
            rep.cases += 1
            for v in claim_violations(t, p):
                rep.add(v.rule, f"{kind} seed {s} probe {p}: {v.detail}", v.inning)
            cov = probe_coverage(t, p)
            missing = sorted(set(schedule_prediction(t, p)) - set(cov))
            if missing:
                rep.add("schedule", f"{kind} seed {s} probe {p}: scheduled innings {missing} missed", missing[0])
            if len(cov) < 2:
                rep.add("coverage", f"{kind} seed {s} probe {p}: covered at {cov}")


# schedule


def fairness_violations(sets, r_max: int = 8, m_max: int = 4) -> tuple[int, list[str]]:
    """Play the bookkeeping strategy on ``sets`` and check the schedule bound."""
    two = CountableOneTwo()
    picks = []
    seen_at: dict = {}
    for n, W in enumerate(sets):
        b, info = two.respond(n, W)
        picks.append(b)
        for r in info["newRanks"]:
            seen_at[r] = n
    cases, out = 0, []
    for r in range(r_max + 1):
        if r not in seen_at or seen_at[r] > CantorSchedule.bound(r, 1):
            continue
        x = two.ranked[r]
        for m in range(1, m_max + 1):
            b = CantorSchedule.bound(r, m)
            if b >= len(picks):
                continue
            cases += 1
            got = sum(1 for y in picks[: b + 1] if y == x)
            if got < m:
                out.append(f"rank {r} selected {got} < {m} times by inning {b}")
    return cases, out


def monotone_sequences(seed: int, spec: GroupSpec, W: Window, innings: int):
    """Seeded monotone W-sequences of three shapes."""
    for kind in ("randomSets", "growingReps", "prefixReps"):
        desc = {"kind": kind, "seed": seed} if kind != "prefixReps" else {"kind": kind, "B": list(W), "growth": 1 + seed % 3}
        one = make_one(desc, COUNTABLE_ONE, spec, W)
        yield kind, [one.move(n, [], W) for n in range(innings)]


def suite_schedule(seed: int, scale: float, rep: VerifyReport, runs: int = 50) -> None:
    for n in range(2000):
        rep.cases += 1
        if pair(*unpair(n)) != n:
            rep.add("pairing", f"pair(unpair({n})) != {n}")
    for r in range(10):
        for m in range(1, 6):
            if CantorSchedule.bound(r, m) >= CantorSchedule.bound(r, m + 1) or CantorSchedule.bound(r, m) >= CantorSchedule.bound(r + 1, m):
                rep.add("bound-monotone", f"bound not increasing at r={r}, m={m}")
    W = Window.first(6)
    specs = [GroupSpec.uniform(ComponentGroup.integers()), GroupSpec.uniform(ComponentGroup.cyclic(2))]
    innings = CantorSchedule.bound(8, 4) + 1
    for k in range(_scaled(runs, scale)):
        for kind, sets in monotone_sequences(seed * 1000 + k, specs[k % 2], W, innings):
            cases, bad = fairness_violations(sets)
            rep.cases += cases
            for msg in bad:
                rep.add("fairness", f"{kind} run {k}: {msg}")


# counterplay


def counterplay_scenarios():
    z = GroupSpec.uniform(ComponentGroup.integers())
    c2 = GroupSpec.uniform(ComponentGroup.cyclic(2))
    return [(z, Window.first(2)), (c2, Window.first(4))]


COUNTER_FAMILIES = ({"kind": "constantCover"}, {"kind": "greedyCover"}, {"kind": "probeHunter", "width": 1})


def suite_counterplay(seed: int, scale: float, rep: VerifyReport, innings: int = 64) -> None:
    for k in range(_scaled(3, scale)):
        for spec, W in counterplay_scenarios():
            probes = compact_piece(2, W, spec)
            for fam in COUNTER_FAMILIES:
                desc = dict(fam)
                if fam["kind"] == "probeHunter":
                    desc["seed"] = seed * 100 + k
                one = make_one(desc, G1_OPEN, spec, W)
                try:
                    t = counter_play(one, spec, W, innings, probes)
                except LegalityFault as fault:
                    rep.add("legality", str(fault), fault.inning)
                    continue
                for v in validate_transcript(t):
                    rep.add(v.rule, v.detail, v.inning)
                for c in t.summary["coverage"]:
                    rep.cases += 1
                    if not c["innings"]:
                        rep.add("counterplay-coverage", f"{fam['kind']}: probe {c['probe']} never covered")


# selector


def suite_selector(seed: int, scale: float, rep: VerifyReport, max_rank: int = 100) -> None:
    rng = random.Random(f"selector|{seed}")
    c2 = GroupSpec.uniform(ComponentGroup.cyclic(2))
    z = GroupSpec.uniform(ComponentGroup.integers())
    for trial in range(_scaled(20, scale)):
        for spec, exhaustive in ((c2, True), (z, False)):
            W = Window.first(8)
            length = max_rank + 1
            nbds = [NbdSubgroup(frozenset(rng.sample(list(W), rng.randint(0, 3)))) for _ in range(length)]
            C = frozenset().union(*(N.B for N in nbds))
            fs = roth_selector(nbds, spec, W)
            ranked = list(zip(range(length), enumerate_cosets(C, spec)))
            sample = ranked if exhaustive else rng.sample(ranked, min(30, len(ranked)))
            for r, x in sample:
                rep.cases += 1
                hit = selector_coverage(fs, nbds, x)
                if hit is None or hit > r:
                    rep.add("selector-coverage", f"{x} of rank {r} first covered at {hit}")


# window-invariance


def strip_window(records) -> list:
    out = []
    for r in records:
        r = dict(r)
        r["instrumentation"] = {k: v for k, v in r["instrumentation"].items() if k != "window"}
        out.append(r)
    return out


def invariance_cases():
    z = GroupSpec.uniform(ComponentGroup.integers())
    c2 = GroupSpec.uniform(ComponentGroup.cyclic(2))
    c2box = GroupSpec.uniform(ComponentGroup.cyclic(2), track=BOX)
    return [
        (G1_NBD, z, {"kind": "randomNbd"}, {"kind": "nbd"}),
        (G1_NBD, c2box, {"kind": "probeHunter"}, {"kind": "nbd"}),
        (G1_OPEN, z, {"kind": "randomCover"}, {"kind": "sigma"}),
        (G1_OPEN, c2box, {"kind": "randomCover"}, {"kind": "pgroup"}),
        (G1_OPEN, c2, {"kind": "greedyCover"}, {"kind": "counterplay"}),
        (COUNTABLE_ONE, z, {"kind": "randomSets"}, {"kind": "c1"}),
    ]


def make_pinned_two(two_desc, game, spec, W: Window):
    """TWO strategy whose window-dependent choices are pinned to ``W``."""
    from .config import make_two

    if two_desc["kind"] == "counterplay":
        base = frozenset(W)
        return CounterPlayTwo(spec, TargetSet(lambda x: x.support() <= base, "pinned"))
    return make_two(two_desc, game, spec)


def run_pair(game, spec, one_desc, two_desc, seed, W: Window, extra: int, innings: int):
    """The same play on ``W`` and on ``W`` plus ``extra`` fresh indices."""
    out = []
    for win in (W, W.extend(extra)):
        desc = {**one_desc, "seed": seed, "indices": list(W)}
        one = make_one(desc, game, spec, win)
        two = make_pinned_two(two_desc, game, spec, W)
        probes = default_probes(W, spec) if game != COUNTABLE_ONE else ()
        out.append(play(GameSpec(game, spec, win), one, two, innings, seed=seed, probes=probes))
    return out


def suite_window_invariance(seed: int, scale: float, rep: VerifyReport, runs: int = 50) -> None:
    cases = invariance_cases()
    for k in range(_scaled(runs, scale)):
        game, spec, one_desc, two_desc = cases[k % len(cases)]
        W = Window.first(4)
        innings = 24
        a, b = run_pair(game, spec, one_desc, two_desc, seed * 1000 + k, W, 4, innings)
        rep.cases += 1
        if strip_window(a.records) != strip_window(b.records):
            rep.add("window-invariance", f"run {k} ({one_desc['kind']} vs {two_desc['kind']}) differs")


SUITES = {
    "group-axioms": suite_group_axioms,
    "lebesgue": suite_lebesgue,
    "claims": suite_claims,
    "schedule": suite_schedule,
    "counterplay": suite_counterplay,
    "selector": suite_selector,
    "window-invariance": suite_window_invariance,
}


def run_suite(name: str, seed: int = 0, scale: float = 1.0) -> VerifyReport:
    if name not in SUITES:
        raise KeyError(name)
    rep = VerifyReport(name)
    t0 = time.perf_counter()
    SUITES[name](seed, scale, rep)
    rep.wall = time.perf_counter() - t0
    return rep
