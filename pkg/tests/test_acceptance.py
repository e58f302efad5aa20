"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
Oracles here are written independently of the library where that is
practical: brute-force numpy grids for containment, direct enumeration for
compact pieces and coset ranks, and plain counting for the schedule.
"""

import itertools
import random
import time

import numpy as np
import pytest

from conftest import box_contained, record_acceptance
from selgame.adversaries import make_one
from selgame.config import default_probes
from selgame.engine import G1_NBD, G1_OPEN, GameSpec, dumps, play, probe_coverage, validate_transcript
from selgame.groups import BOX, PRODUCT, ComponentGroup, Element, GroupSpec, Window, symmetric_group_3
from selgame.schedule import CantorSchedule
from selgame.strategies import (
    CountableOneTwo,
    NbdTwo,
    PGroupTwo,
    SigmaTwo,
    claim_violations,
    counter_play,
    roth_selector,
    schedule_prediction,
)
from selgame.topology import BasicOpen, NbdSubgroup, compact_piece, enumerate_cosets, lebesgue_compact, lebesgue_pgroup
from selgame.verify import (
    COUNTER_FAMILIES,
    VerifyReport,
    counterplay_scenarios,
    invariance_cases,
    monotone_sequences,
    random_element,
    random_oracle,
    run_pair,
    strip_window,
    suite_group_axioms,
)

pytestmark = pytest.mark.acceptance

KINDS = [ComponentGroup.integers(), ComponentGroup.cyclic(2), ComponentGroup.cyclic(6), symmetric_group_3()]


def _finish(number, failures, detail):
    ok = not failures
    record_acceptance(number, ok, detail if ok else f"{detail}; first failure: {failures[0]}")
    assert ok, failures[:5]


def brute_piece(n, W, spec):
    """All window elements with at most ``n`` coordinates and values in ``C(n)``, by grid filtering."""
    idx = list(W)
    if not idx:
        return {Element(())}
    tops = []
    for i in idx:
        g = spec.component(i)
        tops.append(2 * n if g.order is None else g.order - 1)
    grid = np.stack(np.meshgrid(*[np.arange(t + 1) for t in tops], indexing="ij"), -1).reshape(-1, len(idx))
    grid = grid[(grid != 0).sum(axis=1) <= n]
    out = set()
    for row in grid:
        out.add(spec.element([(i, spec.component(i).unrank(int(r))) for i, r in zip(idx, row) if r]))
    return out


# 1


def test_group_and_coset_algebra():
    t0 = time.perf_counter()
    rep = VerifyReport("group-axioms")
    suite_group_axioms(seed=0, scale=1.0, rep=rep)
    wall = time.perf_counter() - t0
    failures = [f"{v['invariant']}: {v['detail']}" for v in rep.violations]
    if wall >= 10:
        failures.append(f"took {wall:.1f} s")
    _finish(1, failures, f"{rep.cases} cases over {len(KINDS)} component kinds in {wall:.1f} s")


# 2


def test_lebesgue_compact_exhaustive():
    t0 = time.perf_counter()
    rng = random.Random("acceptance-2")
    failures, checked = [], 0
    for k in range(1000):
        g = KINDS[k % len(KINDS)]
        spec = GroupSpec.uniform(g)
        W = Window.first(rng.randint(1, 4))
        n = rng.randint(0, 2)
        cover = random_oracle(rng, W, spec)
        N = lebesgue_compact(cover, n, W, spec)
        piece = brute_piece(n, W, spec)
        if piece != set(compact_piece(n, W, spec)):
            failures.append(f"oracle {k}: enumerated piece differs from brute force")
            continue
        members = {cover.choose(y) for y in piece}
        for x in piece:
            checked += 1
            first = cover.choose(x)
            if not any(box_contained(x, N.B, O, W, spec) for O in [first, *members]):
                failures.append(f"oracle {k}: no member contains {x}*U_{sorted(N.B)}")
    wall = time.perf_counter() - t0
    if wall >= 30:
        failures.append(f"took {wall:.1f} s")
    _finish(2, failures, f"1000 oracles, {checked} piece points in {wall:.1f} s")


# 3


def _coset_inside(x, B, O, spec):
    """Product-of-boxes containment: pinned coordinates must be allowed, free ones fully allowed."""
    for i, vals in O.as_dict().items():
        if i in B:
            if x.get(i, spec.component(i).identity) not in vals:
                return False
        else:
            g = spec.component(i)
            if g.order is None or len(vals) < g.order:
                return False
    return True


def test_lebesgue_pgroup_probes():
    t0 = time.perf_counter()
    rng = random.Random("acceptance-3")
    failures, checked = [], 0
    for k in range(1000):
        spec = GroupSpec.uniform(KINDS[k % len(KINDS)], track=BOX)
        W = Window.first(rng.randint(1, 4))
        cover = random_oracle(rng, W, spec, declared=True)
        N = lebesgue_pgroup(cover)
        for _ in range(200):
            checked += 1
            x = random_element(rng, spec, W, max_rank=6)
            if not _coset_inside(x, N.B, cover.choose(x), spec):
                failures.append(f"oracle {k}: {x}*U_{sorted(N.B)} escapes its member")
    # the grid oracle agrees with the coordinate rule on a sample
    for k in range(200):
        spec = GroupSpec.uniform(KINDS[k % len(KINDS)], track=BOX)
        W = Window.first(rng.randint(1, 4))
        cover = random_oracle(rng, W, spec, declared=True)
        x = random_element(rng, spec, W)
        B = frozenset(rng.sample(list(W), rng.randint(0, len(W))))
        O = cover.choose(x)
        if box_contained(x, B, O, W, spec) != _coset_inside(x, B, O, spec):
            failures.append(f"grid and coordinate oracles disagree on {x}, {sorted(B)}")
    wall = time.perf_counter() - t0
    _finish(3, failures, f"1000 oracles x 200 probes ({checked} checks) in {wall:.1f} s")


# 4


NBD_TRACKS = {
    "product": GroupSpec.uniform(ComponentGroup.integers(), track=PRODUCT),
    "box": GroupSpec.uniform(ComponentGroup.cyclic(2), track=BOX),
}


def test_nbd_game_strategy():
    t0 = time.perf_counter()
    W = Window.first(8)
    failures, plays, probes_seen, scheduled_twice = [], 0, 0, 0
    for track, spec in NBD_TRACKS.items():
        probes = default_probes(W, spec)
        for kind in ("randomNbd", "shrinkingNbd", "probeHunter"):
            for seed in range(100):
                plays += 1
                one = make_one({"kind": kind, "seed": seed}, G1_NBD, spec, W)
                t = play(GameSpec(G1_NBD, spec, W), one, NbdTwo(spec), 64, seed=seed, probes=probes)
                where = f"{track}/{kind}/seed {seed}"
                for v in validate_transcript(t):
                    failures.append(f"{where}: {v.rule} at {v.inning}")
                for p in probes:
                    cov = probe_coverage(t, p)
                    pred = schedule_prediction(t, p)
                    probes_seen += 1
                    scheduled_twice += len(pred) >= 2
                    # slots past the horizon (late-stabilizing reps) cannot be checked,
                    # but every slot inside it must cover the probe
                    if len(cov) < 2 or not set(pred) <= set(cov):
                        failures.append(f"{where}: probe {p} scheduled at {pred}, covered at {cov}")
                    for v in claim_violations(t, p):
                        failures.append(f"{where}: probe {p} {v.rule} at {v.inning}: {v.detail}")
    wall = time.perf_counter() - t0
    if wall >= 60:
        failures.append(f"took {wall:.1f} s")
    _finish(
        4,
        failures,
        f"{plays} plays x 64 innings on both tracks in {wall:.1f} s; "
        f"{scheduled_twice}/{probes_seen} probes had two scheduled slots inside the horizon",
    )


# 5


def _containment_failures(t, spec, W):
    out = []
    for rec in t.records:
        inner = rec["instrumentation"]["innerCoset"]
        B = inner["indices"]
        x = spec.element([(i, vs[0]) for i, vs in zip(B, inner["values"]) if vs[0] != spec.component(i).identity])
        O = BasicOpen.from_json(rec["twoMove"]["open"])
        if not box_contained(x, B, O, W, spec):
            out.append(f"inning {rec['inning']}: played member misses the inner coset")
    return out


def test_open_cover_strategies():
    t0 = time.perf_counter()
    failures, plays = [], 0
    z = GroupSpec.uniform(ComponentGroup.integers(), track=PRODUCT)
    W_sigma = Window.first(4)
    piece = compact_piece(2, W_sigma, z)
    c2box = GroupSpec.uniform(ComponentGroup.cyclic(2), track=BOX)
    W_p = Window.first(8)
    tracks = [
        ("sigma", z, W_sigma, piece, lambda: SigmaTwo(z, NbdTwo(z))),
        ("pgroup", c2box, W_p, default_probes(W_p, c2box), lambda: PGroupTwo(c2box, NbdTwo(c2box))),
    ]
    for name, spec, W, probes, two in tracks:
        for seed in range(100):
            plays += 1
            one = make_one({"kind": "randomCover", "seed": seed}, G1_OPEN, spec, W)
            t = play(GameSpec(G1_OPEN, spec, W), one, two(), 48, seed=seed, probes=probes)
            where = f"{name}/seed {seed}"
            failures += [f"{where}: {v.rule} at {v.inning}" for v in validate_transcript(t)]
            failures += [f"{where}: {m}" for m in _containment_failures(t, spec, W)]
            for c in t.summary["coverage"]:
                if not c["innings"]:
                    failures.append(f"{where}: probe {c['probe']} never covered")
    wall = time.perf_counter() - t0
    _finish(5, failures, f"{plays} plays x 48 innings, {len(piece)} piece-2 probes on the sigma track, in {wall:.1f} s")


# 6


def test_counter_play():
    t0 = time.perf_counter()
    failures, runs = [], 0
    for spec, W in counterplay_scenarios():
        probes = compact_piece(2, W, spec)
        for fam in COUNTER_FAMILIES:
            seeds = range(10) if fam["kind"] == "probeHunter" else [None]
            for seed in seeds:
                runs += 1
                desc = dict(fam) if seed is None else {**fam, "seed": seed}
                one = make_one(desc, G1_OPEN, spec, W)
                t = counter_play(one, spec, W, 64, probes)
                where = f"{fam['kind']} on {len(W)} indices"
                failures += [f"{where}: {v.rule} at {v.inning}" for v in validate_transcript(t)]
                if t.summary["status"] != "truncated" or len(t.records) != 64:
                    failures.append(f"{where}: play ended early ({t.summary['status']})")
                for p in probes:
                    if not probe_coverage(t, p):
                        failures.append(f"{where}: probe {p} never covered")
    wall = time.perf_counter() - t0
    _finish(6, failures, f"{runs} counter-plays against 3 families in {wall:.1f} s")


# 7


def test_countable_one_fairness():
    innings = CantorSchedule.bound(8, 4) + 1
    W = Window.first(6)
    specs = [GroupSpec.uniform(ComponentGroup.integers()), GroupSpec.uniform(ComponentGroup.cyclic(2))]
    failures, cases, sequences = [], 0, 0
    for seed in range(50):
        for kind, sets in monotone_sequences(seed, specs[seed % 2], W, innings):
            sequences += 1
            two = CountableOneTwo()
            picks, first_seen = [], {}
            for n, S in enumerate(sets):
                b, info = two.respond(n, S)
                picks.append(b)
                for r in info["newRanks"]:
                    first_seen[r] = n
            for r in range(9):
                if first_seen.get(r, innings) > CantorSchedule.bound(r, 1):
                    continue
                x = two.ranked[r]
                if any(x not in S for S in sets[first_seen[r]:]):
                    failures.append(f"{kind} seed {seed}: rank {r} left the sets")
                for m in range(1, 5):
                    b = CantorSchedule.bound(r, m)
                    cases += 1
                    got = picks[: b + 1].count(x)
                    if got < m:
                        failures.append(f"{kind} seed {seed}: rank {r} picked {got} < {m} times by inning {b}")
    if cases < 0.9 * sequences * 9 * 4:
        failures.append(f"only {cases} of {sequences * 36} (rank, count) pairs were checkable")
    _finish(7, failures, f"{sequences} monotone sequences, {cases} (rank, count) checks over {innings} innings")


# 8


def test_window_extension_invariance():
    cases = invariance_cases()
    failures = []
    for k in range(50):
        game, spec, one_desc, two_desc = cases[k % len(cases)]
        a, b = run_pair(game, spec, one_desc, two_desc, 1000 + k, Window.first(4), 4, 24)
        if dumps(strip_window(a.records)) != dumps(strip_window(b.records)):
            failures.append(f"run {k}: {one_desc['kind']} vs {two_desc['kind']} differs")
    _finish(8, failures, f"50 runs over {len(cases)} game/strategy pairs, window 4 vs 8")


# 9


def rank_order(C, spec, count):
    """The first ``count`` elements supported in ``C``, by max rank, support size, indices, ranks."""
    C = sorted(C)
    g0 = spec.component(C[0]) if C else None
    finite = g0 is not None and g0.order is not None
    top = 0
    while not finite and (2 * top + 1) ** len(C) < count:
        top += 1
    limit = g0.order - 1 if finite else 2 * top
    items = []
    for ranks in itertools.product(range(limit + 1), repeat=len(C)):
        sup = [(i, r) for i, r in zip(C, ranks) if r]
        key = (max(ranks, default=0), len(sup), tuple(i for i, _ in sup), tuple(r for _, r in sup))
        items.append((key, sup))
    items.sort()
    return [spec.element([(i, spec.component(i).unrank(r)) for i, r in sup]) for _, sup in items[:count]]


def test_selector_coverage():
    rng = random.Random("acceptance-9")
    c2 = GroupSpec.uniform(ComponentGroup.cyclic(2))
    z = GroupSpec.uniform(ComponentGroup.integers())
    failures, checked = [], 0
    W = Window.first(8)
    for trial in range(20):
        for spec, exhaustive in ((c2, True), (z, False)):
            nbds = [NbdSubgroup(frozenset(rng.sample(list(W), rng.randint(0, 3)))) for _ in range(101)]
            C = frozenset().union(*(N.B for N in nbds))
            fs = roth_selector(nbds, spec, W)
            ranked = rank_order(C, spec, 101)
            lib = list(itertools.islice(enumerate_cosets(C, spec), len(ranked)))
            if ranked != lib:
                failures.append(f"trial {trial}: enumeration order differs from the direct sort")
            pairs = list(enumerate(ranked))
            sample = pairs if exhaustive else rng.sample(pairs, min(30, len(pairs)))
            for r, x in sample:
                checked += 1
                hit = next((n for n in range(r + 1) if all(x.get(i, spec.component(i).identity) == fs[n].get(i, spec.component(i).identity) for i in nbds[n].B)), None)
                if hit is None:
                    failures.append(f"trial {trial}: {x} of rank {r} not covered by inning {r}")
    _finish(9, failures, f"{checked} probes of rank <= 100, exhaustive on Cyclic(2), sampled on Integers")
