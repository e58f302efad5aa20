"""Named families of cover oracles.

Every oracle a ONE strategy plays is built here from a JSON descriptor, so a
transcript can rebuild the exact cover offline and re-check TWO's picks.
"""

from __future__ import annotations

import random
from typing import Mapping

from .groups import Element, GroupSpec, restrict, value
from .topology import WHOLE, BasicOpen, CoverOracle, coset, intersect


class UnknownCoverError(ValueError):
    pass


def whole_cover() -> CoverOracle:
    return CoverOracle(lambda x: WHOLE, frozenset(), "whole", {})


def coset_cover(B, spec: GroupSpec) -> CoverOracle:
    """The cover O(U_B), as the oracle ``x -> x * U_B``."""
    B = frozenset(B)
    return CoverOracle(lambda x: coset(x, B, spec), B, "coset", {})


def random_cover(
    seed,
    pool,
    spec: GroupSpec,
    p: float = 0.6,
    spread: int = 1,
    declared: bool = True,
) -> CoverOracle:
    """Seeded pseudo-random cover constrained inside ``pool``.

    For each point, each pool index is constrained with probability ``p``
    to a small value set around the point's own value.  The member depends
    on the point's pool coordinates only, so points that agree there get
    the same member.
    """
    pool = tuple(sorted(set(pool)))

    def choose(x: Element) -> BasicOpen:
        rng = random.Random(f"random-cover|{seed}|{restrict(x, pool).key()}")
        cons = []
        for i in pool:
            if rng.random() >= p:
                continue
            g = spec.component(i)
            v = value(x, i, spec)
            if g.order is None:
                lo = rng.randint(0, spread)
                hi = rng.randint(0, spread)
                vals = frozenset(range(v - lo, v + hi + 1))
            else:
                vals = frozenset([v] + [u for u in g.values() if u != v and rng.random() < 0.3])
            cons.append((i, vals))
        return BasicOpen(tuple(cons))

    params = {"seed": seed, "pool": list(pool), "p": p, "spread": spread, "declared": declared}
    return CoverOracle(choose, frozenset(pool) if declared else None, "random", params)


def meet_cover(covers) -> CoverOracle:
    """Pointwise intersection of the chosen members: ``{U ∩ V} \\ {∅}`` as an oracle."""
    covers = tuple(covers)

    def choose(x: Element) -> BasicOpen:
        out = WHOLE
        for c in covers:
            out = intersect(out, c.choose(x))
            if out is None:
                raise AssertionError("members chosen at the same point are disjoint")
        return out

    bounds = [c.bound for c in covers]
    bound = None if any(b is None for b in bounds) else frozenset().union(*bounds)
    return CoverOracle(choose, bound, "meet", {"parts": [c.descriptor() for c in covers]})


def build_cover(desc: Mapping, spec: GroupSpec) -> CoverOracle:
    label = desc.get("label")
    if label == "whole":
        return whole_cover()
    if label == "coset":
        return coset_cover(desc["bound"], spec)
    if label == "random":
        return random_cover(
            desc["seed"],
            desc["pool"],
            spec,
            p=desc.get("p", 0.6),
            spread=desc.get("spread", 1),
            declared=desc.get("declared", True),
        )
    if label == "meet":
        return meet_cover([build_cover(d, spec) for d in desc["parts"]])
    raise UnknownCoverError(f"unknown cover family {label!r}")


class RefinementMeet:
    """The running meet of every cover ONE has played so far.

    Chosen members are memoised per point, so extending the meet by one
    cover costs one query per point already seen.
    """

    def __init__(self):
        self.covers: list[CoverOracle] = []
        self._memo: dict[Element, tuple[int, BasicOpen]] = {}

    def extend(self, cover: CoverOracle) -> None:
        self.covers.append(cover)

    @property
    def bound(self):
        if any(c.bound is None for c in self.covers):
            return None
        return frozenset().union(*(c.bound for c in self.covers))

    def choose(self, x: Element) -> BasicOpen:
        done, out = self._memo.get(x, (0, WHOLE))
        for c in self.covers[done:]:
            out = intersect(out, c.choose(x))
            if out is None:
                raise AssertionError("members chosen at the same point are disjoint")
        self._memo[x] = (len(self.covers), out)
        return out

    def oracle(self) -> CoverOracle:
        return CoverOracle(self.choose, self.bound, "meet", {"parts": [c.descriptor() for c in self.covers]})
