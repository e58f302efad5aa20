"""Seeded ONE strategies used to stress TWO's strategies."""

from __future__ import annotations

import random
from typing import Mapping

from .covers import build_cover, coset_cover, random_cover, whole_cover
from .engine import COUNTABLE_ONE, G1_NBD, G1_OPEN
from .groups import Element, GroupSpec, Window
from .moves import WINDOW_B, CountableSet, FiniteSet, NbdCover, RepSet, build_set
from .topology import CoverOracle, enumerate_cosets


class ConfigError(ValueError):
    """A strategy descriptor that does not fit the game or group."""


def _indices(params, window: Window | None) -> tuple:
    idx = params.get("indices")
    if idx is None:
        if window is None:
            raise ConfigError("adversary needs pinned indices or a window")
        idx = list(window)
    return tuple(sorted(set(int(i) for i in idx)))


def _played_indices(two_move) -> frozenset:
    """Indices constrained by TWO's last move, whatever the game."""
    member = getattr(two_move, "member", two_move)
    return getattr(member, "indices", frozenset())


class _Base:
    kind = ""
    games: tuple = ()

    def __init__(self, spec: GroupSpec, seed=None, **params):
        self.spec = spec
        self.seed = seed
        self.params = params

    def descriptor(self) -> dict:
        d = {"kind": self.kind, **self.params}
        if self.seed is not None:
            d["seed"] = self.seed
        return d


# G1(O_nbd, O)


class ScriptedNbd(_Base):
    kind = "scripted"
    games = (G1_NBD,)

    def __init__(self, spec, seed=None, moves=(), window=None):
        super().__init__(spec, seed, moves=[m if m == WINDOW_B else sorted(m) for m in moves])
        if not moves:
            raise ConfigError("scripted ONE needs at least one move")
        self.moves = [NbdCover(m if m == WINDOW_B else tuple(m)) for m in moves]

    def move(self, n, history, window):
        return self.moves[min(n, len(self.moves) - 1)]


class RandomNbd(_Base):
    """Monotone: ``B_n`` is the first ``(n+1)*growth`` indices of a seeded shuffle."""

    kind = "randomNbd"
    games = (G1_NBD,)

    def __init__(self, spec, seed=0, growth=1, indices=None, window=None):
        self.order = list(_indices({"indices": indices}, window))
        super().__init__(spec, seed, growth=growth, indices=sorted(self.order))
        if growth < 1:
            raise ConfigError("growth must be positive")
        random.Random(f"randomNbd|{seed}").shuffle(self.order)
        self.growth = growth

    def move(self, n, history, window):
        return NbdCover(tuple(sorted(self.order[: (n + 1) * self.growth])))


class ShrinkingNbd(_Base):
    """``B_n`` = the first ``(n+1)*step`` indices: neighborhoods shrink every inning."""

    kind = "shrinkingNbd"
    games = (G1_NBD,)

    def __init__(self, spec, seed=None, step=1, indices=None, window=None):
        self.order = list(_indices({"indices": indices}, window))
        super().__init__(spec, seed, step=step, indices=self.order)
        if step < 1:
            raise ConfigError("step must be positive")
        self.step = step

    def move(self, n, history, window):
        return NbdCover(tuple(self.order[: (n + 1) * self.step]))


class ProbeHunter(_Base):
    """Pins ``width`` indices that TWO's last move left unconstrained.

    Against neighborhood covers the pins are the whole move, so the moves
    are not monotone.  Against open covers the pins accumulate and ONE
    plays the coset cover of everything pinned so far.
    """

    kind = "probeHunter"
    games = (G1_NBD, G1_OPEN)

    def __init__(self, spec, seed=0, width=2, indices=None, window=None, game=G1_NBD):
        self.pool = _indices({"indices": indices}, window)
        super().__init__(spec, seed, width=width, indices=list(self.pool))
        if width < 1:
            raise ConfigError("width must be positive")
        self.width = width
        self.game = game
        self.rng = random.Random(f"probeHunter|{seed}")
        self.pinned: set = set()

    def _pick(self, history) -> list:
        last = _played_indices(history[-1][1]) if history else frozenset()
        free = [i for i in self.pool if i not in last and i not in self.pinned]
        if not free:
            free = [i for i in self.pool if i not in last] or list(self.pool)
        return sorted(self.rng.sample(free, min(self.width, len(free))))

    def move(self, n, history, window):
        pins = self._pick(history)
        if self.game == G1_NBD:
            return NbdCover(tuple(pins))
        self.pinned.update(pins)
        return coset_cover(sorted(self.pinned), self.spec)


# G1(O, O)


class RandomCover(_Base):
    """A fresh seeded random cover each inning, bound inside a random pool."""

    kind = "randomCover"
    games = (G1_OPEN,)

    def __init__(self, spec, seed=0, indices=None, window=None, p=0.6, spread=1, declared=True, pool_size=None):
        self.pool = _indices({"indices": indices}, window)
        super().__init__(spec, seed, indices=list(self.pool), p=p, spread=spread, declared=declared)
        if pool_size is not None:
            self.params["pool_size"] = pool_size
        self.pool_size = pool_size
        self.p, self.spread, self.declared = p, spread, declared

    def move(self, n, history, window):
        rng = random.Random(f"randomCover|{self.seed}|{n}")
        k = self.pool_size or rng.randint(1, len(self.pool))
        sub = rng.sample(self.pool, min(k, len(self.pool)))
        return random_cover(f"{self.seed}.{n}", sub, self.spec, self.p, self.spread, self.declared)


class ConstantCover(_Base):
    """The same cover every inning: the whole group, or a fixed coset cover."""

    kind = "constantCover"
    games = (G1_OPEN,)

    def __init__(self, spec, seed=None, B=None, window=None):
        super().__init__(spec, seed, **({} if B is None else {"B": sorted(B)}))
        self.cover = whole_cover() if B is None else coset_cover(B, spec)

    def move(self, n, history, window):
        return self.cover


class GreedyCover(_Base):
    """Coset covers pinning ever more coordinates: ``P_n`` = first ``(n+1)*step`` indices."""

    kind = "greedyCover"
    games = (G1_OPEN,)

    def __init__(self, spec, seed=None, step=1, indices=None, window=None):
        self.order = list(_indices({"indices": indices}, window))
        super().__init__(spec, seed, step=step, indices=self.order)
        self.step = step

    def move(self, n, history, window):
        return coset_cover(self.order[: (n + 1) * self.step], self.spec)


class ScriptedCover(_Base):
    kind = "scriptedCover"
    games = (G1_OPEN,)

    def __init__(self, spec, seed=None, covers=(), window=None):
        super().__init__(spec, seed, covers=list(covers))
        if not covers:
            raise ConfigError("scripted ONE needs at least one move")
        self.covers = [build_cover(c, spec) for c in covers]

    def move(self, n, history, window):
        return self.covers[min(n, len(self.covers) - 1)]


# countable-1 game


class PrefixReps(_Base):
    """``W_n`` = the first ``(n+1)*growth`` coset reps of ``U_B``."""

    kind = "prefixReps"
    games = (COUNTABLE_ONE,)

    def __init__(self, spec, seed=None, B=(), growth=1, window=None):
        super().__init__(spec, seed, B=sorted(B), growth=growth)
        self.gen = enumerate_cosets(B, spec)
        self.items: list[Element] = []
        self.growth = growth

    def move(self, n, history, window):
        want = (n + 1) * self.growth
        while len(self.items) < want:
            x = next(self.gen, None)
            if x is None:
                break
            self.items.append(x)
        return FiniteSet(self.items)


class RandomSets(_Base):
    """Monotone finite sets that grow at random and are re-shuffled every inning.

    Reshuffling moves old members around, so TWO cannot rely on positions.
    """

    kind = "randomSets"
    games = (COUNTABLE_ONE,)

    def __init__(self, spec, seed=0, indices=None, window=None, grow=3, max_rank=2):
        self.pool = _indices({"indices": indices}, window)
        super().__init__(spec, seed, indices=list(self.pool), grow=grow, max_rank=max_rank)
        self.rng = random.Random(f"randomSets|{seed}")
        self.grow, self.max_rank = grow, max_rank
        self.members: list[Element] = []
        self._seen: set = set()

    def _draw(self) -> Element:
        k = self.rng.randint(0, min(3, len(self.pool)))
        idx = self.rng.sample(self.pool, k)
        out = []
        for i in idx:
            g = self.spec.component(i)
            top = self.max_rank if g.order is None else min(self.max_rank, g.order - 1)
            out.append((i, g.unrank(self.rng.randint(1, max(top, 1)))))
        return self.spec.element(out)

    def move(self, n, history, window):
        for _ in range(self.rng.randint(0 if self.members else 1, self.grow)):
            x = self._draw()
            if x not in self._seen:
                self._seen.add(x)
                self.members.append(x)
        order = list(self.members)
        self.rng.shuffle(order)
        return FiniteSet(order)


class GrowingReps(_Base):
    """``W_n`` = all reps of ``U_{B_n}`` for randomly growing ``B_n``."""

    kind = "growingReps"
    games = (COUNTABLE_ONE,)

    def __init__(self, spec, seed=0, indices=None, window=None, p=0.3):
        self.pool = list(_indices({"indices": indices}, window))
        super().__init__(spec, seed, indices=list(self.pool), p=p)
        self.rng = random.Random(f"growingReps|{seed}")
        self.rng.shuffle(self.pool)
        self.size, self.p = 0, p

    def move(self, n, history, window):
        if self.size < len(self.pool) and (self.size == 0 or self.rng.random() < self.p):
            self.size += 1
        return RepSet(self.pool[: self.size], self.spec)


class ScriptedSets(_Base):
    kind = "scriptedSets"
    games = (COUNTABLE_ONE,)

    def __init__(self, spec, seed=None, sets=(), window=None):
        super().__init__(spec, seed, sets=list(sets))
        if not sets:
            raise ConfigError("scripted ONE needs at least one move")
        self.sets: list[CountableSet] = [
            s if isinstance(s, CountableSet) else build_set(s, spec) for s in sets
        ]
        self.params["sets"] = [s.to_json() for s in self.sets]

    def move(self, n, history, window):
        return self.sets[min(n, len(self.sets) - 1)]


ADVERSARIES = {
    cls.kind: cls
    for cls in (
        ScriptedNbd,
        RandomNbd,
        ShrinkingNbd,
        ProbeHunter,
        RandomCover,
        ConstantCover,
        GreedyCover,
        ScriptedCover,
        PrefixReps,
        RandomSets,
        GrowingReps,
        ScriptedSets,
    )
}

# "scripted" is one name for three move types
_SCRIPTED = {G1_NBD: ScriptedNbd, G1_OPEN: ScriptedCover, COUNTABLE_ONE: ScriptedSets}


def make_one(desc: Mapping, game: str, spec: GroupSpec, window: Window | None = None):
    """Build a ONE strategy from a descriptor ``{"kind": ..., "seed": ..., **params}``."""
    params = dict(desc)
    kind = params.pop("kind", None)
    cls = _SCRIPTED.get(game) if kind == "scripted" else ADVERSARIES.get(kind)
    if cls is None:
        raise ConfigError(f"unknown ONE strategy {kind!r}")
    if game not in cls.games:
        raise ConfigError(f"ONE strategy {kind!r} does not play the {game} game")
    if cls is ProbeHunter:
        params["game"] = game
    try:
        return cls(spec, window=window, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {kind!r}: {exc}") from None
