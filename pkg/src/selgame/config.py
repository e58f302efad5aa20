"""Run configuration: one JSON file, overridable from the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .adversaries import ConfigError, make_one
from .engine import COUNTABLE_ONE, G1_NBD, G1_OPEN, GAME_KINDS, GameSpec
from .groups import TRACKS, Element, GroupSpec, MalformedElementError, Window
from .strategies import (
    CountableOneTwo,
    CounterPlayTwo,
    IdentityTwo,
    NbdTwo,
    PGroupTwo,
    SigmaTwo,
)
from .topology import ContractError, enumerate_cosets

KEYS = {"group", "track", "game", "one", "two", "innings", "window", "probes", "seed", "out"}
DEFAULT_PROBE_RANK = 3


def default_probes(window: Window, spec: GroupSpec, k: int = DEFAULT_PROBE_RANK) -> list[Element]:
    """Identity plus the singleton-support elements among the first ``k + 1`` window reps."""
    out = []
    for r, x in enumerate(enumerate_cosets(window, spec)):
        if r > k:
            break
        if len(x) <= 1:
            out.append(x)
    return out


@dataclass(frozen=True)
class RunConfig:
    group: GroupSpec
    game: str
    one: dict
    two: dict
    innings: int
    window: Window
    probes: tuple = ()
    seed: Any = 0
    out: str | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        unknown = set(d) - KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("game", "one", "two", "innings", "window"):
            if key not in d:
                raise ConfigError(f"missing config key {key!r}")
        track = d.get("track")
        if track is not None and track not in TRACKS:
            raise ConfigError(f"unknown track {track!r}")
        try:
            group = GroupSpec.from_dict(d.get("group", {}), track=track)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad group: {exc}") from None
        if d["game"] not in GAME_KINDS:
            raise ConfigError(f"unknown game {d['game']!r}")
        window = d["window"]
        window = Window.first(window) if isinstance(window, int) else Window(window)
        probes = d.get("probes")
        try:
            probes = (
                tuple(group.element(Element.from_json(p)) for p in probes)
                if probes is not None
                else tuple(default_probes(window, group))
            )
        except (MalformedElementError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad probe: {exc}") from None
        cfg = cls(
            group=group,
            game=d["game"],
            one=dict(d["one"]),
            two=dict(d["two"]),
            innings=d["innings"],
            window=window,
            probes=probes,
            seed=d.get("seed", 0),
            out=d.get("out"),
        )
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def check(self) -> None:
        if not isinstance(self.innings, int) or isinstance(self.innings, bool) or self.innings < 1:
            raise ConfigError(f"innings must be a positive integer, got {self.innings!r}")
        for p in self.probes:
            if not self.window.covers(p.support()):
                raise ConfigError(f"probe {p} leaves the window")
        for key in ("indices", "B"):
            idx = self.one.get(key)
            if isinstance(idx, list) and not self.window.covers(idx):
                raise ConfigError(f"ONE's {key} leave the window")

    def with_overrides(self, seed=None, innings=None, out=None) -> "RunConfig":
        cfg = replace(
            self,
            seed=self.seed if seed is None else seed,
            innings=self.innings if innings is None else innings,
            out=self.out if out is None else out,
        )
        cfg.check()
        return cfg

    def to_dict(self) -> dict:
        return {
            "group": self.group.to_dict(),
            "track": self.group.track,
            "game": self.game,
            "one": self.one,
            "two": self.two,
            "innings": self.innings,
            "window": self.window.to_json(),
            "probes": [p.to_json() for p in self.probes],
            "seed": self.seed,
            "out": self.out,
        }

    # builders

    def game_spec(self) -> GameSpec:
        return GameSpec(self.game, self.group, self.window, max(10_000, self.innings))

    def make_one(self):
        desc = {**self.one, "seed": self.seed}
        if desc.get("kind") in ("scripted", "constantCover"):
            desc.pop("seed")
        return make_one(desc, self.game, self.group, self.window)

    def make_two(self):
        return make_two(self.two, self.game, self.group)


_TWO_GAMES = {
    "c1": (COUNTABLE_ONE,),
    "nbd": (G1_NBD,),
    "identity": (G1_NBD,),
    "pgroup": (G1_OPEN,),
    "sigma": (G1_OPEN,),
    "counterplay": (G1_OPEN,),
}


def make_two(desc: Mapping, game: str, spec: GroupSpec):
    """Build a TWO strategy from ``{"kind": ..., **params}``."""
    params = dict(desc)
    kind = params.pop("kind", None)
    if kind not in _TWO_GAMES:
        raise ConfigError(f"unknown TWO strategy {kind!r}")
    if game not in _TWO_GAMES[kind]:
        raise ConfigError(f"TWO strategy {kind!r} does not play the {game} game")
    period = params.pop("sweepPeriod", 4)
    try:
        if kind == "c1":
            return CountableOneTwo(sweep_period=period)
        if kind == "nbd":
            return NbdTwo(spec, sweep_period=period)
        if kind == "identity":
            return IdentityTwo(spec)
        inner = params.pop("inner", None)
        inner = NbdTwo(spec, sweep_period=(inner or {}).get("sweepPeriod", period))
        if kind == "pgroup":
            return PGroupTwo(spec, inner)
        if kind == "sigma":
            return SigmaTwo(spec, inner)
        return CounterPlayTwo(spec)
    except (ContractError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
