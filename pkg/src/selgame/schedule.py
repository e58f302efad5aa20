"""Cantor pairing as a fair inning schedule."""

from __future__ import annotations

from math import isqrt


def pair(r: int, j: int) -> int:
    d = r + j
    return d * (d + 1) // 2 + j


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("inning must be non-negative")
    d = (isqrt(8 * n + 1) - 1) // 2
    j = n - d * (d + 1) // 2
    return d - j, j


class CantorSchedule:
    """Inning ``n`` serves rank ``unpair(n)[0]``, for the ``unpair(n)[1]``-th time.

    Rank ``r`` is therefore served at innings ``pair(r, 0), pair(r, 1), ...``
    and the innings serving ``r`` are the piece ``S_r`` of a partition of
    the naturals into infinitely many infinite sets.
    """

    pair = staticmethod(pair)
    unpair = staticmethod(unpair)

    @staticmethod
    def bound(r: int, m: int) -> int:
        """Inning by which rank ``r`` has been served ``m`` times, if seen by inning ``pair(r, 0)``."""
        if m < 1:
            raise ValueError("m counts selections and starts at 1")
        return pair(r, m - 1)

    @staticmethod
    def piece(n: int) -> int:
        return unpair(n)[0]

    @staticmethod
    def innings(r: int, upto: int) -> list[int]:
        """Innings below ``upto`` that serve rank ``r``."""
        out = []
        j = 0
        while (n := pair(r, j)) < upto:
            out.append(n)
            j += 1
        return out
