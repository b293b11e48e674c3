"""Finite unions of rational intervals with open/closed ends, plus points.

A :class:`ZeroSet` is an immutable, canonically normalized subset of the real
line.  Endpoints are :class:`~fractions.Fraction` values or ``+/-math.inf``
(infinite ends are always open).  Single points are kept separately as
*atoms*; a point lying inside or on the edge of an interval is absorbed.

>>> from fractions import Fraction as F
>>> s = ZeroSet.closed(0, 1).insert(Interval.closed(1, 2))
>>> s
ZeroSet('[0, 2]')
>>> ZeroSet.open(0, 1).insert(F(1)).insert(Interval.open(1, 2))
ZeroSet('(0, 2)')
>>> F(3, 2) in s
True
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Tuple, Union

from .exactq import as_rational, format_rational

Real = Union[Fraction, float]

DEFAULT_MAX_INTERVALS = 4096


class MalformedInterval(ValueError):
    pass


class ZeroScale(ValueError):
    pass


class IntervalCapExceeded(RuntimeError):
    """A normalized set would hold more intervals than the configured cap."""


def _coerce(value) -> Real:
    if type(value) is Fraction:
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return value
        raise TypeError("finite endpoints must be exact rationals, not floats")
    return as_rational(value)


@dataclass(frozen=True)
class EndPoint:
    value: Real
    closed: bool

    def __post_init__(self):
        if isinstance(self.value, float) and self.closed:
            raise MalformedInterval("infinite endpoints cannot be closed")


@dataclass(frozen=True)
class Interval:
    """A connected piece ``lo .. hi``; ``lo == hi`` (both closed) is a point."""

    lo: Real
    hi: Real
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = _coerce(self.lo), _coerce(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if type(lo) is float:
            if lo > 0:
                raise MalformedInterval(f"bad infinite endpoint in {self}")
            object.__setattr__(self, "lo_closed", False)
        if type(hi) is float:
            if hi < 0:
                raise MalformedInterval(f"bad infinite endpoint in {self}")
            object.__setattr__(self, "hi_closed", False)
        if self.lo > self.hi:
            raise MalformedInterval(f"lo > hi in {self}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise MalformedInterval(f"empty degenerate interval at {self.lo}")

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x, True, True)

    @property
    def start(self) -> EndPoint:
        return EndPoint(self.lo, self.lo_closed)

    @property
    def end(self) -> EndPoint:
        return EndPoint(self.hi, self.hi_closed)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def covers(self, other: "Interval") -> bool:
        if other.lo < self.lo or (other.lo == self.lo and other.lo_closed and not self.lo_closed):
            return False
        if other.hi > self.hi or (other.hi == self.hi and other.hi_closed and not self.hi_closed):
            return False
        return True

    def __str__(self) -> str:
        if self.is_point:
            return "{" + _fmt(self.lo) + "}"
        return "%s%s, %s%s" % (
            "[" if self.lo_closed else "(",
            _fmt(self.lo),
            _fmt(self.hi),
            "]" if self.hi_closed else ")",
        )


def _fmt(x: Real) -> str:
    if isinstance(x, float):
        return "-inf" if x < 0 else "inf"
    if x.denominator == 1:
        return str(x.numerator)
    return format_rational(x)


Piece = Union[Interval, Fraction, int, str, "ZeroSet"]


def _pieces_of(piece: Piece) -> List[Interval]:
    if isinstance(piece, ZeroSet):
        return list(piece.pieces())
    if isinstance(piece, Interval):
        return [piece]
    return [Interval.point(piece)]


def _lo_key(iv: Interval) -> tuple:
    return (iv.lo, 0 if iv.lo_closed else 1)


def _normalize(pieces: Iterable[Interval], cap: int) -> Tuple[tuple, tuple]:
    ordered = sorted(pieces, key=_lo_key)
    merged: List[Interval] = []
    for iv in ordered:
        if merged:
            cur = merged[-1]
            touches = iv.lo < cur.hi or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
            if touches:
                if iv.hi > cur.hi or (iv.hi == cur.hi and iv.hi_closed and not cur.hi_closed):
                    merged[-1] = Interval(cur.lo, iv.hi, cur.lo_closed, iv.hi_closed)
                continue
        merged.append(iv)
    intervals = tuple(iv for iv in merged if not iv.is_point)
    atoms = tuple(iv.lo for iv in merged if iv.is_point)
    if len(intervals) > cap:
        raise IntervalCapExceeded(f"{len(intervals)} intervals exceeds cap {cap}")
    return intervals, atoms


@dataclass(frozen=True, init=False)
class ZeroSet:
    """Normalized finite union of intervals and isolated points."""

    intervals: Tuple[Interval, ...]
    atoms: Tuple[Fraction, ...]

    def __init__(self, pieces: Iterable[Piece] = (), *, cap: int = DEFAULT_MAX_INTERVALS):
        flat: List[Interval] = []
        for p in pieces:
            flat.extend(_pieces_of(p))
        intervals, atoms = _normalize(flat, cap)
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_sorted", None)

    # constructors

    @classmethod
    def empty(cls) -> "ZeroSet":
        return cls()

    @classmethod
    def everything(cls) -> "ZeroSet":
        return cls([Interval(-math.inf, math.inf, False, False)])

    @classmethod
    def closed(cls, lo, hi) -> "ZeroSet":
        return cls([Interval.closed(lo, hi)])

    @classmethod
    def open(cls, lo, hi) -> "ZeroSet":
        return cls([Interval.open(lo, hi)])

    @classmethod
    def points(cls, *xs) -> "ZeroSet":
        return cls([Interval.point(x) for x in xs])

    @classmethod
    def outside(cls, radius) -> "ZeroSet":
        """``{x : |x| > radius}``."""
        return cls([Interval(-math.inf, -as_rational(radius), False, False),
                    Interval(as_rational(radius), math.inf, False, False)])

    # queries

    def _components(self) -> Tuple[List[Interval], List[tuple]]:
        if self._sorted is None:
            merged = sorted(list(self.intervals) + [Interval.point(a) for a in self.atoms], key=_lo_key)
            object.__setattr__(self, "_sorted", (merged, [_lo_key(c) for c in merged]))
        return self._sorted

    def pieces(self) -> Iterator[Interval]:
        """All connected components in increasing order, atoms as points."""
        return iter(self._components()[0])

    def is_empty(self) -> bool:
        return not self.intervals and not self.atoms

    def __len__(self) -> int:
        return len(self.intervals) + len(self.atoms)

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        return any(x in iv for iv in self.intervals) or x in self.atoms

    def contains(self, piece: Piece) -> bool:
        """True iff every point of ``piece`` belongs to this set."""
        mine, keys = self._components()
        for part in _pieces_of(piece):
            # the only candidate is the last component starting at or before part
            k = bisect.bisect_right(keys, _lo_key(part)) - 1
            if k < 0 or not mine[k].covers(part):
                return False
        return True

    def meets(self, other: "ZeroSet") -> bool:
        """Whether the two sets share at least one point."""
        return not self.intersect(other).is_empty()

    issuperset = contains

    def issubset(self, other: "ZeroSet") -> bool:
        return other.contains(self)

    # algebra

    def insert(self, piece: Piece) -> "ZeroSet":
        return ZeroSet(list(self.pieces()) + _pieces_of(piece))

    union = insert
    __or__ = insert

    def translate(self, t) -> "ZeroSet":
        t = as_rational(t)
        return ZeroSet(Interval(iv.lo + t, iv.hi + t, iv.lo_closed, iv.hi_closed)
                       for iv in self.pieces())

    def scale(self, s) -> "ZeroSet":
        s = as_rational(s)
        if s == 0:
            raise ZeroScale("scale factor must be nonzero")
        out = []
        for iv in self.pieces():
            if s > 0:
                out.append(Interval(iv.lo * s, iv.hi * s, iv.lo_closed, iv.hi_closed))
            else:
                out.append(Interval(iv.hi * s, iv.lo * s, iv.hi_closed, iv.lo_closed))
        return ZeroSet(out)

    def reflect(self) -> "ZeroSet":
        return self.scale(-1)

    def intersect(self, other: "ZeroSet") -> "ZeroSet":
        a, b = list(self.pieces()), list(other.pieces())
        out: List[Interval] = []
        i = j = 0
        while i < len(a) and j < len(b):
            x, y = a[i], b[j]
            if x.lo > y.lo or (x.lo == y.lo and not x.lo_closed):
                lo, lo_c = x.lo, x.lo_closed and (x.lo != y.lo or y.lo_closed)
            else:
                lo, lo_c = y.lo, y.lo_closed and (x.lo != y.lo or x.lo_closed)
            if x.hi < y.hi or (x.hi == y.hi and not x.hi_closed):
                hi, hi_c = x.hi, x.hi_closed and (x.hi != y.hi or y.hi_closed)
                i += 1
            else:
                hi, hi_c = y.hi, y.hi_closed and (x.hi != y.hi or x.hi_closed)
                j += 1
            if lo < hi or (lo == hi and lo_c and hi_c):
                out.append(Interval(lo, hi, lo_c, hi_c))
        return ZeroSet(out)

    __and__ = intersect

    def symmetrize(self) -> "ZeroSet":
        return self.insert(self.reflect())

    def is_symmetric(self) -> bool:
        return self == self.reflect()

    def __repr__(self) -> str:
        return f"ZeroSet({str(self)!r})"

    def __str__(self) -> str:
        if self.is_empty():
            return "{}"
        return " U ".join(str(p) for p in self.pieces())

    # serialization

    def to_json(self) -> dict:
        return {
            "intervals": [
                {"lo": {"val": _fmt_json(iv.lo), "closed": iv.lo_closed},
                 "hi": {"val": _fmt_json(iv.hi), "closed": iv.hi_closed}}
                for iv in self.intervals
            ],
            "atoms": [format_rational(a) for a in self.atoms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ZeroSet":
        pieces = [
            Interval(_parse_json(d["lo"]["val"]), _parse_json(d["hi"]["val"]),
                     bool(d["lo"]["closed"]), bool(d["hi"]["closed"]))
            for d in data.get("intervals", [])
        ]
        pieces += [Interval.point(as_rational(a)) for a in data.get("atoms", [])]
        return cls(pieces)


def _fmt_json(x: Real) -> str:
    if isinstance(x, float):
        return "-inf" if x < 0 else "inf"
    return format_rational(x)


def _parse_json(text: str) -> Real:
    if text == "inf":
        return math.inf
    if text == "-inf":
        return -math.inf
    return as_rational(text)


def goal_reached(zs: ZeroSet, q) -> bool:
    """Whether ``(0, q)`` or ``(-q, 0)`` lies inside ``zs``."""
    q = as_rational(q)
    return zs.contains(Interval.open(0, q)) or zs.contains(Interval.open(-q, 0))
