"""Formal sums of shifted vertex generators and three-valued verdicts."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Tri:
    verdict: Verdict
    certificate: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def yes(self) -> bool:
        return self.verdict is Verdict.YES

    @property
    def no(self) -> bool:
        return self.verdict is Verdict.NO

    @property
    def unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN

    @classmethod
    def of(cls, flag: bool, **certificate) -> "Tri":
        return cls(Verdict.YES if flag else Verdict.NO, certificate)


def YES(**cert) -> Tri:
    return Tri(Verdict.YES, cert)


def NO(**cert) -> Tri:
    return Tri(Verdict.NO, cert)


def UNKNOWN(**cert) -> Tri:
    return Tri(Verdict.UNKNOWN, cert)


class MonoidExpr:
    """An element of the free commutative monoid on generators ``v(i)``.

    Immutable; zero multiplicities are never stored, so the empty expression
    is the monoid zero.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[str, int], int] | Iterable[tuple[tuple[str, int], int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[str, int], int] = {}
        for (v, lvl), k in items:
            if k < 0:
                raise ValueError(f"negative multiplicity for {v}({lvl})")
            if k:
                key = (str(v), int(lvl))
                acc[key] = acc.get(key, 0) + int(k)
        self._terms = acc
        self._hash = None

    @classmethod
    def gen(cls, v: str, level: int = 0, mult: int = 1) -> "MonoidExpr":
        return cls({(v, level): mult})

    @classmethod
    def sum(cls, exprs: Iterable["MonoidExpr"]) -> "MonoidExpr":
        acc: dict[tuple[str, int], int] = {}
        for x in exprs:
            for key, k in x._terms.items():
                acc[key] = acc.get(key, 0) + k
        return cls(acc)

    @property
    def terms(self) -> dict[tuple[str, int], int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[str, int], int]]:
        return iter(sorted(self._terms.items()))

    def vertices(self) -> set[str]:
        return {v for v, _ in self._terms}

    def levels(self) -> list[int]:
        return sorted({lvl for _, lvl in self._terms})

    def size(self) -> int:
        return sum(self._terms.values())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: "MonoidExpr") -> "MonoidExpr":
        return MonoidExpr.sum((self, other))

    def __mul__(self, k: int) -> "MonoidExpr":
        return MonoidExpr({key: m * k for key, m in self._terms.items()})

    __rmul__ = __mul__

    def shift(self, n: int) -> "MonoidExpr":
        return MonoidExpr({(v, lvl + n): k for (v, lvl), k in self._terms.items()})

    def forget(self) -> dict[str, int]:
        """Image under the forgetful map to the level-free monoid."""
        out: dict[str, int] = {}
        for (v, _), k in self._terms.items():
            out[v] = out.get(v, 0) + k
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonoidExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (v, lvl), k in self.items():
            term = v if lvl == 0 else f"{v}({lvl})"
            parts.append(term if k == 1 else f"{k}*{term}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MonoidExpr({str(self)!r})"


def shift(x: MonoidExpr, n: int) -> MonoidExpr:
    return x.shift(n)


# vertex identifiers may not contain whitespace or any of + * ( ) ,
_TERM = re.compile(
    r"\s*(?:(?P<mult>\d+)\s*\*\s*)?(?P<vertex>[^\s+*(),]+)"
    r"(?:\s*\(\s*(?P<level>[+-]?\d+)\s*\))?\s*$")


def parse_expr(text: str, vertices: Iterable[str] | None = None) -> MonoidExpr:
    """Parse ``2*v(1) + w(-3)``-style sums; ``0`` is the zero element.

    When ``vertices`` is given, unknown vertex names are rejected.
    """
    text = text.strip()
    if text == "0":
        return MonoidExpr()
    if not text:
        raise ValueError("empty expression")
    known = set(vertices) if vertices is not None else None
    acc: dict[tuple[str, int], int] = {}
    for chunk in text.split("+"):
        m = _TERM.match(chunk)
        if m is None:
            raise ValueError(f"cannot parse term {chunk.strip()!r}")
        v = m["vertex"]
        if known is not None and v not in known:
            raise ValueError(f"unknown vertex {v!r}")
        mult = int(m["mult"]) if m["mult"] else 1
        if mult == 0:
            continue
        key = (v, int(m["level"]) if m["level"] else 0)
        acc[key] = acc.get(key, 0) + mult
    return MonoidExpr(acc)
