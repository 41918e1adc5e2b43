"""Formal direct-sum decompositions and their little expression grammar.

A ModuleExpr is a finite multiset of (indecomposable id, shift) pairs with
positive multiplicities, kept in a canonical sorted form; the empty multiset
is the zero module.  The concrete grammar, used by the CLI and in witness
files:

    SUM  := TERM ('+' TERM)*
    TERM := ID ('(' INT ')')? ('^' POSINT)?

e.g. ``Rfree(-1) + Lplus^2``.  ``0`` denotes the zero module.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class ExprParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class ModuleExpr:
    ring: str
    summands: tuple[tuple[str, int, int], ...]  # (vertex id, shift, multiplicity)

    @staticmethod
    def make(ring: str, items) -> ModuleExpr:
        acc: dict[tuple[str, int], int] = {}
        for item in items:
            if len(item) == 2:
                (v, s), m = item, 1
            else:
                v, s, m = item
            if m < 0:
                raise ValueError("negative multiplicity")
            if m:
                acc[(v, s)] = acc.get((v, s), 0) + m
        return ModuleExpr(
            ring, tuple((v, s, m) for (v, s), m in sorted(acc.items()) if m > 0)
        )

    @staticmethod
    def zero(ring: str) -> ModuleExpr:
        return ModuleExpr(ring, ())

    def is_zero(self) -> bool:
        return not self.summands

    def multiplicity(self, vertex: str, shift: int) -> int:
        for v, s, m in self.summands:
            if v == vertex and s == shift:
                return m
        return 0

    def total(self) -> int:
        return sum(m for _, _, m in self.summands)

    def pairs(self):
        """Iterate (vertex, shift) with multiplicity expanded away."""
        for v, s, m in self.summands:
            for _ in range(m):
                yield (v, s)

    def add(self, other: ModuleExpr) -> ModuleExpr:
        if self.ring != other.ring:
            raise ValueError("direct sum across rings")
        return ModuleExpr.make(self.ring, list(self.summands) + list(other.summands))

    def scale(self, k: int) -> ModuleExpr:
        return ModuleExpr.make(self.ring, [(v, s, m * k) for v, s, m in self.summands])

    def shift(self, n: int) -> ModuleExpr:
        return ModuleExpr.make(self.ring, [(v, s + n, m) for v, s, m in self.summands])

    def subtract(self, other: ModuleExpr) -> ModuleExpr:
        """Multiset difference; raises if other is not a sub-multiset."""
        acc = {(v, s): m for v, s, m in self.summands}
        for v, s, m in other.summands:
            have = acc.get((v, s), 0)
            if have < m:
                raise ValueError(f"{other.format()} is not a summand of {self.format()}")
            acc[(v, s)] = have - m
        return ModuleExpr.make(self.ring, [(v, s, m) for (v, s), m in acc.items()])

    def common(self, other: ModuleExpr) -> ModuleExpr:
        acc = {(v, s): m for v, s, m in self.summands}
        out = []
        for v, s, m in other.summands:
            k = min(m, acc.get((v, s), 0))
            if k:
                out.append((v, s, k))
        return ModuleExpr.make(self.ring, out)

    def restrict(self, keep) -> ModuleExpr:
        return ModuleExpr.make(
            self.ring, [(v, s, m) for v, s, m in self.summands if keep(v, s)]
        )

    def format(self) -> str:
        if not self.summands:
            return "0"
        parts = []
        for v, s, m in self.summands:
            t = v if s == 0 else f"{v}({s})"
            if m > 1:
                t += f"^{m}"
            parts.append(t)
        return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<num>-?\d+)|(?P<sym>[()^+]))")


def parse_module_expr(ring: str, text: str, known_ids=None) -> ModuleExpr:
    """Parse the SUM grammar; raises ExprParseError with a position on failure."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start() or (m.lastgroup is None):
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprParseError(f"unexpected character {stripped[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    if not tokens:
        raise ExprParseError("empty expression", 0)
    if len(tokens) == 1 and tokens[0][1] == "0":
        return ModuleExpr.zero(ring)

    items: list[tuple[str, int, int]] = []
    i = 0
    unknown: list[str] = []

    def expect(kind, value=None):
        nonlocal i
        if i >= len(tokens):
            raise ExprParseError("unexpected end of expression", len(text))
        k, v, p = tokens[i]
        if k != kind or (value is not None and v != value):
            raise ExprParseError(f"expected {value or kind}, found {v!r}", p)
        i += 1
        return v, p

    while True:
        name, p = expect("id")
        if known_ids is not None and name not in known_ids:
            unknown.append(name)
        shift = 0
        mult = 1
        if i < len(tokens) and tokens[i][:2] == ("sym", "("):
            i += 1
            num, _ = expect("num")
            shift = int(num)
            expect("sym", ")")
        if i < len(tokens) and tokens[i][:2] == ("sym", "^"):
            i += 1
            num, np = expect("num")
            mult = int(num)
            if mult < 1:
                raise ExprParseError("multiplicity must be positive", np)
        items.append((name, shift, mult))
        if i >= len(tokens):
            break
        expect("sym", "+")
    if unknown:
        raise ExprParseError(
            "unknown ids: " + ", ".join(sorted(set(unknown))), 0
        )
    return ModuleExpr.make(ring, items)
