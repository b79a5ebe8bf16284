"""Exact rational arithmetic and middle-thirds Cantor set combinatorics.

Every coordinate in the construction is a ``fractions.Fraction``; nothing in
this module (or any module that builds on it) rounds. Addresses are finite
binary words naming the canonical clopen basis pieces of the Cantor set, and
the two endpoint maps realize the usual base-3 coding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import NotInCantor, OutOfRange

# The one numeric type of the core.
Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rational_from_str(text: str) -> Fraction:
    """Parse a "p/q" (or bare integer) string into an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def rational_to_str(q: Fraction) -> str:
    """Serialize in lowest terms as "p/q" ("0/1" for zero)."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Address:
    """A finite binary word addressing the basic clopen set B(sigma).

    The empty word addresses the whole Cantor set.
    """

    bits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"address bits must be 0/1: {self.bits!r}")

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @classmethod
    def parse(cls, text: str) -> "Address":
        if text and set(text) - {"0", "1"}:
            raise ValueError(f"address string must be bits: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    def child(self, bit: int) -> "Address":
        return Address(self.bits + (bit,))

    def prefix(self, length: int) -> "Address":
        return Address(self.bits[:length])

    def is_prefix_of(self, other: "Address") -> bool:
        return self.bits == other.bits[: len(self.bits)]

    def length_lex_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.bits), self.bits)


def addresses_of_length(n: int) -> Iterator[Address]:
    """All addresses of length n in lexicographic order."""
    for bits in itertools.product((0, 1), repeat=n):
        yield Address(bits)


def addresses_length_lex(max_length: int | None = None) -> Iterator[Address]:
    """All addresses in length-then-lexicographic order (the canonical order)."""
    n = 0
    while max_length is None or n <= max_length:
        yield from addresses_of_length(n)
        n += 1


def endpoint_zero(sigma: Address) -> Fraction:
    """Left endpoint of B(sigma): sum of 2*sigma(k) / 3^(k+1)."""
    num = 0
    for b in sigma.bits:
        num = num * 3 + 2 * b
    return Fraction(num, 3 ** len(sigma))


def endpoint_one(sigma: Address) -> Fraction:
    """Right endpoint of B(sigma): endpoint_zero(sigma) + 3^-|sigma|."""
    return endpoint_zero(sigma) + Fraction(1, 3 ** len(sigma))


@dataclass(frozen=True)
class BasicInterval:
    """[0(sigma), 1(sigma)], the footprint of a basic clopen piece of C."""

    address: Address
    left: Fraction
    right: Fraction

    @classmethod
    def from_address(cls, sigma: Address) -> "BasicInterval":
        return cls(sigma, endpoint_zero(sigma), endpoint_one(sigma))

    def contains(self, q: Fraction) -> bool:
        return self.left <= q <= self.right


def cantor_member(q: Fraction) -> bool:
    """Exact decision procedure for q in C.

    Walks the greedy ternary expansion; a rational's expansion is eventually
    periodic, so the walk is finite. A digit 1 is tolerated only when the
    remaining tail is exactly zero, i.e. when the alternative expansion
    ending in repeating 2s avoids the digit 1.
    """
    if q < 0 or q > 1:
        raise OutOfRange(f"cantor_member expects 0 <= q <= 1, got {q}")
    x = q
    seen: set[Fraction] = set()
    while True:
        if x == 0 or x == 1:
            return True
        x3 = 3 * x
        digit = int(x3)  # floor; x in (0, 1) so digit in {0, 1, 2}
        if digit == 1:
            return x3 == 1
        x = x3 - digit
        if x in seen:
            return True
        seen.add(x)


def locate(q: Fraction, depth: int) -> Address:
    """The unique address of length `depth` whose basic interval contains q.

    At a shared endpoint the interval having q as its *left* endpoint wins.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if not cantor_member(q):
        raise NotInCantor(f"{q} is not in the Cantor set")
    bits = []
    lo = ZERO
    for k in range(depth):
        third = Fraction(1, 3 ** (k + 1))
        if q >= lo + 2 * third:
            bits.append(1)
            lo = lo + 2 * third
        elif q <= lo + third:
            bits.append(0)
        else:  # unreachable for members of C
            raise NotInCantor(f"{q} fell into a middle gap at depth {k + 1}")
    return Address(tuple(bits))


def basic_interval_inside(lo: Fraction, hi: Fraction, max_depth: int = 400) -> Address:
    """An address whose basic interval lies strictly inside the open (lo, hi).

    Breadth-first, so the result is the shallowest (then leftmost) such
    interval; used to produce concrete Cantor points inside open cells.
    Raises ValueError when (lo, hi) contains no Cantor point.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    frontier: list[Address] = [Address()]
    for _ in range(max_depth + 1):
        nxt: list[Address] = []
        for sigma in frontier:
            left, right = endpoint_zero(sigma), endpoint_one(sigma)
            if right <= lo or left >= hi:
                continue
            if left > lo and right < hi:
                return sigma
            nxt.extend((sigma.child(0), sigma.child(1)))
        if not nxt:
            raise ValueError(f"no Cantor point strictly inside ({lo}, {hi})")
        frontier = nxt
    raise ValueError("basic_interval_inside exceeded depth limit")
