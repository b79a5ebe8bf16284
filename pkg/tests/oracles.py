"""Independent brute-force oracles for expected values.

These deliberately avoid the package's internal representations: jump
sequences come from a list-scan enumeration, fibers from materializing every
piece of every copy, unions from sorting, the MST from a quadratic Prim, and
connectivity from a plain disjoint-set union. They exist to compute and to
cross-check expected values, not to be fast.
"""

import itertools
import math
from fractions import Fraction


def ternary_digits(q: Fraction, count: int) -> list[int]:
    """First `count` greedy base-3 digits of q in [0, 1]."""
    digits = []
    num, den = q.numerator, q.denominator
    for _ in range(count):
        num *= 3
        d = num // den
        digits.append(d)
        num -= d * den
    return digits


def cantor_member_oracle(q: Fraction, depth: int = 300) -> bool:
    """Membership by interval refinement: q must never fall in a middle gap.

    Sound for rationals whose digit pre-period plus period fits in `depth`,
    which covers every value these tests feed it.
    """
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(depth):
        w = (hi - lo) / 3
        if q <= lo + w:
            hi = lo + w
        elif q >= hi - w:
            lo = hi - w
        else:
            return False
    return True


def endpoint_zero_oracle(bits) -> Fraction:
    return sum((Fraction(2 * b, 3 ** (k + 1)) for k, b in enumerate(bits)), Fraction(0))


def words_length_lex(max_len):
    for n in range(max_len + 1):
        for bits in itertools.product((0, 1), repeat=n):
            yield bits


def jump_points_oracle(count: int) -> list[Fraction]:
    """Quarter-offset proposals, deduplicated with a list scan."""
    out: list[Fraction] = []
    for bits in words_length_lex(32):
        v = endpoint_zero_oracle(bits) + Fraction(1, 4) / 3 ** len(bits)
        if v not in out:
            out.append(v)
        if len(out) == count:
            return out
    raise AssertionError("not enough words")


def f_value_oracle(c: Fraction, count: int) -> Fraction:
    return sum(
        (Fraction(1, 2 ** (n + 1)) for n, d in enumerate(jump_points_oracle(count)) if d < c),
        Fraction(0),
    )


def copy_pieces_oracle(copy, count: int):
    """(plateaus, jumps) of a placed copy, rebuilt from first principles."""
    pts = jump_points_oracle(count)
    order = sorted(range(count), key=lambda m: pts[m])
    locations = [pts[m] for m in order]
    values = [Fraction(0)]
    for m in order:
        values.append(values[-1] + Fraction(1, 2 ** (m + 1)))
    x0 = endpoint_zero_oracle(copy.rect.address.bits)
    scale = Fraction(1, 3 ** copy.stage)
    a, h = copy.rect.bottom, copy.rect.top - copy.rect.bottom
    bounds = [Fraction(0)] + locations + [Fraction(1)]
    plateaus = [
        (x0 + bounds[j] * scale, x0 + bounds[j + 1] * scale, a + h * values[j])
        for j in range(count + 1)
    ]
    jumps = [
        (x0 + locations[j] * scale, a + h * values[j], a + h * values[j + 1])
        for j in range(count)
    ]
    return plateaus, jumps


def trace_oracle(state, c: Fraction, lo: Fraction, hi: Fraction):
    """Fiber crossings by materializing and scanning every piece of every copy."""
    out = []
    for cid, copy in enumerate(state.copies):
        plateaus, jumps = copy_pieces_oracle(copy, state.n_jumps)
        hit = None
        for jc, jlo, jhi in jumps:
            if jc == c:
                hit = ("segment", jlo, jhi)
        if hit is None:
            for plo, phi, v in plateaus:
                if plo <= c <= phi:
                    hit = ("point", v, v)
                    break
        if hit is None:
            continue
        assert hit[0] == "point", f"oracle trace hit a jump column at {c}"
        if lo <= hit[1] <= hi:
            out.append((hit[1], cid))
    return sorted(out)


def band_union_gap_oracle(bands, lo: Fraction, hi: Fraction) -> Fraction:
    """Uncovered measure of [lo, hi] after removing closed bands."""
    covered = Fraction(0)
    cur = None
    for x, y in sorted(bands):
        x, y = max(x, lo), min(y, hi)
        if y < x:
            continue
        if cur is None:
            cur = [x, y]
        elif x > cur[1]:
            covered += cur[1] - cur[0]
            cur = [x, y]
        else:
            cur[1] = max(cur[1], y)
    if cur is not None:
        covered += cur[1] - cur[0]
    return (hi - lo) - covered


def mst_edges_oracle(points) -> list[float]:
    """Quadratic Prim over the full graph, plain Python floats."""
    m = len(points)
    if m <= 1:
        return []
    in_tree = [False] * m
    best = [math.inf] * m
    in_tree[0] = True
    cur = 0
    edges = []
    for _ in range(m - 1):
        cx, cy = points[cur]
        for i in range(m):
            if not in_tree[i]:
                d = math.hypot(points[i][0] - cx, points[i][1] - cy)
                if d < best[i]:
                    best[i] = d
        nxt = min((i for i in range(m) if not in_tree[i]), key=lambda i: best[i])
        edges.append(best[nxt])
        in_tree[nxt] = True
        best[nxt] = math.inf
        cur = nxt
    return edges


class DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def components_oracle(points, eps: float) -> int:
    """Epsilon-chain components by all-pairs union-find."""
    m = len(points)
    dsu = DSU(m)
    for i in range(m):
        for j in range(i + 1, m):
            if math.hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]) <= eps:
                dsu.union(i, j)
    return len({dsu.find(i) for i in range(m)})


def diameter_oracle(points) -> float:
    best = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = max(
                best,
                math.hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]),
            )
    return best
