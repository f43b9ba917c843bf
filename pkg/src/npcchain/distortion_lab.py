"""Distortion witnesses and growth classification.

Everything measured here is witness-based lower data: the unipotent family
t^n x_k^n t^-n, the conjugates Phi_g(b) of a hyperbolic step, and their
composition along a chain.  Large words are either materialised up to a
letter cap or measured through a grammar-compressed representation that
never stores more than the images of single letters level by level.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .semidirect import MonodromyAction
from .words import FreeAutomorphism, TruncationError, random_word, reduce_array

DEFAULT_CAP = 2 ** 26


# -- unipotent family -----------------------------------------------------------

def example1_automorphism(k: int) -> FreeAutomorphism:
    """phi(x_i) = x_1 x_2 ... x_i, with inverse x_i -> x_{i-1}^-1 x_i."""
    ims = tuple(tuple(range(1, i + 1)) for i in range(1, k + 1))
    inv = ((1,),) + tuple((-(i - 1), i) for i in range(2, k + 1))
    return FreeAutomorphism(ims, inv)


def example1_iterates(k: int, i: int, nmax: int):
    """Yield |phi^n(x_i)| for n = 0..nmax, asserting positivity."""
    phi = example1_automorphism(k)
    w = np.array([i], dtype=np.int32)
    yield 1
    for _ in range(nmax):
        w = phi.apply_array(w)
        if w.size and w.min() <= 0:
            raise AssertionError("unipotent iterate is not a positive word")
        yield int(w.size)


def example1_lengths(k: int, i: int, n: int) -> int:
    if not 1 <= i <= k or n < 0:
        raise ValueError("need 1 <= i <= k and n >= 0")
    *_, last = example1_iterates(k, i, n)
    return last


def example1_recurrence(i: int, nmax: int) -> list[int]:
    """L_n(i) for n = 0..nmax from L_n(1) = 1, L_n(i) = sum_{m<=n} L_m(i-1) + 1 (n >= 1)."""
    L = [1] * (nmax + 1)
    for _ in range(2, i + 1):
        prev = L
        L = [1] + [0] * nmax
        acc = 0
        for n in range(1, nmax + 1):
            acc += prev[n]
            L[n] = acc + 1
    return L


def example1_witness(k: int, n: int) -> tuple[int, int]:
    """(kernel length of t^n x_k^n t^-n, ambient length 3n).

    The kernel element is (phi^n(x_k))^n; phi^n(x_k) is positive so the n
    copies do not cancel.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return n * example1_lengths(k, k, n), 3 * n


def example1_witness_direct(k: int, n: int) -> int:
    """Oracle: build (phi^n(x_k))^n as a word and reduce it."""
    phi = example1_automorphism(k)
    w = np.array([k], dtype=np.int32)
    for _ in range(n):
        w = phi.apply_array(w)
    return int(reduce_array(np.tile(w, n)).size)


# -- growth tables -------------------------------------------------------------

@dataclass
class GrowthRow:
    x: int
    ambient: int
    kernel: int
    truncated: bool = False


@dataclass
class GrowthTable:
    rows: list[GrowthRow] = field(default_factory=list)
    label: str = ""

    def add(self, x, ambient, kernel, truncated=False):
        self.rows.append(GrowthRow(int(x), int(ambient), int(kernel), truncated))

    def usable(self) -> list[GrowthRow]:
        return [r for r in self.rows if not r.truncated]

    def is_monotone(self) -> bool:
        ks = [r.kernel for r in sorted(self.usable(), key=lambda r: r.x)]
        return all(a <= b for a, b in zip(ks, ks[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "kernel_length", "ambient_budget", "truncated"])
        for r in self.rows:
            w.writerow([r.x, r.kernel, r.ambient, int(r.truncated)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "GrowthTable":
        t = cls(label=label)
        for rec in csv.DictReader(io.StringIO(text)):
            t.add(rec["x"], rec["ambient_budget"], rec["kernel_length"], rec.get("truncated", "0") == "1")
        return t


# Thresholds for fit_growth.  A sequence counts as super-polynomial when its
# log-log slope over the top half of the table exceeds ACCEL times the slope
# over the second quarter (polynomials have asymptotically constant log-log
# slope, exponentials have slope growing linearly in x).
ACCEL = 1.4
MIN_SLOPE = 0.05
MAX_DEPTH = 4
MIN_ROWS = 8


class FitError(ValueError):
    pass


def _slope(xs, ys) -> float:
    if len(xs) < 2:
        return 0.0
    return float(np.polyfit(xs, ys, 1)[0])


def _segments(n: int) -> tuple[slice, slice]:
    return slice(n // 4, n // 2 + 1), slice(n // 2, n)


def fit_growth(table: GrowthTable) -> dict:
    rows = sorted(table.usable(), key=lambda r: r.x)
    if len(rows) < MIN_ROWS:
        raise FitError(f"need at least {MIN_ROWS} untruncated rows, got {len(rows)}")
    x = np.array([r.x for r in rows], dtype=float)
    seq = np.array([float(r.kernel) for r in rows])
    lx = np.log(x)
    low, top = _segments(len(rows))
    depth, base = 0, None
    trace = []
    while True:
        if np.any(seq <= 0):
            break
        ly = np.log(seq)
        s_low, s_top = _slope(lx[low], ly[low]), _slope(lx[top], ly[top])
        trace.append({"depth": depth, "slope_second_quarter": s_low, "slope_top_half": s_top})
        superpoly = s_top > ACCEL * max(s_low, MIN_SLOPE)
        if not superpoly or depth >= MAX_DEPTH or np.any(seq <= 1):
            break
        if depth == 0:
            base = math.exp(_slope(x[top], ly[top]))
        seq = ly
        depth += 1
    slope = _slope(lx[top], np.log(seq[top])) if np.all(seq > 0) else float("nan")
    model = "polynomial" if depth == 0 else ("exponential" if depth == 1 else f"exp^{depth}")
    return {"label": table.label, "rows": len(rows), "depth": depth, "slope": slope, "base": base,
            "model": model, "trace": trace,
            "thresholds": {"accel": ACCEL, "min_slope": MIN_SLOPE, "max_depth": MAX_DEPTH, "min_rows": MIN_ROWS},
            "semantics": "witness-based lower data / composed upper model"}


# -- exact lengths of huge reduced words -----------------------------------------

HASH_PRIME = 2 ** 255 - 19


class CompositeTracker:
    """Grammar-compressed images of every letter under a composite of automorphisms.

    Level m stores C_m(z) = reduce(prod over y in Phi_m(z) of C_{m-1}(y)) as a
    list of slices of level m-1 words.  Prefix Horner hashes modulo a 255-bit
    prime, with the matching powers of B, are answered by one descent per
    level, so two slices are compared without expanding them.  Free cancellation between neighbouring slices is the
    longest common prefix of the inverse of the left one (a slice of the image
    of the inverse letter) and the right one; it is found by walking both
    slices chunk by chunk and descending one level at the first unequal chunk.
    Distinct words of length n collide with probability at most n / 2^255
    over the random base.
    """

    def __init__(self, rank: int, seed: int = 0):
        self.rank = rank
        self.P = HASH_PRIME
        self.B = random.Random(seed).randrange(2 ** 64, self.P - 1)
        self.letters = [x for x in range(-rank, rank + 1) if x]
        # level m >= 1: letter -> (segs, cum, prefix hashes, prefix powers,
        # hash of C_{m-1}(y)[0:s] and B^-s for each segment (y, s, e))
        self.levels: list[dict] = [None]
        self._memo: dict = {}

    def code(self, x: int) -> int:
        return x + self.rank + 1

    def length(self, m: int, x: int) -> int:
        return 1 if m == 0 else self.levels[m][x][1][-1]

    def full_hash(self, m: int, x: int) -> int:
        return self.code(x) if m == 0 else self.levels[m][x][2][-1]

    def prefix(self, m: int, x: int, a: int) -> tuple[int, int]:
        """(hash, B^a) of the prefix C_m(x)[0:a]; one descent per level."""
        P = self.P
        if a == 0:
            return 0, 1
        if m == 0:
            return self.code(x), self.B
        segs, cum, ph, pp, hs, ibs = self.levels[m][x]
        if a == cum[-1]:
            return ph[-1], pp[-1]
        i = bisect_right(cum, a) - 1
        off = a - cum[i]
        if off == 0:
            return ph[i], pp[i]
        y, s, _ = segs[i]
        h2, p2 = self.prefix(m - 1, y, s + off)
        # B^off = B^(s+off) / B^s; the hash of C_{m-1}(y)[s:s+off] follows
        bo = p2 * ibs[i] % P
        seg = (h2 - hs[i] * bo) % P
        return (ph[i] * bo + seg) % P, pp[i] * bo % P

    def _slice(self, m: int, x: int, a: int, b: int) -> tuple[int, int, int, int]:
        hb, pb = self.prefix(m, x, b)
        ha, pa = self.prefix(m, x, a)
        return hb, pb, ha, pa

    def sub_hash(self, m: int, x: int, a: int, b: int) -> tuple[int, int]:
        """(hash, B^(b-a)) of C_m(x)[a:b]."""
        if a >= b:
            return 0, 1
        hb, pb, ha, pa = self._slice(m, x, a, b)
        pw = pb * pow(pa, -1, self.P) % self.P
        return (hb - ha * pw) % self.P, pw

    def same(self, m: int, x: int, a: int, y: int, c: int, n: int) -> bool:
        """C_m(x)[a:a+n] == C_m(y)[c:c+n] by hash, without modular inverses."""
        P = self.P
        hb1, pb1, ha1, pa1 = self._slice(m, x, a, a + n)
        hb2, pb2, ha2, pa2 = self._slice(m, y, c, c + n)
        # H(a:b) = hb - ha * pb / pa; cross-multiply by pa1 * pa2
        return (hb1 * pa1 - ha1 * pb1) * pa2 % P == (hb2 * pa2 - ha2 * pb2) * pa1 % P

    def _seg_at(self, m: int, x: int, a: int):
        """Segment of C_m(x) containing position a: (y, start in C_{m-1}(y), end)."""
        segs, cum = self.levels[m][x][0], self.levels[m][x][1]
        i = bisect_right(cum, a) - 1
        y, s, e = segs[i]
        return y, s + a - cum[i], e

    def lcp(self, m: int, x: int, a: int, b: int, y: int, c: int, d: int) -> int:
        """Longest common prefix of C_m(x)[a:b] and C_m(y)[c:d]."""
        n = min(b - a, d - c)
        if n <= 0:
            return 0
        if m == 0:
            return 1 if x == y else 0
        if x == y and a == c:
            return n
        done = 0
        while done < n:
            x1, p, pe = self._seg_at(m, x, a + done)
            y1, q, qe = self._seg_at(m, y, c + done)
            chunk = min(pe - p, qe - q, n - done)
            if (x1 == y1 and p == q) or self.same(m - 1, x1, p, y1, q, chunk):
                done += chunk
                continue
            return done + self.lcp(m - 1, x1, p, p + chunk, y1, q, q + chunk)
        return done

    def cancellation(self, m: int, u: tuple[int, int, int], v: tuple[int, int, int]) -> int:
        """Largest c with C_m(u)[e-c:e] inverse to C_m(v)[s:s+c]."""
        y1, s1, e1 = u
        y2, s2, e2 = v
        L1 = self.length(m, y1)
        full = s1 == 0 and e1 == L1 and s2 == 0 and e2 == self.length(m, y2)
        if full and (m, y1, y2) in self._memo:
            return self._memo[(m, y1, y2)]
        # inverse of C(y1)[s1:e1] is C(-y1)[L1-e1:L1-s1]
        c = self.lcp(m, -y1, L1 - e1, L1 - s1, y2, s2, e2)
        if full:
            self._memo[(m, y1, y2)] = c
        return c

    def compose(self, aut: FreeAutomorphism) -> None:
        """C <- C o aut."""
        m = len(self.levels) - 1
        P = self.P
        level = {}
        for z in self.letters:
            stack: list[list[int]] = []
            for y in aut.apply((z,)):
                cur = [y, 0, self.length(m, y)]
                while stack and cur[1] < cur[2]:
                    top = stack[-1]
                    c = self.cancellation(m, tuple(top), tuple(cur))
                    if c == 0:
                        break
                    top[2] -= c
                    cur[1] += c
                    if top[1] == top[2]:
                        stack.pop()
                    else:
                        break
                if cur[1] < cur[2]:
                    stack.append(cur)
            segs = [tuple(t) for t in stack]
            cum, ph, pp, hs, ibs = [0], [0], [1], [], []
            for y, s, e in segs:
                h0, p0 = self.prefix(m, y, s)
                h1, p1 = self.prefix(m, y, e)
                inv0 = pow(p0, -1, P)
                pw = p1 * inv0 % P
                h = (h1 - h0 * pw) % P
                hs.append(h0)
                ibs.append(inv0)
                ph.append((ph[-1] * pw + h) % P)
                pp.append(pp[-1] * pw % P)
                cum.append(cum[-1] + e - s)
            level[z] = (segs, cum, ph, pp, hs, ibs)
        self.levels.append(level)

    def letter_length(self, x: int) -> int:
        return self.length(len(self.levels) - 1, x)


def _signed_aut(action: MonodromyAction, y: int) -> FreeAutomorphism:
    aut = action.autos[abs(y) - 1]
    return aut if y > 0 else aut.inverse()


def action_power_lengths(action: MonodromyAction, g: Sequence[int], b: int) -> int:
    """|Phi_g(b)| via the prefix composites Phi_{y1} o ... o Phi_{ym}."""
    tr = CompositeTracker(action.kernel_rank)
    for y in g:
        tr.compose(_signed_aut(action, y))
    return tr.letter_length(b)


def action_power_series(action: MonodromyAction, y: int, b: int, mmax: int) -> list[int]:
    """|Phi_y^m(b)| for m = 1..mmax from one tracker."""
    tr = CompositeTracker(action.kernel_rank)
    aut = _signed_aut(action, y)
    out = []
    for _ in range(mmax):
        tr.compose(aut)
        out.append(tr.letter_length(b))
    return out


def action_apply_word(action: MonodromyAction, g: Sequence[int], b: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Materialised Phi_g(b); raises TruncationError past cap letters."""
    w = np.array([b], dtype=np.int32)
    for y in reversed(g):
        aut = action.autos[abs(y) - 1]
        w = (aut if y > 0 else aut.inverse()).apply_array(w, cap=cap)
    return w


def hyperbolic_step_table(action: MonodromyAction, sizes: Sequence[int], samples: int = 4, seed: int = 0,
                          b: int = 1) -> tuple[GrowthTable, list]:
    """Step table: per size m, the minimum of |Phi_g(b)| over sampled g with |g| = m.

    Over a rank-1 base the only reduced words of length m are t^m and t^-m,
    so both are taken and each series comes from a single tracker.
    """
    table = GrowthTable(label="hyperbolic step |Phi_g(b)|")
    detail = []
    sizes = sorted(sizes)
    if action.base_rank == 1:
        top = sizes[-1] if sizes else 0
        series = {y: action_power_series(action, y, b, top) for y in (1, -1)}
        for m in sizes:
            vals = {y: series[y][m - 1] for y in (1, -1)}
            for y in (1, -1):
                detail.append({"g": [y] * m, "length": vals[y]})
            table.add(m, m, min(vals.values()))
        return table, detail
    rng = random.Random(seed)
    for m in sizes:
        gs = {random_word(rng, action.base_rank, m) for _ in range(samples)}
        best = None
        for g in sorted(gs):
            L = action_power_lengths(action, g, b)
            detail.append({"g": list(g), "length": L})
            best = L if best is None else min(best, L)
        table.add(m, m, best)
    return table, detail


def witness_sequence(g1: Sequence[int], chain: Sequence[tuple[MonodromyAction, int]], cap: int = DEFAULT_CAP):
    """g_{i+1} = Phi_i(g_i)(b_{i+1}), materialised; TruncationError past cap."""
    out = [np.asarray(g1, dtype=np.int32)]
    for action, b in chain:
        g = out[-1]
        if g.size and np.abs(g).max() > action.base_rank:
            raise ValueError("witness letters outside the base alphabet")
        out.append(action_apply_word(action, g.tolist(), b, cap))
    return out


def chain_table(k: int, action: MonodromyAction, nmax: int, b: int = 1,
                cap: int = DEFAULT_CAP) -> tuple[GrowthTable, list]:
    """Two-stage chain: unipotent base witness g_1 = (phi^n(x_k))^n, then g_2 = Phi_{g_1}(b).

    Rows carry x = n, the ambient budget 3 * 3n, and |g_2|.  Every length
    comes from the compressed tracker; while g_2 fits under the cap it is
    also built letter by letter and the two counts must agree.
    """
    if action.base_rank != k:
        raise ValueError(f"rank mismatch: base witness lives in F_{k}, step acts by F_{action.base_rank}")
    phi = example1_automorphism(k)
    table = GrowthTable(label=f"chain unipotent(k={k}) -> hyperbolic step")
    info = []
    w = np.array([k], dtype=np.int32)
    tr, done = None, []
    for n in range(1, nmax + 1):
        w = phi.apply_array(w)
        g1 = np.tile(w, n).tolist()
        if tr is None or g1[: len(done)] != done:
            tr, done = CompositeTracker(action.kernel_rank), []
        for y in g1[len(done):]:
            tr.compose(_signed_aut(action, y))
        done = g1
        L = tr.letter_length(b)
        mode = "tracked"
        built = None
        if L <= cap:
            try:
                built = int(action_apply_word(action, g1, b, cap).size)
            except TruncationError:
                pass  # an intermediate image overran the cap
        if built is not None:
            if built != L:
                raise AssertionError(f"tracker gives {L}, built word has {built} letters at n={n}")
            mode = "built"
        table.add(n, 9 * n, L)
        info.append({"n": n, "g1_length": len(g1), "g2_length": L, "mode": mode})
    return table, info


def upper_model_check(table: GrowthTable, base_lengths: Sequence[int], lipschitz: int) -> dict:
    """One-sided check |g_2| <= lipschitz^{|g_1|}: the composite of the base
    witness length with the crude exponential upper model of one step."""
    bad = []
    for r, g1 in zip(sorted(table.usable(), key=lambda r: r.x), base_lengths):
        bound_log = g1 * math.log(lipschitz)
        if math.log(max(r.kernel, 1)) > bound_log + 1e-9:
            bad.append(r.x)
    return {"passed": not bad, "violations": bad, "lipschitz": lipschitz}


def fit_report_json(fit: dict) -> str:
    return json.dumps(fit, indent=2, sort_keys=True)
