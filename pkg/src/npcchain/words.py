"""Free group words and automorphisms.

Letters are nonzero integers: ``i`` is the i-th generator (1-based) and
``-i`` its inverse.  Small words are tuples; the large words met in
distortion experiments are numpy ``int32`` arrays reduced by a compiled
stack scan.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from numba import njit

Word = tuple[int, ...]


class AlphabetError(ValueError):
    pass


class TruncationError(RuntimeError):
    """A word would exceed the configured letter cap."""


def reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def multiply(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def power(word: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inverse(word), -n)
    return multiply(*([word] * n))


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1)) and 0 not in word


def random_word(rng: random.Random, rank: int, length: int) -> Word:
    """Uniform reduced word of the given length."""
    out: list[int] = []
    while len(out) < length:
        x = rng.choice([i for i in range(-rank, rank + 1) if i])
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)


@njit(cache=True)
def _reduce_array(arr):
    out = np.empty_like(arr)
    top = 0
    for x in arr:
        if top > 0 and out[top - 1] == -x:
            top -= 1
        else:
            out[top] = x
            top += 1
    return out[:top].copy()


def reduce_array(arr: np.ndarray) -> np.ndarray:
    return _reduce_array(np.ascontiguousarray(arr, dtype=np.int32))


@dataclass(frozen=True)
class FreeWord:
    letters: Word
    rank: int

    def __post_init__(self):
        if any(x == 0 or abs(x) > self.rank for x in self.letters):
            raise AlphabetError(f"letter outside rank {self.rank}")
        object.__setattr__(self, "letters", reduce(self.letters))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if other.rank != self.rank:
            raise AlphabetError("rank mismatch")
        return FreeWord(multiply(self.letters, other.letters), self.rank)

    def inverse(self) -> "FreeWord":
        return FreeWord(inverse(self.letters), self.rank)

    def __len__(self):
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters


@dataclass(frozen=True)
class FreeAutomorphism:
    """Endomorphism of F_rank given by generator images, with optional inverse."""

    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...] | None = None

    @property
    def rank(self) -> int:
        return len(self.images)

    @cached_property
    def _signed(self) -> dict[int, Word]:
        out = {}
        for i, w in enumerate(self.images, 1):
            out[i] = w
            out[-i] = inverse(w)
        return out

    def apply(self, word: Sequence[int]) -> Word:
        sig = self._signed
        try:
            return multiply(*(sig[x] for x in word))
        except KeyError as exc:
            raise AlphabetError(f"letter {exc} outside rank {self.rank}") from None

    def __call__(self, word):
        if isinstance(word, FreeWord):
            if word.rank != self.rank:
                raise AlphabetError("rank mismatch")
            return FreeWord(self.apply(word.letters), self.rank)
        return self.apply(word)

    def inverse(self) -> "FreeAutomorphism":
        if self.inverse_images is None:
            raise ValueError("no inverse recorded")
        return FreeAutomorphism(self.inverse_images, self.images)

    def compose(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        """self after other."""
        inv = None
        if self.inverse_images is not None and other.inverse_images is not None:
            inv = tuple(FreeAutomorphism(other.inverse_images).apply(w) for w in self.inverse_images)
        return FreeAutomorphism(tuple(self.apply(w) for w in other.images), inv)

    def verify_inverse(self) -> bool:
        if self.inverse_images is None:
            return False
        inv = FreeAutomorphism(self.inverse_images)
        for i in range(1, self.rank + 1):
            if self.apply(inv.apply((i,))) != (i,) or inv.apply(self.apply((i,))) != (i,):
                return False
        return True

    def total_length(self) -> int:
        return sum(len(w) for w in self.images)

    @cached_property
    def _table(self):
        # images of letters -rank..rank packed into one flat array
        r = self.rank
        pieces, starts, lens = [], np.zeros(2 * r + 1, np.int64), np.zeros(2 * r + 1, np.int64)
        pos = 0
        for x in range(-r, r + 1):
            w = self._signed.get(x, ())
            starts[x + r] = pos
            lens[x + r] = len(w)
            pieces.append(np.asarray(w, dtype=np.int32))
            pos += len(w)
        return np.concatenate(pieces) if pos else np.zeros(0, np.int32), starts, lens

    def apply_array(self, word: np.ndarray, cap: int | None = None) -> np.ndarray:
        """Image of a large word, reduced; raises TruncationError past cap letters."""
        flat, starts, lens = self._table
        codes = np.asarray(word, dtype=np.int64) + self.rank
        ls = lens[codes]
        total = int(ls.sum())
        if cap is not None and total > cap:
            # the unreduced image already exceeds the cap
            raise TruncationError(f"unreduced image has {total} letters")
        if total == 0:
            return np.zeros(0, np.int32)
        offs = np.cumsum(ls) - ls
        idx = np.repeat(starts[codes] - offs, ls) + np.arange(total)
        out = reduce_array(flat[idx])
        if cap is not None and len(out) > cap:
            raise TruncationError(f"image has {len(out)} letters, cap is {cap}")
        return out


def identity(rank: int) -> FreeAutomorphism:
    ims = tuple((i,) for i in range(1, rank + 1))
    return FreeAutomorphism(ims, ims)


# -- text I/O ------------------------------------------------------------------

def format_word(word: Sequence[int], names: Sequence[str]) -> str:
    if not word:
        return "1"
    return " ".join(names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in word)


def parse_word(text: str, names: Sequence[str]) -> Word:
    lookup = {n: i for i, n in enumerate(names, 1)}
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.split():
        inv = tok.endswith("^-1")
        name = tok[:-3] if inv else tok
        if name not in lookup:
            raise AlphabetError(f"unknown generator {name!r}")
        out.append(-lookup[name] if inv else lookup[name])
    return reduce(out)


_MONO_LINE = re.compile(r"^(\S+): (\S+) -> (.*)$")


def dump_monodromy(autos: dict[str, FreeAutomorphism], names: Sequence[str],
                   inverses: bool = True) -> str:
    """Lines "t_j: a -> word", then "t_j^-1: a -> word" for recorded inverses."""
    lines = ["# kernel basis: " + " ".join(names)]
    for t, aut in autos.items():
        for i, w in enumerate(aut.images):
            lines.append(f"{t}: {names[i]} -> {format_word(w, names)}")
    if inverses:
        for t, aut in autos.items():
            if aut.inverse_images is not None:
                for i, w in enumerate(aut.inverse_images):
                    lines.append(f"{t}^-1: {names[i]} -> {format_word(w, names)}")
    return "\n".join(lines) + "\n"


def load_monodromy(text: str) -> tuple[dict[str, FreeAutomorphism], list[str]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# kernel basis: "):
        raise ValueError("missing kernel basis header")
    names = lines[0][len("# kernel basis: "):].split()
    fwd: dict[str, list] = {}
    bwd: dict[str, list] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        m = _MONO_LINE.match(line)
        if not m:
            raise ValueError(f"bad monodromy line {line!r}")
        t, a, w = m.groups()
        target = bwd if t.endswith("^-1") else fwd
        t = t[:-3] if t.endswith("^-1") else t
        target.setdefault(t, [None] * len(names))[names.index(a)] = parse_word(w, names)
    autos = {}
    for t, ims in fwd.items():
        inv = bwd.get(t)
        autos[t] = FreeAutomorphism(tuple(ims), tuple(inv) if inv else None)
    return autos, names
