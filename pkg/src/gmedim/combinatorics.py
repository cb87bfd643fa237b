"""Index sets of the criteria: bipartitions, m-subsets, ordered pairs, swap sets.

Party subsets are bitmasks of width ``n`` with party ``i`` (1-based) on bit
``i - 1``. Every enumeration is returned in ascending mask order.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from .errors import InvalidBipartitionError, ParameterError


@dataclass(frozen=True, order=True)
class PartySubset:
    mask: int
    n: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.mask < (1 << self.n):
            raise ParameterError(f"mask {self.mask:#b} does not fit n={self.n}")

    @classmethod
    def of(cls, members, n: int) -> "PartySubset":
        mask = 0
        for p in members:
            if not 1 <= p <= n:
                raise ParameterError(f"party {p} out of range 1..{n}")
            mask |= 1 << (p - 1)
        return cls(mask, n)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, party: int) -> bool:
        return bool(self.mask >> (party - 1) & 1)

    def complement(self) -> "PartySubset":
        return PartySubset(((1 << self.n) - 1) ^ self.mask, self.n)

    def __and__(self, other: "PartySubset") -> "PartySubset":
        return PartySubset(self.mask & other.mask, self.n)

    def __or__(self, other: "PartySubset") -> "PartySubset":
        return PartySubset(self.mask | other.mask, self.n)

    def __sub__(self, other: "PartySubset") -> "PartySubset":
        return PartySubset(self.mask & ~other.mask, self.n)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class SigmaPair:
    alpha: PartySubset
    beta: PartySubset


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including 0 and ``mask``, ascending."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def _check_n(n: int) -> None:
    if n < 2:
        raise ParameterError(f"need n >= 2 parties, got {n}")


def _check_m(n: int, m: int) -> None:
    _check_n(n)
    if not 1 <= m <= n // 2:
        raise ParameterError(f"m={m} outside 1..{n // 2} for n={n}")


def bipartition_masks(n: int) -> list[int]:
    _check_n(n)
    # sides not containing party n are exactly the nonzero masks below bit n-1
    return list(range(1, 1 << (n - 1)))


def bipartitions(n: int) -> list[PartySubset]:
    """One side of every unordered bipartition: the side without party ``n``."""
    return [PartySubset(a, n) for a in bipartition_masks(n)]


def m_subset_masks(n: int, m: int) -> list[int]:
    _check_m(n, m)
    return [a for a in range(1 << n) if a.bit_count() == m]


def m_subsets(n: int, m: int) -> list[PartySubset]:
    return [PartySubset(a, n) for a in m_subset_masks(n, m)]


def sigma_mask_pairs(n: int, m: int) -> list[tuple[int, int]]:
    subsets = m_subset_masks(n, m)
    return [(a, b) for a in subsets for b in subsets if (a & b).bit_count() == m - 1]


def sigma_pairs(n: int, m: int) -> list[SigmaPair]:
    """Ordered pairs of m-subsets sharing exactly ``m - 1`` parties."""
    return [SigmaPair(PartySubset(a, n), PartySubset(b, n)) for a, b in sigma_mask_pairs(n, m)]


def sigma_count(n: int, m: int) -> int:
    return comb(n, m) * m * (n - m)


def delta_masks(alpha: int, beta: int, k: int, l: int, n: int) -> list[int]:
    full = (1 << n) - 1
    if k == l:
        return [alpha]
    free = full ^ ((alpha & ~beta) if k < l else (beta & ~alpha))
    return [s for s in submasks(free) if s and s != free]


def delta_sets(alpha: PartySubset, beta: PartySubset, k: int, l: int, n: int) -> list[PartySubset]:
    """Party sets exchanged between the two copies for the term ``(alpha, beta, k, l)``.

    ``[alpha]`` when ``k == l``; otherwise the nonempty proper subsets of the
    complement of ``alpha - beta`` (``k < l``) or of ``beta - alpha``
    (``k > l``).
    """
    m = len(alpha)
    if alpha.n != n or beta.n != n or len(beta) != m or m == 0 or len(alpha & beta) != m - 1:
        raise ParameterError(f"({alpha!r}, {beta!r}) is not an admissible pair for n={n}")
    if k < 0 or l < 0:
        raise ParameterError("level indices must be nonnegative")
    return [PartySubset(s, n) for s in delta_masks(alpha.mask, beta.mask, k, l, n)]


def n_d(d: int, m: int, n: int) -> int:
    """Weight of the diagonal correction, ``(d-1) m (n-m-1)``."""
    return (d - 1) * m * (n - m - 1)


def validate_bipartition(subset: PartySubset) -> PartySubset:
    if subset.mask == 0 or subset.mask == (1 << subset.n) - 1:
        raise InvalidBipartitionError(f"{subset!r} is not a proper nonempty subset of 1..{subset.n}")
    return subset
