"""Brute-force references for small systems.

``q0_two_copy``/``qm_two_copy`` follow the two-copy notation literally: each
subtracted term is ``<x,y| P^† (rho ⊗ rho) P |x,y>`` with ``P`` an explicit
sparse 0/1 matrix on ``H ⊗ H``. They share no index code with
:mod:`gmedim.criteria` (sets are enumerated with ``itertools`` here), so
agreement between the two is a real check of the diagonal-product reduction.

``rho ⊗ rho`` is applied to vectors through ``vec(rho W rho^T)`` rather than
stored, which is exact and keeps memory at ``O(D^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import sqrt

import numpy as np
import scipy.sparse as sp

from .combinatorics import PartySubset, bipartitions
from .errors import SizeGuardError, UnsupportedInputError
from .tensor import DensityMatrix, PureState, SystemShape, basis_index

MAX_TWO_COPY_DIM = 2**20
RANK_TOL = 1e-8


def _guard(shape: SystemShape) -> None:
    if shape.dim**2 > MAX_TWO_COPY_DIM:
        raise SizeGuardError(
            f"two-copy space has dimension {shape.dim ** 2} > {MAX_TWO_COPY_DIM} (n={shape.n}, d={shape.d})"
        )


def _parties(subset) -> frozenset[int]:
    if isinstance(subset, PartySubset):
        return frozenset(subset.members)
    return frozenset(subset)


def permutation_matrix(subset, shape: SystemShape) -> sp.csr_matrix:
    """Sparse matrix exchanging the parties in ``subset`` between the two copies.

    Acts on ``H ⊗ H`` with party slots ``1..n`` of copy one followed by
    ``1..n`` of copy two.
    """
    _guard(shape)
    n, d = shape.n, shape.d
    axes = list(range(2 * n))
    for p in _parties(subset):
        if not 1 <= p <= n:
            raise ValueError(f"party {p} out of range 1..{n}")
        axes[p - 1], axes[n + p - 1] = n + p - 1, p - 1
    size = shape.dim**2
    source = np.arange(size).reshape((d,) * (2 * n)).transpose(axes).ravel()
    return sp.csr_matrix((np.ones(size), (np.arange(size), source)), shape=(size, size))


def copy_swap(shape: SystemShape) -> sp.csr_matrix:
    """Exchange of the two full copies."""
    return permutation_matrix(range(1, shape.n + 1), shape)


def _two_copy_expectation(rho: np.ndarray, perm: sp.csr_matrix, x: int, y: int) -> float:
    D = rho.shape[0]
    e = np.zeros(D * D)
    e[x * D + y] = 1.0
    w = perm @ e
    W = w.reshape(D, D)
    kron_w = (rho @ W @ rho.T).reshape(-1)
    return float(np.real(np.vdot(w, kron_w)))


def _sqrt0(v: float) -> float:
    return sqrt(max(v, 0.0))


def q0_two_copy(rho: DensityMatrix) -> float:
    shape = rho.shape
    _guard(shape)
    n, d, R = shape.n, shape.d, rho.entries
    cuts = [frozenset(c) for r in range(1, n) for c in combinations(range(1, n), r)]
    perms = {A: permutation_matrix(A, shape) for A in cuts}
    total = 0.0
    for k in range(d):
        for l in range(d):
            if k == l:
                continue
            kn = basis_index((k,) * n, shape)
            ln = basis_index((l,) * n, shape)
            total += abs(R[kn, ln])
            total -= sum(_sqrt0(_two_copy_expectation(R, perms[A], kn, ln)) for A in cuts)
    return total


def _ladder(n: int, raised: frozenset, level: int) -> tuple[int, ...]:
    return tuple(level + 1 if p in raised else level for p in range(1, n + 1))


def qm_two_copy(rho: DensityMatrix, m: int) -> float:
    shape = rho.shape
    _guard(shape)
    n, d, R = shape.n, shape.d, rho.entries
    if not 1 <= m <= n // 2:
        raise ValueError(f"m={m} outside 1..{n // 2}")
    everyone = frozenset(range(1, n + 1))
    alphas = [frozenset(c) for c in combinations(range(1, n + 1), m)]
    sigma = [(a, b) for a in alphas for b in alphas if len(a & b) == m - 1]
    perms: dict[frozenset, sp.csr_matrix] = {}

    def swaps(a, b, k, l):
        if k == l:
            return [a]
        free = sorted(everyone - (a - b if k < l else b - a))
        return [frozenset(c) for r in range(1, len(free)) for c in combinations(free, r)]

    total = 0.0
    for k in range(d - 1):
        for l in range(d - 1):
            for a, b in sigma:
                x = basis_index(_ladder(n, a, k), shape)
                y = basis_index(_ladder(n, b, l), shape)
                total += abs(R[x, y])
                for delta in swaps(a, b, k, l):
                    if delta not in perms:
                        perms[delta] = permutation_matrix(delta, shape)
                    total -= _sqrt0(_two_copy_expectation(R, perms[delta], x, y))
    weight = (d - 1) * m * (n - m - 1)
    support = [basis_index(_ladder(n, a, l), shape) for l in range(d - 1) for a in alphas]
    diag = sum(R[i, i].real for i in support)
    return (total - weight * diag) / m


# ---------------------------------------------------------------------------
# pure-state dimensionality


@dataclass(frozen=True)
class SchmidtEntry:
    subset: PartySubset
    rank: int
    singular_values: tuple[float, ...]


@dataclass(frozen=True)
class SchmidtProfile:
    entries: tuple[SchmidtEntry, ...]
    min_rank: int
    max_rank: int

    def to_dict(self) -> dict:
        f_ent, f_gme = self.max_rank, (self.min_rank if self.min_rank >= 2 else 0)
        return {
            "bipartitions": [
                {
                    "A": list(e.subset.members),
                    "B": list(e.subset.complement().members),
                    "rank": e.rank,
                    "singular_values": list(e.singular_values),
                }
                for e in self.entries
            ],
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "f_entanglement": f_ent,
            "f_gme": f_gme,
        }


def schmidt_profile(psi: PureState, rank_tol: float = RANK_TOL) -> SchmidtProfile:
    """Singular values of the coefficient matrix across every bipartition."""
    n, d = psi.shape.n, psi.shape.d
    t = psi.tensor()
    entries = []
    for A in bipartitions(n):
        a_axes = [p - 1 for p in A.members]
        b_axes = [p for p in range(n) if p not in a_axes]
        coeff = t.transpose(a_axes + b_axes).reshape(d ** len(a_axes), -1)
        sv = np.linalg.svd(coeff, compute_uv=False)
        entries.append(SchmidtEntry(A, int(np.count_nonzero(sv > rank_tol)), tuple(float(s) for s in sv)))
    ranks = [e.rank for e in entries]
    return SchmidtProfile(tuple(entries), min(ranks), max(ranks))


def pure_dimensionality(psi: PureState, rank_tol: float = RANK_TOL) -> tuple[int, int]:
    """``(max rank, min rank or 0)``: entanglement dimensionality and GME dimensionality.

    A maximum of 1 means fully separable; a GME value of 0 means some
    bipartition has Schmidt rank 1.
    """
    prof = schmidt_profile(psi, rank_tol)
    return prof.max_rank, (prof.min_rank if prof.min_rank >= 2 else 0)


def pure_state_from_density(rho: DensityMatrix, tol: float = 1e-10) -> PureState:
    """Recover ``|psi>`` from a rank-one density matrix (global phase fixed arbitrarily)."""
    vals, vecs = np.linalg.eigh(rho.entries)
    if abs(vals[-1] - 1.0) > tol:
        raise UnsupportedInputError(
            f"state is mixed (largest eigenvalue {vals[-1]:.6g}); use the 'evaluate' subcommand for mixed states"
        )
    return PureState(rho.shape, vecs[:, -1] / np.linalg.norm(vecs[:, -1]))
