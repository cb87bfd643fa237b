"""Dimensionality criteria evaluated from density-matrix elements.

Every criterion is a signed sum of three kinds of terms:

* ``O`` -- moduli of off-diagonal elements ``|<x|rho|y>|``,
* ``P`` -- square roots ``sqrt(<u|rho|u><v|rho|v>)``; these are the two-copy
  expectations ``<x,y|P^† rho⊗rho P|x,y>`` of a copy-swap ``P``, which
  factorise because ``P`` maps product basis vectors to product basis
  vectors,
* ``D`` -- diagonal elements, weighted by ``N_D``.

For a system shape and family index ``m`` the full set of flat indices is
fixed, so it is compiled once into a :class:`TermPlan` and cached. Evaluation
then reads only the referenced elements from the provider and reduces them
in a kernel (compiled when available, see :mod:`gmedim.kernels`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .combinatorics import (
    PartySubset,
    bipartition_masks,
    delta_masks,
    m_subset_masks,
    n_d,
    sigma_mask_pairs,
)
from .errors import InvalidStateError, ParameterError
from .states import ghz, w_state
from .tensor import ElementProvider, SystemShape, as_provider, basis_label

NEG_DIAG_TOL = 1e-12
CERTIFY_TOL = 1e-9


def _bits(masks: Sequence[int], n: int) -> np.ndarray:
    """Boolean matrix: row ``i`` marks the parties (as array slots) in ``masks[i]``."""
    masks = np.asarray(masks, dtype=np.int64).reshape(-1, 1)
    return (masks >> np.arange(n, dtype=np.int64)) & 1 == 1


def _excited(mask: int, level: int, n: int) -> np.ndarray:
    """Digits of ``|alpha^level>``: ``level + 1`` on ``alpha``, ``level`` elsewhere."""
    return level + _bits([mask], n)[0].astype(np.int64)


@dataclass(frozen=True)
class TermPlan:
    """Flat-index layout of one criterion for a fixed ``(n, d, m)``.

    ``p_u``/``p_v``/``d_pos`` are positions into ``diag_index``. The
    ``*_meta`` fields are only used to label terms in breakdowns.
    """

    n: int
    d: int
    m: int
    off_rows: np.ndarray
    off_cols: np.ndarray
    diag_index: np.ndarray
    p_u: np.ndarray
    p_v: np.ndarray
    d_pos: np.ndarray
    n_d: int
    scale: float
    off_meta: list = field(repr=False)
    p_owner: np.ndarray = field(repr=False)
    p_delta: np.ndarray = field(repr=False)
    d_meta: list = field(repr=False)

    @property
    def shape(self) -> SystemShape:
        return SystemShape(self.n, self.d)

    @property
    def num_elements(self) -> int:
        """Distinct matrix elements read by one evaluation."""
        return len(set(zip(self.off_rows.tolist(), self.off_cols.tolist()))) + self.diag_index.size


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _finish(n, d, m, off_rows, off_cols, p_u_flat, p_v_flat, d_flat, nd, scale, off_meta, p_owner, p_delta, d_meta):
    off_rows = np.asarray(off_rows, dtype=np.int64)
    off_cols = np.asarray(off_cols, dtype=np.int64)
    p_u_flat = np.asarray(p_u_flat, dtype=np.int64)
    p_v_flat = np.asarray(p_v_flat, dtype=np.int64)
    d_flat = np.asarray(d_flat, dtype=np.int64)
    diag_index, inverse = np.unique(np.concatenate([p_u_flat, p_v_flat, d_flat]), return_inverse=True)
    inverse = inverse.astype(np.int64)
    k, j = p_u_flat.size, p_v_flat.size
    p_u, p_v, d_pos = inverse[:k].copy(), inverse[k : k + j].copy(), inverse[k + j :].copy()
    p_owner = np.asarray(p_owner, dtype=np.int64)
    p_delta = np.asarray(p_delta, dtype=np.int64)
    _freeze(off_rows, off_cols, diag_index, p_u, p_v, d_pos, p_owner, p_delta)
    return TermPlan(n, d, m, off_rows, off_cols, diag_index, p_u, p_v, d_pos, nd, scale, off_meta, p_owner, p_delta, d_meta)


@lru_cache(maxsize=64)
def q0_plan(n: int, d: int) -> TermPlan:
    shape = SystemShape(n, d).require_multipartite()
    radix = shape.radix
    cuts = bipartition_masks(n)
    cut_bits = _bits(cuts, n)
    off_rows, off_cols, pu, pv, owner, delta, meta = [], [], [], [], [], [], []
    for k in range(d):
        for l in range(d):
            if k == l:
                continue
            owner_id = len(off_rows)
            off_rows.append(k * int(radix.sum()))
            off_cols.append(l * int(radix.sum()))
            meta.append({"k": k, "l": l})
            # copy one receives l on A, copy two receives k on A
            x = np.where(cut_bits, l, k) @ radix
            y = np.where(cut_bits, k, l) @ radix
            pu.extend(x.tolist())
            pv.extend(y.tolist())
            owner.extend([owner_id] * len(cuts))
            delta.extend(cuts)
    return _finish(n, d, 0, off_rows, off_cols, pu, pv, [], 0, 1.0, meta, owner, delta, [])


@lru_cache(maxsize=64)
def qm_plan(n: int, d: int, m: int) -> TermPlan:
    shape = SystemShape(n, d).require_multipartite()
    if not 1 <= m <= n // 2:
        raise ParameterError(f"m={m} outside 1..{n // 2}")
    radix = shape.radix
    sigma = sigma_mask_pairs(n, m)
    off_rows, off_cols, pu, pv, owner, delta, meta = [], [], [], [], [], [], []
    for k in range(d - 1):
        for l in range(d - 1):
            for a, b in sigma:
                x = _excited(a, k, n)
                y = _excited(b, l, n)
                owner_id = len(off_rows)
                off_rows.append(int(x @ radix))
                off_cols.append(int(y @ radix))
                meta.append({"k": k, "l": l, "alpha": a, "beta": b})
                deltas = delta_masks(a, b, k, l, n)
                if not deltas:
                    continue
                swap = _bits(deltas, n)
                pu.extend((np.where(swap, y, x) @ radix).tolist())
                pv.extend((np.where(swap, x, y) @ radix).tolist())
                owner.extend([owner_id] * len(deltas))
                delta.extend(deltas)
    d_flat, d_meta = [], []
    for l in range(d - 1):
        for a in m_subset_masks(n, m):
            d_flat.append(int(_excited(a, l, n) @ radix))
            d_meta.append({"l": l, "alpha": a})
    return _finish(n, d, m, off_rows, off_cols, pu, pv, d_flat, n_d(d, m, n), 1.0 / m, meta, owner, delta, d_meta)


def plan_for(shape: SystemShape, m: int) -> TermPlan:
    if m == 0:
        return q0_plan(shape.n, shape.d)
    return qm_plan(shape.n, shape.d, m)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CriterionReport:
    m: int
    value: float
    certified_f: int
    terms: list | None = None

    def to_dict(self) -> dict:
        out = {"m": self.m, "value": self.value, "certified_f": self.certified_f}
        if self.terms is not None:
            out["terms"] = self.terms
        return out


@dataclass(frozen=True)
class Verdict:
    reports: tuple[CriterionReport, ...]
    best_f: int

    def report(self, m: int) -> CriterionReport:
        for r in self.reports:
            if r.m == m:
                return r
        raise KeyError(m)

    def to_dict(self) -> dict:
        return {"best_f": self.best_f, "reports": [r.to_dict() for r in self.reports]}


def certify(value: float, d: int, tol: float = CERTIFY_TOL) -> int:
    """Largest ``f`` in ``2..d`` with ``value > f - 2 + tol``, else 0."""
    if tol < 0:
        raise ParameterError("tol must be nonnegative")
    for f in range(d, 1, -1):
        if value > f - 2 + tol:
            return f
    return 0


# ---------------------------------------------------------------------------
# evaluation


def _bad_diagonal(plan: TermPlan, pos: int) -> InvalidStateError:
    label = basis_label(int(plan.diag_index[pos]), plan.shape)
    return InvalidStateError(f"diagonal element at {label} is negative beyond {NEG_DIAG_TOL:g}")


def _exact_sums(off_vals, diag_vals, plan: TermPlan):
    if plan.p_u.size:
        used = diag_vals[np.concatenate([plan.p_u, plan.p_v])]
        if (used < -NEG_DIAG_TOL).any():
            pos = np.concatenate([plan.p_u, plan.p_v])[np.argmax(used < -NEG_DIAG_TOL)]
            raise _bad_diagonal(plan, int(pos))
    clamped = np.maximum(diag_vals, 0.0)
    return (
        math.fsum(np.abs(off_vals)),
        math.fsum(np.sqrt(clamped[plan.p_u] * clamped[plan.p_v])),
        math.fsum(diag_vals[plan.d_pos]),
    )


def _breakdown(plan: TermPlan, off_vals, diag_vals) -> list[dict]:
    def subset(mask):
        return list(PartySubset(int(mask), plan.n).members)

    def labelled(meta):
        out = dict(meta)
        for key in ("alpha", "beta"):
            if key in out:
                out[key] = subset(out[key])
        return out

    clamped = np.maximum(diag_vals, 0.0)
    terms = []
    for i, meta in enumerate(plan.off_meta):
        terms.append({"kind": "O", "indices": labelled(meta), "value": float(abs(off_vals[i]))})
    p_vals = np.sqrt(clamped[plan.p_u] * clamped[plan.p_v])
    for j, val in enumerate(p_vals):
        idx = labelled(plan.off_meta[plan.p_owner[j]])
        idx["delta"] = subset(plan.p_delta[j])
        terms.append({"kind": "P", "indices": idx, "value": -float(val)})
    for j, meta in enumerate(plan.d_meta):
        terms.append({"kind": "D", "indices": labelled(meta), "value": -plan.n_d * float(diag_vals[plan.d_pos[j]])})
    if plan.scale != 1.0:
        for t in terms:
            t["value"] *= plan.scale
    return terms


def criterion_value(
    provider: ElementProvider,
    m: int,
    *,
    deterministic: bool = False,
    backend: str | None = None,
) -> float:
    """Raw ``Q_0`` (``m = 0``) or ``Q_m`` value."""
    plan = plan_for(provider.shape, m)
    off_vals = np.ascontiguousarray(provider.elements(plan.off_rows, plan.off_cols), dtype=np.complex128)
    diag_vals = np.ascontiguousarray(provider.diagonal(plan.diag_index), dtype=np.float64)
    return _reduce(plan, off_vals, diag_vals, deterministic, backend)


def _reduce(plan, off_vals, diag_vals, deterministic, backend):
    if deterministic:
        o, p, dsum = _exact_sums(off_vals, diag_vals, plan)
    else:
        impl = kernels.get_backend(backend)
        o, p, dsum, bad = impl.plan_sums(off_vals, diag_vals, plan.p_u, plan.p_v, plan.d_pos, NEG_DIAG_TOL)
        if bad >= 0:
            raise _bad_diagonal(plan, bad)
    return plan.scale * (o - p - plan.n_d * dsum)


def _report(provider, m, tol, terms, deterministic, backend) -> CriterionReport:
    provider = as_provider(provider)
    plan = plan_for(provider.shape, m)
    off_vals = np.ascontiguousarray(provider.elements(plan.off_rows, plan.off_cols), dtype=np.complex128)
    diag_vals = np.ascontiguousarray(provider.diagonal(plan.diag_index), dtype=np.float64)
    value = float(_reduce(plan, off_vals, diag_vals, deterministic, backend))
    breakdown = _breakdown(plan, off_vals, diag_vals) if terms else None
    return CriterionReport(m, value, certify(value, provider.shape.d, tol), breakdown)


def q0(provider, *, tol: float = CERTIFY_TOL, terms: bool = False, deterministic: bool = False,
       backend: str | None = None) -> CriterionReport:
    """GHZ-type criterion: off-diagonals between ``|k...k>`` and ``|l...l>``.

    Sums over ordered level pairs ``k != l`` and subtracts, for every
    bipartition ``A``, ``sqrt(rho[x, x] rho[y, y])`` where ``x`` carries
    ``l`` on ``A`` and ``k`` elsewhere and ``y`` the reverse.
    """
    return _report(provider, 0, tol, terms, deterministic, backend)


def qm(provider, m: int, *, tol: float = CERTIFY_TOL, terms: bool = False, deterministic: bool = False,
       backend: str | None = None) -> CriterionReport:
    """Dicke-type criterion of order ``m`` (``1 <= m <= n // 2``).

    Off-diagonals ``|<alpha^k|rho|beta^l>|`` over ordered pairs of m-subsets
    sharing ``m - 1`` parties and levels ``k, l <= d - 2``, minus swap terms
    for each ``delta`` of :func:`gmedim.combinatorics.delta_sets`, minus
    ``N_D`` times the Dicke-support diagonal, all divided by ``m``.
    """
    if m < 1:
        raise ParameterError("qm needs m >= 1; use q0 for m = 0")
    return _report(provider, m, tol, terms, deterministic, backend)


def default_m_list(shape: SystemShape) -> list[int]:
    return list(range(0, shape.n // 2 + 1))


def verdict(provider, m_list: Sequence[int] | None = None, *, tol: float = CERTIFY_TOL, terms: bool = False,
            deterministic: bool = False, backend: str | None = None) -> Verdict:
    """Evaluate each requested criterion and keep the best certified ``f``."""
    provider = as_provider(provider)
    shape = provider.shape
    m_list = default_m_list(shape) if m_list is None else list(m_list)
    for m in m_list:
        if not 0 <= m <= shape.n // 2:
            raise ParameterError(f"m={m} outside 0..{shape.n // 2}")
    reports = tuple(_report(provider, m, tol, terms, deterministic, backend) for m in m_list)
    return Verdict(reports, max((r.certified_f for r in reports), default=0))


# ---------------------------------------------------------------------------
# fidelity baselines


class WitnessResult(NamedTuple):
    fidelity: float
    detected: bool


def _fidelity(provider: ElementProvider, psi_amps: np.ndarray) -> float:
    support = np.flatnonzero(psi_amps)
    rows, cols = np.meshgrid(support, support, indexing="ij")
    block = provider.elements(rows.ravel(), cols.ravel()).reshape(support.size, support.size)
    a = psi_amps[support]
    return float(np.real(a.conj() @ block @ a))


def ghz_fidelity_threshold(f: int) -> float:
    return (f - 1) / f


def w_fidelity_threshold(n: int, f: int) -> float:
    return (n * (f - 1) - 1) / (n * (f - 1))


def ghz_fidelity_witness(provider, f: int) -> WitnessResult:
    """Overlap with ``|GHZ_f>``; detects ``f``-dimensional GME above ``(f-1)/f``."""
    provider = as_provider(provider)
    fid = _fidelity(provider, ghz(provider.shape, f).amplitudes)
    return WitnessResult(fid, fid > ghz_fidelity_threshold(f))


def w_fidelity_witness(provider, f: int) -> WitnessResult:
    """Overlap with the qudit ``|W_f>``; threshold ``(n(f-1)-1) / (n(f-1))``."""
    provider = as_provider(provider)
    fid = _fidelity(provider, w_state(provider.shape, f).amplitudes)
    return WitnessResult(fid, fid > w_fidelity_threshold(provider.shape.n, f))


def best_fidelity_f(provider) -> int:
    """Largest ``f`` detected by either fidelity witness, else 0."""
    provider = as_provider(provider)
    for f in range(provider.shape.d, 1, -1):
        if ghz_fidelity_witness(provider, f).detected or w_fidelity_witness(provider, f).detected:
            return f
    return 0
