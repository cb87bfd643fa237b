"""Noise-threshold bisection, threshold tables and the GHZ/W region scan."""
from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .criteria import (
    best_fidelity_f,
    criterion_value,
    ghz_fidelity_witness,
    verdict,
    w_fidelity_witness,
)
from .errors import ParameterError
from .states import NamedStateSpec, ghz_w_mixture
from .tensor import SystemShape

MAX_TABLE_DIM = 4096
THRESHOLD_HEADER = ("n", "d", "p_star")
REGION_HEADER = ("alpha", "beta", "f_q", "f_fid")


@dataclass(frozen=True)
class Bisection:
    tol: float = 1e-7
    max_iter: int = 60

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1:
            raise ParameterError("bisection needs tol > 0 and max_iter >= 1")


def _detector(spec: NamedStateSpec, m: int, f_target: int, criterion: str):
    d = spec.shape.d
    if not 2 <= f_target <= d:
        raise ParameterError(f"f_target={f_target} outside 2..{d}")
    if criterion == "q":
        if not 0 <= m <= spec.shape.n // 2:
            raise ParameterError(f"m={m} outside 0..{spec.shape.n // 2}")
        return lambda p: criterion_value(spec.with_noise(p).provider(), m) > f_target - 2
    if criterion == "fidelity":
        if spec.kind == "ghz":
            return lambda p: ghz_fidelity_witness(spec.with_noise(p).provider(), f_target).detected
        if spec.kind == "w" or (spec.kind == "dicke" and spec.m == 1):
            return lambda p: w_fidelity_witness(spec.with_noise(p).provider(), f_target).detected
        raise ParameterError("fidelity witnesses exist only for the GHZ and W families")
    raise ParameterError(f"unknown criterion {criterion!r}; expected 'q' or 'fidelity'")


def noise_threshold(spec: NamedStateSpec, m: int, f_target: int, tol: float = 1e-7, *,
                    max_iter: int = 60, criterion: str = "q") -> float:
    """White-noise level at which detection of ``f_target`` stops.

    Bisects ``p`` in ``[0, 1]`` on the criterion applied to
    ``(p/D) 1 + (1-p) |psi><psi|``, where ``psi`` is the noiseless state of
    ``spec``. Returns 0 if the pure state is not detected and 1 if even the
    maximally mixed state is.
    """
    cfg = Bisection(tol, max_iter)
    detected = _detector(spec, m, f_target, criterion)
    if not detected(0.0):
        return 0.0
    if detected(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(cfg.max_iter):
        if hi - lo < cfg.tol:
            break
        mid = 0.5 * (lo + hi)
        if detected(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def family_spec(n: int, d: int, m: int) -> NamedStateSpec:
    """GHZ_d for ``m = 0``, the d-level m-Dicke state otherwise."""
    shape = SystemShape(n, d)
    if m == 0:
        return NamedStateSpec("ghz", shape)
    return NamedStateSpec("dicke", shape, m=m)


def threshold_table(n_range=range(3, 7), d_range=range(2, 6), m: int = 0, criterion: str = "q",
                    f_mode: str = "full", tol: float = 1e-7) -> list[dict]:
    """One noise threshold per ``(n, d)`` cell of the white-noise GHZ/Dicke family.

    ``f_mode="gme"`` targets ``f = 2``, ``"full"`` targets ``f = d``. Cells
    with ``d^n`` above 4096 or ``m > n // 2`` are skipped with a warning.
    """
    if f_mode not in ("gme", "full"):
        raise ParameterError(f"f_mode must be 'gme' or 'full', got {f_mode!r}")
    if criterion == "fidelity" and m > 1:
        raise ParameterError("fidelity witnesses exist only for m = 0 (GHZ) and m = 1 (W)")
    rows = []
    for n in n_range:
        for d in d_range:
            if d**n > MAX_TABLE_DIM:
                warnings.warn(f"skipping n={n}, d={d}: dimension {d**n} > {MAX_TABLE_DIM}", stacklevel=2)
                continue
            if m > n // 2:
                warnings.warn(f"skipping n={n}, d={d}: m={m} > n//2", stacklevel=2)
                continue
            f = 2 if f_mode == "gme" else d
            p = noise_threshold(family_spec(n, d, m), m, f, tol, criterion=criterion)
            rows.append({"n": n, "d": d, "p_star": p})
    return rows


def _region_row(args):
    i, alpha_steps, beta_steps, n, d = args
    shape = SystemShape(n, d)
    alpha = i / (alpha_steps - 1)
    rows = []
    for j in range(beta_steps):
        beta = j / (beta_steps - 1)
        if alpha + beta > 1.0 + 1e-12:
            break
        provider = ghz_w_mixture(alpha, beta, shape)
        rows.append(
            {
                "alpha": alpha,
                "beta": beta,
                "f_q": verdict(provider, [0, 1]).best_f,
                "f_fid": best_fidelity_f(provider),
            }
        )
    return rows


def region_scan(alpha_steps: int = 101, beta_steps: int = 101, *, n: int = 3, d: int = 4,
                workers: int | None = None) -> list[dict]:
    """Certified ``f`` over ``alpha GHZ_d + beta W_d + (1-alpha-beta) 1/D``.

    ``f_q`` is the best of ``Q_0`` and ``Q_1``; ``f_fid`` the best of the two
    fidelity witnesses. Rows come in grid order (alpha outer, beta inner)
    whether or not ``workers`` processes are used.
    """
    if alpha_steps < 2 or beta_steps < 2:
        raise ParameterError("grid needs at least 2 steps per axis")
    jobs = [(i, alpha_steps, beta_steps, n, d) for i in range(alpha_steps)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_region_row, jobs))
    else:
        chunks = [_region_row(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def rows_to_csv(rows: list[dict], header, stream=None) -> str:
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[h]) for h in header])
    return out.getvalue() if stream is None else ""


def rows_from_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append({k: (int(v) if k in ("n", "d", "f_q", "f_fid") else float(v)) for k, v in rec.items()})
    return rows
