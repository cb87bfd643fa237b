"""Named state families, white-noise mixing and seeded random samplers.

Random states come from numpy's Philox4x32-10 counter-based generator seeded
with the user's integer, so the same seed gives the same state on every
platform and numpy release that ships Philox.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb, sqrt

import numpy as np

from .combinatorics import bipartition_masks
from .errors import ParameterError
from .tensor import (
    DenseProvider,
    DensityMatrix,
    MixtureProvider,
    PureState,
    SystemShape,
    basis_index,
    white_noise_provider,
)


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _check_f(shape: SystemShape, f: int) -> None:
    if not 2 <= f <= shape.d:
        raise ParameterError(f"f={f} outside 2..{shape.d}")


def _check_m(shape: SystemShape, m: int) -> None:
    if not 1 <= m <= shape.n // 2:
        raise ParameterError(f"m={m} outside 1..{shape.n // 2}")


def ghz(shape: SystemShape, f: int | None = None) -> PureState:
    """``(|0...0> + ... + |f-1...f-1>) / sqrt(f)``."""
    shape.require_multipartite()
    f = shape.d if f is None else f
    _check_f(shape, f)
    amps = np.zeros(shape.require_vector().dim, dtype=np.complex128)
    for i in range(f):
        amps[basis_index((i,) * shape.n, shape)] = 1 / sqrt(f)
    return PureState(shape, amps)


def ghz_pair(shape: SystemShape, i: int, j: int) -> PureState:
    """``(|i...i> + |j...j>) / sqrt(2)``."""
    shape.require_multipartite()
    if i == j or not (0 <= i < shape.d and 0 <= j < shape.d):
        raise ParameterError(f"need two distinct levels in 0..{shape.d - 1}, got {i}, {j}")
    amps = np.zeros(shape.dim, dtype=np.complex128)
    amps[basis_index((i,) * shape.n, shape)] = 1 / sqrt(2)
    amps[basis_index((j,) * shape.n, shape)] = 1 / sqrt(2)
    return PureState(shape, amps)


def excitation_label(n: int, raised, level: int) -> tuple[int, ...]:
    """Digit ``level + 1`` on the (1-based) parties in ``raised``, ``level`` elsewhere."""
    raised = set(raised)
    return tuple(level + 1 if p in raised else level for p in range(1, n + 1))


def dicke(shape: SystemShape, m: int = 1, f: int | None = None) -> PureState:
    """Equal superposition of all ladders with ``m`` parties one level up.

    Sums ``|alpha^l>`` over every m-subset ``alpha`` and every level
    ``l = 0..f-2``.
    """
    shape.require_multipartite()
    f = shape.d if f is None else f
    _check_m(shape, m)
    _check_f(shape, f)
    n = shape.n
    amp = 1 / sqrt((f - 1) * comb(n, m))
    amps = np.zeros(shape.require_vector().dim, dtype=np.complex128)
    for level in range(f - 1):
        for alpha in combinations(range(1, n + 1), m):
            amps[basis_index(excitation_label(n, alpha, level), shape)] = amp
    return PureState(shape, amps)


def w_state(shape: SystemShape, f: int | None = None) -> PureState:
    return dicke(shape, 1, f)


def bisep_example(shape: SystemShape = SystemShape(3, 3)) -> PureState:
    """``|0> ⊗ (|00> + |11> + |22>) / sqrt(3)``: tensor rank 3 but not GME."""
    if shape.n != 3 or shape.d < 3:
        raise ParameterError("the biseparable example needs n=3 and d>=3")
    amps = np.zeros(shape.dim, dtype=np.complex128)
    for i in range(3):
        amps[basis_index((0, i, i), shape)] = 1 / sqrt(3)
    return PureState(shape, amps)


def white_noise_mix(psi: PureState, p: float) -> DensityMatrix:
    """Dense ``(p/d^n) 1 + (1-p) |psi><psi|``."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"noise p={p} outside [0, 1]")
    D = psi.shape.dim
    rho = (1 - p) * np.outer(psi.amplitudes, psi.amplitudes.conj()) + (p / D) * np.eye(D)
    return DensityMatrix(psi.shape, rho)


def _require_333(shape: SystemShape) -> None:
    if (shape.n, shape.d) != (3, 3):
        raise ParameterError(f"rho_c is defined for n=3, d=3, got n={shape.n}, d={shape.d}")


def rho_c(shape: SystemShape = SystemShape(3, 3)) -> DensityMatrix:
    """``1/2 |GHZ_3><GHZ_3| + 1/6 sum_i |iii><iii|``."""
    _require_333(shape)
    g = ghz(shape, 3).amplitudes
    rho = 0.5 * np.outer(g, g.conj())
    for i in range(3):
        k = basis_index((i, i, i), shape)
        rho[k, k] += 1 / 6
    return DensityMatrix(shape, rho)


def rho_c_pairs(shape: SystemShape = SystemShape(3, 3)) -> DensityMatrix:
    """The same state as an equal mixture of the three two-level GHZ pairs."""
    _require_333(shape)
    rho = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
    for i, j in combinations(range(3), 2):
        a = ghz_pair(shape, i, j).amplitudes
        rho += np.outer(a, a.conj()) / 3
    return DensityMatrix(shape, rho)


def random_vector(gen: np.random.Generator, dim: int) -> np.ndarray:
    z = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return z / np.linalg.norm(z)


def _product_across(shape: SystemShape, a_mask: int, phi_a: np.ndarray, phi_b: np.ndarray) -> np.ndarray:
    n, d = shape.n, shape.d
    a_parties = [i for i in range(n) if a_mask >> i & 1]
    b_parties = [i for i in range(n) if not a_mask >> i & 1]
    t = np.multiply.outer(phi_a.reshape((d,) * len(a_parties)), phi_b.reshape((d,) * len(b_parties)))
    # axes of t are (a_parties..., b_parties...); move each back to its party slot
    return np.moveaxis(t, range(n), a_parties + b_parties).reshape(-1)


def random_biseparable(shape: SystemShape, seed: int, num_terms: int = 4) -> DensityMatrix:
    """Seeded mixture of pure states, each a product across a random bipartition."""
    shape.require_multipartite()
    if num_terms < 1:
        raise ParameterError("num_terms must be >= 1")
    gen = rng(seed)
    cuts = bipartition_masks(shape.n)
    weights = gen.dirichlet(np.ones(num_terms))
    rho = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
    for w in weights:
        a = cuts[int(gen.integers(len(cuts)))]
        na = a.bit_count()
        psi = _product_across(
            shape, a, random_vector(gen, shape.d**na), random_vector(gen, shape.d ** (shape.n - na))
        )
        rho += w * np.outer(psi, psi.conj())
    return DensityMatrix(shape, rho)


def random_pure(shape: SystemShape, seed: int) -> PureState:
    return PureState(shape, random_vector(rng(seed), shape.dim))


def random_mixed(shape: SystemShape, seed: int, num_terms: int = 4) -> DensityMatrix:
    """Seeded mixture of ``num_terms`` random pure states with simplex weights."""
    gen = rng(seed)
    weights = gen.dirichlet(np.ones(num_terms))
    rho = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
    for w in weights:
        psi = random_vector(gen, shape.dim)
        rho += w * np.outer(psi, psi.conj())
    return DensityMatrix(shape, rho)


def ghz_w_mixture(alpha: float, beta: float, shape: SystemShape = SystemShape(3, 4)) -> MixtureProvider:
    """Closed-form ``alpha |GHZ_d><GHZ_d| + beta |W_d><W_d| + (1-alpha-beta) 1/D``."""
    noise = 1.0 - alpha - beta
    if alpha < 0 or beta < 0 or noise < -1e-12:
        raise ParameterError(f"(alpha, beta) = ({alpha}, {beta}) outside the simplex")
    return MixtureProvider(shape, [(alpha, ghz(shape)), (beta, w_state(shape))], noise=max(noise, 0.0))


# ---------------------------------------------------------------------------
# named-state specs

KINDS = ("ghz", "dicke", "w", "bisep", "rhoc", "ghzpair")
_REQUIRED = {
    "ghz": {"n", "d"},
    "dicke": {"n", "d"},
    "w": {"n", "d"},
    "ghzpair": {"n", "d", "i", "j"},
    "bisep": set(),
    "rhoc": set(),
}
_ALLOWED = {
    "ghz": {"n", "d", "f", "p"},
    "dicke": {"n", "d", "m", "f", "p"},
    "w": {"n", "d", "f", "p"},
    "ghzpair": {"n", "d", "i", "j", "p"},
    "bisep": {"d", "p"},
    "rhoc": {"p"},
}


@dataclass(frozen=True)
class NamedStateSpec:
    """A named state plus optional white noise ``p``.

    ``f`` defaults to ``d`` and ``m`` to 1.
    """

    kind: str
    shape: SystemShape
    f: int | None = None
    m: int | None = None
    pair: tuple[int, int] | None = None
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown state kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind in ("ghz", "dicke", "w"):
            object.__setattr__(self, "f", self.shape.d if self.f is None else self.f)
            _check_f(self.shape, self.f)
        if self.kind in ("dicke", "w"):
            object.__setattr__(self, "m", 1 if self.kind == "w" or self.m is None else self.m)
            _check_m(self.shape, self.m)
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"noise p={self.p} outside [0, 1]")

    @classmethod
    def parse(cls, text: str) -> "NamedStateSpec":
        """Parse ``"kind:key=value,..."``, e.g. ``"dicke:n=4,d=3,m=2,f=3"``."""
        m = re.fullmatch(r"\s*([a-z]+)\s*(?::(.*))?", text)
        if not m:
            raise ParameterError(f"cannot parse state spec {text!r}")
        kind, rest = m.group(1), m.group(2) or ""
        if kind not in KINDS:
            raise ParameterError(f"unknown state kind {kind!r}; expected one of {', '.join(KINDS)}")
        params: dict[str, str] = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ParameterError(f"expected key=value in {text!r}, got {item!r}")
            params[key.strip()] = value.strip()
        unknown = set(params) - _ALLOWED[kind]
        missing = _REQUIRED[kind] - set(params)
        if unknown:
            raise ParameterError(f"{kind}: unexpected parameter(s) {sorted(unknown)}")
        if missing:
            raise ParameterError(f"{kind}: missing parameter(s) {sorted(missing)}")
        try:
            ints = {k: int(v) for k, v in params.items() if k != "p"}
            p = float(params.get("p", 0.0))
        except ValueError as exc:
            raise ParameterError(f"bad number in {text!r}: {exc}") from None
        if kind == "rhoc":
            shape = SystemShape(3, 3)
        elif kind == "bisep":
            shape = SystemShape(3, ints.get("d", 3))
        else:
            shape = SystemShape(ints["n"], ints["d"])
        pair = (ints["i"], ints["j"]) if kind == "ghzpair" else None
        return cls(kind, shape, f=ints.get("f"), m=ints.get("m"), pair=pair, p=p)

    def __str__(self) -> str:
        s = self.shape
        if self.kind == "rhoc":
            body = []
        elif self.kind == "bisep":
            body = [f"d={s.d}"]
        else:
            body = [f"n={s.n}", f"d={s.d}"]
            if self.kind == "dicke":
                body.append(f"m={self.m}")
            if self.kind in ("ghz", "dicke", "w"):
                body.append(f"f={self.f}")
            if self.kind == "ghzpair":
                body += [f"i={self.pair[0]}", f"j={self.pair[1]}"]
        if self.p:
            body.append(f"p={self.p!r}")
        return self.kind + (":" + ",".join(body) if body else "")

    @property
    def is_pure(self) -> bool:
        return self.kind != "rhoc" and self.p == 0.0

    def pure_state(self) -> PureState:
        """The noiseless pure state (``rhoc`` has none)."""
        if self.kind == "ghz":
            return ghz(self.shape, self.f)
        if self.kind in ("dicke", "w"):
            return dicke(self.shape, self.m, self.f)
        if self.kind == "ghzpair":
            return ghz_pair(self.shape, *self.pair)
        if self.kind == "bisep":
            return bisep_example(self.shape)
        raise ParameterError("rhoc is a mixed state")

    def with_noise(self, p: float) -> "NamedStateSpec":
        return NamedStateSpec(self.kind, self.shape, self.f, self.m, self.pair, p)

    def provider(self):
        """Closed-form element provider (dense for ``rhoc``)."""
        if self.kind == "rhoc":
            rho = rho_c(self.shape)
            if self.p:
                rho = DensityMatrix(
                    self.shape, (1 - self.p) * rho.entries + self.p / self.shape.dim * np.eye(self.shape.dim)
                )
            return DenseProvider(rho)
        return white_noise_provider(self.pure_state(), self.p)

    def density_matrix(self) -> DensityMatrix:
        if self.kind == "rhoc":
            return self.provider().rho
        return white_noise_mix(self.pure_state(), self.p)
