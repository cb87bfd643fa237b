"""Basis indexing, state containers and matrix-element providers.

Parties are numbered ``1..n`` in every public interface. Computational basis
labels are encoded big-endian: party 1 is the most significant digit, so the
label ``(0, 1, 2)`` with ``d = 3`` has flat index ``0*9 + 1*3 + 2 = 5``.

All containers are immutable; their numpy buffers are marked read-only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidBipartitionError,
    InvalidLabelError,
    ParameterError,
    SizeGuardError,
    ValidationError,
)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-12
PSD_TOL = 1e-8
# keeps every flat index (and index arithmetic on pairs of them) inside int64
MAX_DIMENSION = 2**62
# storage guards: state vectors and dense D x D matrices
MAX_VECTOR_DIM = 2**24
MAX_DENSE_DIM = 2**14


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemShape:
    """Party count ``n`` and local dimension ``d`` of ``(C^d)^{⊗n}``.

    ``n = 1`` is accepted only so that single-party marginals returned by
    :func:`partial_trace` have a shape; everything multipartite calls
    :meth:`require_multipartite`.
    """

    n: int
    d: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not isinstance(self.d, (int, np.integer)):
            raise ParameterError("n and d must be integers")
        if self.n < 1 or self.d < 2:
            raise ParameterError(f"need n >= 1 and d >= 2, got n={self.n}, d={self.d}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        if self.d**self.n > MAX_DIMENSION:
            raise ParameterError(f"dimension {self.d}^{self.n} exceeds {MAX_DIMENSION}")

    @property
    def dim(self) -> int:
        return self.d**self.n

    def require_vector(self) -> "SystemShape":
        if self.dim > MAX_VECTOR_DIM:
            raise SizeGuardError(f"state vector of dimension {self.dim} exceeds {MAX_VECTOR_DIM}")
        return self

    def require_dense(self) -> "SystemShape":
        if self.dim > MAX_DENSE_DIM:
            raise SizeGuardError(f"dense matrix of dimension {self.dim} exceeds {MAX_DENSE_DIM}")
        return self

    def require_multipartite(self) -> "SystemShape":
        if self.n < 2:
            raise ParameterError(f"a multipartite system needs n >= 2, got n={self.n}")
        return self

    @property
    def radix(self) -> np.ndarray:
        """Place values of each party's digit, party 1 first."""
        return self.d ** np.arange(self.n - 1, -1, -1, dtype=np.int64)


def basis_index(label: Sequence[int], shape: SystemShape) -> int:
    """Flat index of a computational-basis label."""
    if len(label) != shape.n:
        raise InvalidLabelError(f"label {tuple(label)} has length {len(label)}, expected {shape.n}")
    index = 0
    for digit in label:
        if not 0 <= digit < shape.d:
            raise InvalidLabelError(f"digit {digit} out of range [0, {shape.d - 1}] in {tuple(label)}")
        index = index * shape.d + int(digit)
    return index


def basis_label(index: int, shape: SystemShape) -> tuple[int, ...]:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < shape.dim:
        raise InvalidLabelError(f"index {index} out of range [0, {shape.dim - 1}]")
    digits = []
    for _ in range(shape.n):
        index, r = divmod(int(index), shape.d)
        digits.append(r)
    return tuple(reversed(digits))


def labels_to_indices(labels: np.ndarray, shape: SystemShape) -> np.ndarray:
    """Vectorised :func:`basis_index` over the last axis of an integer array."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[-1] != shape.n or labels.min(initial=0) < 0 or labels.max(initial=0) >= shape.d:
        raise InvalidLabelError("label array does not fit the system shape")
    return labels @ shape.radix


@dataclass(frozen=True)
class PureState:
    """Normalised amplitude vector over the product basis."""

    shape: SystemShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.shape.require_vector()
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.shape.dim:
            raise ValidationError(f"expected {self.shape.dim} amplitudes, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalised: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def amplitude(self, label: Sequence[int]) -> complex:
        return complex(self.amplitudes[basis_index(label, self.shape)])

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per party."""
        return self.amplitudes.reshape((self.shape.d,) * self.shape.n)


@dataclass(frozen=True)
class Diagnostics:
    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float | None = None

    def ok(self) -> bool:
        if self.hermiticity_deviation > HERMITICITY_TOL or self.trace_deviation > TRACE_TOL:
            return False
        return self.min_eigenvalue is None or self.min_eigenvalue >= -PSD_TOL


def validate(entries, check_psd: bool = False) -> Diagnostics:
    """Measure how far a matrix is from a density matrix. Never raises."""
    m = entries.entries if isinstance(entries, DensityMatrix) else np.asarray(entries)
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    trace_dev = float(abs(np.trace(m) - 1.0))
    min_eig = None
    if check_psd:
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    return Diagnostics(herm, trace_dev, min_eig)


@dataclass(frozen=True)
class DensityMatrix:
    """Dense row-major complex density matrix.

    Hermiticity and unit trace are checked on construction; positivity only
    when ``check_psd`` is set, since it costs a full eigendecomposition.
    Pass ``check=False`` to wrap a matrix that is known to be invalid (for
    diagnostics).
    """

    shape: SystemShape
    entries: np.ndarray = field(repr=False)
    check: bool = field(default=True, repr=False, compare=False)
    check_psd: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        self.shape.require_dense()
        m = np.array(self.entries, dtype=np.complex128)
        D = self.shape.dim
        if m.shape != (D, D):
            raise ValidationError(f"expected a {D}x{D} matrix, got {m.shape}")
        if self.check:
            diag = validate(m, self.check_psd)
            if diag.hermiticity_deviation > HERMITICITY_TOL:
                raise ValidationError(f"matrix is not Hermitian (deviation {diag.hermiticity_deviation:.3g})")
            if diag.trace_deviation > TRACE_TOL:
                raise ValidationError(f"trace differs from 1 by {diag.trace_deviation:.3g}")
            if diag.min_eigenvalue is not None and diag.min_eigenvalue < -PSD_TOL:
                raise ValidationError(f"matrix is not positive (min eigenvalue {diag.min_eigenvalue:.3g})")
        object.__setattr__(self, "entries", _frozen(m))

    def element(self, row: Sequence[int], col: Sequence[int]) -> complex:
        return complex(self.entries[basis_index(row, self.shape), basis_index(col, self.shape)])

    def __add__(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.shape, self.entries + other.entries, check=False)

    def __mul__(self, c: float) -> "DensityMatrix":
        return DensityMatrix(self.shape, c * self.entries, check=False)

    __rmul__ = __mul__


def _parse_keep(keep: Iterable[int], n: int) -> list[int]:
    parties = sorted(set(int(p) for p in keep))
    if not parties or len(parties) == n:
        raise InvalidBipartitionError(f"keep-set {parties} must be a nonempty proper subset of 1..{n}")
    if parties[0] < 1 or parties[-1] > n:
        raise InvalidBipartitionError(f"party indices {parties} out of range 1..{n}")
    return parties


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (1-based), order preserved."""
    n, d = rho.shape.n, rho.shape.d
    kept = [p - 1 for p in _parse_keep(keep, n)]
    traced = [p for p in range(n) if p not in kept]
    t = rho.entries.reshape((d,) * (2 * n))
    # row axes 0..n-1, column axes n..2n-1; contract row/column pairs of traced parties
    row_letters = [chr(ord("a") + i) for i in range(n)]
    col_letters = [chr(ord("A") + i) for i in range(n)]
    for p in traced:
        col_letters[p] = row_letters[p]
    out = "".join(row_letters[p] for p in kept) + "".join(col_letters[p] for p in kept)
    reduced = np.einsum("".join(row_letters) + "".join(col_letters) + "->" + out, t)
    k = len(kept)
    return DensityMatrix(SystemShape(k, d), reduced.reshape(d**k, d**k))


# ---------------------------------------------------------------------------
# element providers


class ElementProvider:
    """Read-only source of matrix elements ``<row|rho|col>``.

    Subclasses implement :meth:`elements` over flat indices; everything else
    is derived from it.
    """

    shape: SystemShape

    def elements(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def element(self, row: Sequence[int], col: Sequence[int]) -> complex:
        r = basis_index(row, self.shape)
        c = basis_index(col, self.shape)
        return complex(self.elements(np.array([r]), np.array([c]))[0])

    def diagonal(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        return self.elements(indices, indices).real

    def to_dense(self) -> np.ndarray:
        D = self.shape.dim
        rows, cols = np.divmod(np.arange(D * D, dtype=np.int64), D)
        return self.elements(rows, cols).reshape(D, D)

    def to_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.shape, self.to_dense())


class DenseProvider(ElementProvider):
    def __init__(self, rho: DensityMatrix):
        self.rho = rho
        self.shape = rho.shape.require_multipartite()

    def elements(self, rows, cols):
        return self.rho.entries[np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)]

    def diagonal(self, indices):
        return self.rho.entries.real[indices, indices]

    def to_dense(self):
        return self.rho.entries.copy()

    def to_density_matrix(self):
        return self.rho


class SparseProvider(ElementProvider):
    """Elements stored in a map keyed by ``(row label, col label)``.

    Absent keys read as zero. Every stored element must have its conjugate
    partner stored as well (diagonal entries must be real).
    """

    def __init__(self, shape: SystemShape, elements: Mapping[tuple, complex], atol: float = 1e-14):
        self.shape = shape.require_multipartite()
        data: dict[tuple[int, int], complex] = {}
        for (row, col), value in elements.items():
            key = (basis_index(row, shape), basis_index(col, shape))
            data[key] = complex(value)
        for (r, c), v in data.items():
            mirror = data.get((c, r), 0.0)
            if abs(v - np.conj(mirror)) > atol:
                raise ValidationError(
                    f"sparse elements are not Hermitian at {basis_label(r, shape)}, {basis_label(c, shape)}"
                )
        self._data = data

    @classmethod
    def from_dense(cls, rho: DensityMatrix, atol: float = 0.0) -> "SparseProvider":
        rows, cols = np.nonzero(np.abs(rho.entries) > atol)
        shape = rho.shape
        elems = {
            (basis_label(int(r), shape), basis_label(int(c), shape)): rho.entries[r, c]
            for r, c in zip(rows, cols)
        }
        return cls(shape, elems, atol=max(atol, 1e-14))

    def items(self):
        """``((row label, col label), value)`` pairs in row-major order."""
        for (r, c) in sorted(self._data):
            yield (basis_label(r, self.shape), basis_label(c, self.shape)), self._data[(r, c)]

    def __len__(self):
        return len(self._data)

    def elements(self, rows, cols):
        get = self._data.get
        return np.array(
            [get((int(r), int(c)), 0j) for r, c in zip(np.ravel(rows), np.ravel(cols))],
            dtype=np.complex128,
        )


class MixtureProvider(ElementProvider):
    """Closed-form elements of ``sum_i w_i |psi_i><psi_i| + noise * 1/D``.

    Never stores a ``D x D`` matrix, only the component state vectors.
    """

    def __init__(self, shape: SystemShape, components: Sequence[tuple[float, PureState]], noise: float = 0.0):
        self.shape = shape.require_multipartite()
        weights = [float(w) for w, _ in components]
        if min(weights + [noise]) < 0:
            raise ParameterError("mixture weights must be nonnegative")
        if abs(sum(weights) + noise - 1.0) > TRACE_TOL:
            raise ParameterError(f"mixture weights sum to {sum(weights) + noise!r}, expected 1")
        for _, psi in components:
            if psi.shape != shape:
                raise ParameterError("component shape does not match the provider shape")
        self.weights = weights
        self.states = [psi for _, psi in components]
        self.noise = float(noise)
        self._amps = np.array([psi.amplitudes for psi in self.states], dtype=np.complex128).reshape(
            len(self.states), shape.dim
        )
        self._w = np.array(weights)

    def elements(self, rows, cols):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        out = np.einsum("i,ij,ij->j", self._w, self._amps[:, rows], self._amps[:, cols].conj())
        return out + (self.noise / self.shape.dim) * (rows == cols)

    def diagonal(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        a = self._amps[:, indices]
        return self._w @ (a.real**2 + a.imag**2) + self.noise / self.shape.dim


def white_noise_provider(psi: PureState, p: float) -> MixtureProvider:
    """Closed-form ``(p/D) 1 + (1-p) |psi><psi|``."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"noise p={p} outside [0, 1]")
    return MixtureProvider(psi.shape, [(1.0 - p, psi)], noise=p)


def as_provider(state) -> ElementProvider:
    """Coerce a state-like object to an :class:`ElementProvider`."""
    if isinstance(state, ElementProvider):
        return state
    if isinstance(state, DensityMatrix):
        return DenseProvider(state)
    if isinstance(state, PureState):
        return MixtureProvider(state.shape, [(1.0, state)])
    raise TypeError(f"cannot read matrix elements from {type(state).__name__}")


# ---------------------------------------------------------------------------
# JSON


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


def _complex(pairs) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError("complex entries must be [re, im] pairs of numbers") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def density_to_json(rho: DensityMatrix) -> dict:
    return {"n": rho.shape.n, "d": rho.shape.d, "entries": _pairs(rho.entries)}


def sparse_to_json(provider: SparseProvider) -> dict:
    return {
        "n": provider.shape.n,
        "d": provider.shape.d,
        "elements": [
            {"row": list(r), "col": list(c), "re": float(v.real), "im": float(v.imag)}
            for (r, c), v in provider.items()
        ],
    }


def pure_to_json(psi: PureState) -> dict:
    return {"n": psi.shape.n, "d": psi.shape.d, "amplitudes": _pairs(psi.amplitudes)}


def from_json(obj: dict, check_psd: bool = False):
    """Decode any of the three JSON layouts.

    Returns a :class:`DensityMatrix` (``entries``), :class:`SparseProvider`
    (``elements``) or :class:`PureState` (``amplitudes``).
    """
    try:
        shape = SystemShape(int(obj["n"]), int(obj["d"]))
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r}") from None
    if "entries" in obj:
        D = shape.dim
        m = _complex(obj["entries"])
        if m.size != D * D:
            raise ValidationError(f"'entries' has {m.size} values, expected {D * D}")
        return DensityMatrix(shape, m.reshape(D, D), check_psd=check_psd)
    if "elements" in obj:
        elems = {}
        for i, e in enumerate(obj["elements"]):
            try:
                elems[(tuple(e["row"]), tuple(e["col"]))] = complex(e["re"], e.get("im", 0.0))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"malformed sparse element #{i}: {exc}") from None
        return SparseProvider(shape, elems)
    if "amplitudes" in obj:
        return PureState(shape, _complex(obj["amplitudes"]))
    raise ValidationError("JSON state needs one of 'entries', 'elements' or 'amplitudes'")


def load_json(path) -> object:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_json(obj)


def to_json(state) -> dict:
    if isinstance(state, DensityMatrix):
        return density_to_json(state)
    if isinstance(state, SparseProvider):
        return sparse_to_json(state)
    if isinstance(state, PureState):
        return pure_to_json(state)
    raise TypeError(f"no JSON layout for {type(state).__name__}")
