"""Boolean functions on the {-1,+1} cube and their Fourier spectra.

Index convention (used everywhere in the package): a point x in {-1,+1}^n is
stored at the integer index whose bit i is 1 exactly when x_{i+1} = -1, so
variable 1 is the least-significant bit. A subset S of variables is stored as
the bitmask with bit i set when variable i+1 is in S. With this convention
chi_S(x) = (-1)^popcount(S & x).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError, UndefinedQuantityError

MAX_TRANSFORM_N = 24
STAR = 0  # in-memory code for the undefined value of a partial function

_CHARS = {1: "+", -1: "-", STAR: "*"}
_CODES = {"+": 1, "-": -1, "*": STAR}


def _log2_exact(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise InvalidInputError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def point(index: int, n: int) -> tuple[int, ...]:
    """The ±1 point stored at ``index``."""
    return tuple(-1 if (index >> i) & 1 else 1 for i in range(n))


def index_of(x: Sequence[int]) -> int:
    idx = 0
    for i, v in enumerate(x):
        if v == -1:
            idx |= 1 << i
        elif v != 1:
            raise InvalidInputError(f"coordinate {v!r} is not ±1")
    return idx


def subset_mask(S: Iterable[int]) -> int:
    """Bitmask of a set of 1-based variable indices."""
    mask = 0
    for i in S:
        if i < 1:
            raise InvalidInputError(f"variable index {i} must be >= 1")
        mask |= 1 << (i - 1)
    return mask


def popcounts(n: int) -> np.ndarray:
    """popcount of every integer in [0, 2^n)."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[1 << i: 1 << (i + 1)] = counts[: 1 << i] + 1
    return counts


@dataclass(frozen=True, eq=False)
class TruthTable:
    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int8)
        if vals.shape != (1 << self.n,):
            raise InvalidInputError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if not np.all((vals == 1) | (vals == -1)):
            raise InvalidInputError("total truth table entries must be ±1")
        object.__setattr__(self, "values", _frozen(vals))

    def __call__(self, x: Sequence[int]) -> int:
        return int(self.values[index_of(x)])

    def __eq__(self, other):
        return (isinstance(other, TruthTable) and self.n == other.n
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    @property
    def promise(self) -> np.ndarray:
        return np.ones(1 << self.n, dtype=bool)

    @property
    def promise_count(self) -> int:
        return 1 << self.n


@dataclass(frozen=True, eq=False)
class PartialTruthTable:
    """Values in {-1, +1, STAR}; STAR (stored as 0) marks inputs outside the promise."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int8)
        if vals.shape != (1 << self.n,):
            raise InvalidInputError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if not np.all((vals == 1) | (vals == -1) | (vals == STAR)):
            raise InvalidInputError("partial truth table entries must be ±1 or STAR")
        if not np.any(vals != STAR):
            raise InvalidInputError("partial function has an empty promise domain")
        object.__setattr__(self, "values", _frozen(vals))

    def __call__(self, x: Sequence[int]) -> int | None:
        v = int(self.values[index_of(x)])
        return None if v == STAR else v

    def __eq__(self, other):
        return (isinstance(other, PartialTruthTable) and self.n == other.n
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    @property
    def promise(self) -> np.ndarray:
        return self.values != STAR

    @property
    def promise_count(self) -> int:
        return int(np.count_nonzero(self.values != STAR))

    @property
    def is_total(self) -> bool:
        return self.promise_count == 1 << self.n


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.shape != (1 << self.n,):
            raise InvalidInputError(f"expected {1 << self.n} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", _frozen(c))

    def __getitem__(self, S) -> float:
        mask = S if isinstance(S, (int, np.integer)) else subset_mask(S)
        return float(self.coeffs[mask])


# --- constructors -----------------------------------------------------------

def from_callable(n: int, fn: Callable[[tuple[int, ...]], int]) -> TruthTable:
    return TruthTable(n, np.array([fn(point(i, n)) for i in range(1 << n)], dtype=np.int8))


def parity(n: int) -> TruthTable:
    return TruthTable(n, np.where(popcounts(n) % 2 == 1, -1, 1).astype(np.int8))


def constant(n: int, value: int = 1) -> TruthTable:
    return TruthTable(n, np.full(1 << n, value, dtype=np.int8))


def majority(n: int) -> TruthTable:
    if n % 2 == 0:
        raise InvalidInputError("majority needs an odd number of variables")
    # value -1 when a strict majority of coordinates are -1
    return TruthTable(n, np.where(popcounts(n) > n // 2, -1, 1).astype(np.int8))


def dictator(n: int, i: int) -> TruthTable:
    return TruthTable(n, np.where((np.arange(1 << n) >> (i - 1)) & 1, -1, 1).astype(np.int8))


def random_function(n: int, rng: np.random.Generator) -> TruthTable:
    return TruthTable(n, rng.choice(np.array([-1, 1], dtype=np.int8), size=1 << n))


# --- Fourier transform ------------------------------------------------------

def chi(S: Iterable[int], x: Sequence[int]) -> int:
    """prod_{i in S} x_i for 1-based variable indices S."""
    out = 1
    for i in S:
        if not 1 <= i <= len(x):
            raise InvalidInputError(f"variable {i} outside 1..{len(x)}")
        out *= x[i - 1]
    return out


def _butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform, O(n 2^n), on a float copy."""
    n = _log2_exact(a.shape[0])
    if n > MAX_TRANSFORM_N:
        raise ResourceLimitError(f"n={n} exceeds transform guard {MAX_TRANSFORM_N}")
    a = np.array(a, dtype=np.float64, copy=True)
    h = 1
    while h < a.shape[0]:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h *= 2
    return a


def wht_forward(values) -> FourierSpectrum:
    """coeffs[S] = 2^-n sum_x values[x] chi_S(x)."""
    values = np.asarray(values)
    if values.ndim != 1:
        raise InvalidInputError("expected a one-dimensional value array")
    n = _log2_exact(values.shape[0])
    return FourierSpectrum(n, _butterfly(values) / (1 << n))


def wht_inverse(spectrum: FourierSpectrum) -> np.ndarray:
    """values[x] = sum_S coeffs[S] chi_S(x)."""
    return _butterfly(spectrum.coeffs)


def spectrum(f: TruthTable) -> FourierSpectrum:
    return wht_forward(f.values)


def spectral_norm(spec: FourierSpectrum) -> float:
    return float(np.abs(spec.coeffs).sum())


def min_entropy(spec: FourierSpectrum) -> float:
    top = float(np.abs(spec.coeffs).max())
    if top == 0.0:
        raise UndefinedQuantityError("min-entropy of the zero spectrum")
    return max(0.0, -math.log2(top))


def influence(spec: FourierSpectrum) -> float:
    return float(np.dot(popcounts(spec.n), spec.coeffs ** 2))


def fourier_weight(spec: FourierSpectrum) -> float:
    return float(np.dot(spec.coeffs, spec.coeffs))


# --- function file format ---------------------------------------------------

def dumps(f: TruthTable | PartialTruthTable) -> str:
    kind = "total" if isinstance(f, TruthTable) else "partial"
    doc = {"version": 1, "n": f.n, "kind": kind,
           "values": "".join(_CHARS[int(v)] for v in f.values)}
    return json.dumps(doc)


def loads(text: str) -> TruthTable | PartialTruthTable:
    try:
        doc = json.loads(text)
        n, kind, chars = int(doc["n"]), doc["kind"], doc["values"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed function file: {exc}") from exc
    if doc.get("version") != 1:
        raise InvalidInputError(f"unsupported function file version {doc.get('version')!r}")
    if len(chars) != 1 << n:
        raise InvalidInputError(f"value string has length {len(chars)}, expected {1 << n}")
    try:
        vals = np.array([_CODES[c] for c in chars], dtype=np.int8)
    except KeyError as exc:
        raise InvalidInputError(f"bad value character {exc}") from exc
    if kind == "total":
        return TruthTable(n, vals)
    if kind == "partial":
        return PartialTruthTable(n, vals)
    raise InvalidInputError(f"unknown kind {kind!r}")
