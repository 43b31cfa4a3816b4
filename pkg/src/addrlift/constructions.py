"""Hadamard codewords, addressing functions, composition and the XOR lift."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boolfn import STAR, PartialTruthTable, TruthTable, index_of, parity, point
from .errors import InvalidInputError, ResourceLimitError

SIZE_GUARD = 24
XOR_MATERIALIZE_GUARD = 14


def _log2(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise InvalidInputError(f"{length} is not a power of two")
    return length.bit_length() - 1


# --- Hadamard code ----------------------------------------------------------

def hadamard_encode(z) -> tuple[int, ...]:
    """Codeword of length 2^len(z); coordinate S (a bitmask) is prod_{i in S} z_i."""
    zmask = index_of(z)
    return tuple(-1 if bin(S & zmask).count("1") % 2 else 1 for S in range(1 << len(z)))


def hadamard_decode(x) -> tuple[int, ...] | None:
    """Inverse of hadamard_encode, or None if x is not a codeword."""
    r = _log2(len(x))
    z = tuple(x[1 << i] for i in range(r))
    if x[0] != 1 or any(v not in (1, -1) for v in z):
        return None
    return z if hadamard_encode(z) == tuple(x) else None


# --- addressing functions ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class AddressingFunction:
    """Selector table over 2^m address strings; entries in 1..k, 0 for STAR."""

    m: int
    k: int
    selector: np.ndarray
    name: str = ""

    def __post_init__(self):
        sel = np.array(self.selector, dtype=np.int64)
        if sel.shape != (1 << self.m,):
            raise InvalidInputError(f"selector must have {1 << self.m} entries")
        if sel.min() < 0 or sel.max() > self.k:
            raise InvalidInputError("selector entries must lie in 0..k")
        missing = set(range(1, self.k + 1)) - set(sel.tolist())
        if missing:
            raise InvalidInputError(f"selector is not surjective: targets {sorted(missing)} never selected")
        sel.setflags(write=False)
        object.__setattr__(self, "selector", sel)

    def select(self, address) -> int | None:
        j = int(self.selector[index_of(address)])
        return None if j == STAR else j

    def __call__(self, address, targets) -> int | None:
        j = self.select(address)
        return None if j is None else targets[j - 1]

    @property
    def support(self) -> np.ndarray:
        """Address indices that do not select STAR, in increasing order."""
        return np.flatnonzero(self.selector != STAR)


def make_hadd(l: int) -> AddressingFunction:
    """HADD_l: the codeword h(z) selects target 1 + (integer index of z)."""
    r = _log2(l)
    if l < 2:
        raise InvalidInputError("HADD needs l >= 2")
    sel = np.zeros(1 << l, dtype=np.int64)
    for zi in range(l):
        sel[index_of(hadamard_encode(point(zi, r)))] = zi + 1
    return AddressingFunction(l, l, sel, name=f"HADD_{l}")


def make_indexing(k: int) -> AddressingFunction:
    """IND_k: address string with index i selects target i+1."""
    if k < 1:
        raise InvalidInputError("IND needs k >= 1")
    return AddressingFunction(k, 1 << k, np.arange(1, (1 << k) + 1), name=f"IND_{k}")


@dataclass(frozen=True)
class BlockLayout:
    """Block i holds address ids [i(m+k), i(m+k)+m) followed by its k target ids."""

    blocks: int
    m: int
    k: int

    @property
    def width(self) -> int:
        return self.m + self.k

    @property
    def n_vars(self) -> int:
        return self.blocks * self.width

    def address_ids(self, i: int) -> list[int]:
        base = i * self.width
        return list(range(base, base + self.m))

    def target_ids(self, i: int) -> list[int]:
        base = i * self.width + self.m
        return list(range(base, base + self.k))

    def target_id(self, i: int, j: int) -> int:
        """Global id of target j (1-based) of block i."""
        return i * self.width + self.m + j - 1

    def all_address_ids(self) -> list[int]:
        return [v for i in range(self.blocks) for v in self.address_ids(i)]

    def all_target_ids(self) -> list[int]:
        return [v for i in range(self.blocks) for v in self.target_ids(i)]

    def block_of(self, var: int) -> int:
        return var // self.width

    def is_target(self, var: int) -> bool:
        return var % self.width >= self.m

    def target_index(self, var: int) -> int:
        """1-based target position of a target variable within its block."""
        return var % self.width - self.m + 1

    def to_json(self) -> dict:
        return {"blocks": self.blocks, "m": self.m, "k": self.k,
                "address_ids": [self.address_ids(i) for i in range(self.blocks)],
                "target_ids": [self.target_ids(i) for i in range(self.blocks)]}

    @classmethod
    def from_json(cls, doc: dict | str) -> "BlockLayout":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            lay = cls(int(doc["blocks"]), int(doc["m"]), int(doc["k"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed layout document: {exc}") from exc
        if "address_ids" in doc and doc["address_ids"] != [lay.address_ids(i) for i in range(lay.blocks)]:
            raise InvalidInputError("layout address ids do not follow the block convention")
        if "target_ids" in doc and doc["target_ids"] != [lay.target_ids(i) for i in range(lay.blocks)]:
            raise InvalidInputError("layout target ids do not follow the block convention")
        return lay


def compose(f: TruthTable, A: AddressingFunction, guard: int = SIZE_GUARD
            ) -> tuple[PartialTruthTable, BlockLayout]:
    """f applied to the n values addressed block by block; STAR if any block selects STAR."""
    layout = BlockLayout(f.n, A.m, A.k)
    N = layout.n_vars
    if N > guard:
        raise ResourceLimitError(f"composition has {N} variables, guard is {guard}")
    idx = np.arange(1 << N, dtype=np.int64)
    f_index = np.zeros_like(idx)
    star = np.zeros(idx.shape, dtype=bool)
    for i in range(f.n):
        base = i * layout.width
        sel = A.selector[(idx >> base) & ((1 << A.m) - 1)]
        star |= sel == STAR
        bit = (idx >> (base + A.m + np.maximum(sel, 1) - 1)) & 1
        f_index |= bit << i
    values = np.where(star, STAR, f.values[f_index]).astype(np.int8)
    return PartialTruthTable(N, values), layout


def complete(p: PartialTruthTable | TruthTable, fill: int) -> TruthTable:
    if fill not in (1, -1):
        raise InvalidInputError("fill value must be ±1")
    return TruthTable(p.n, np.where(p.values == STAR, fill, p.values))


def check_params(l: int, k: int) -> None:
    _log2(l)
    if l < 2:
        raise InvalidInputError("l must be a power of two >= 2")
    if k < 2 or k % 2:
        raise InvalidInputError("k must be even and >= 2")


def partial_F(l: int, k: int, guard: int = SIZE_GUARD) -> tuple[PartialTruthTable, BlockLayout]:
    """PARITY_{k/2} composed with HADD_l, before completion."""
    check_params(l, k)
    if k * l > guard:
        raise ResourceLimitError(f"F({l},{k}) has {k * l} variables, guard is {guard}")
    return compose(parity(k // 2), make_hadd(l), guard)


def composed_F(l: int, k: int, guard: int = SIZE_GUARD) -> tuple[TruthTable, BlockLayout]:
    """The total function on k*l bits: completion by -1 of PARITY_{k/2}^{HADD_l}."""
    f, layout = partial_F(l, k, guard)
    return complete(f, -1), layout


def params_from_n_delta(n: int, delta: float) -> tuple[int, int]:
    """(l, k) ~ (n^(1-delta), n^delta), each rounded to a power of two, k >= 2."""
    if not 0 < delta < 1 or n < 4:
        raise InvalidInputError("need n >= 4 and 0 < delta < 1")
    l = max(2, 1 << round(math.log2(n ** (1 - delta))))
    k = max(2, 1 << round(math.log2(n ** delta)))
    return l, k


# --- XOR lift ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class XorLift:
    """M(x, y) = F(x xor y); on indices xor is bitwise, i.e. the ±1 product."""

    F: TruthTable

    def entry(self, x: int, y: int) -> int:
        return int(self.F.values[x ^ y])

    def materialize(self, guard: int = XOR_MATERIALIZE_GUARD) -> np.ndarray:
        if self.F.n > guard:
            raise ResourceLimitError(f"{self.F.n}-bit XOR lift exceeds materialization guard {guard}")
        idx = np.arange(1 << self.F.n)
        return self.F.values[idx[:, None] ^ idx[None, :]]


def xor_lift(F: TruthTable) -> XorLift:
    return XorLift(F)
