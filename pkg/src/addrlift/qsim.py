"""Exact state-vector simulation of the query algorithm for the composed function.

Nothing is sampled: measurement outcomes are kept as exact probability
distributions and the algorithm branches over every Bernstein-Vazirani
outcome.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .boolfn import TruthTable, _butterfly, index_of, point
from .constructions import BlockLayout, check_params, hadamard_encode, make_hadd, composed_F
from .errors import InvalidInputError, InvariantViolation

NORM_TOL = 1e-10
SUCCESS_FLOOR = 2 / 3


@dataclass
class QueryCounter:
    oracle_queries: int = 0
    classical_reads: int = 0

    @property
    def total(self) -> int:
        return self.oracle_queries + self.classical_reads


class StateVector:
    """Unit vector in C^N; every operation re-checks the norm."""

    def __init__(self, amplitudes):
        amp = np.asarray(amplitudes, dtype=np.complex128)
        if amp.ndim != 1:
            raise InvalidInputError("amplitudes must be a vector")
        self.amplitudes = amp
        self._check()

    @classmethod
    def uniform(cls, dim: int) -> "StateVector":
        return cls(np.full(dim, 1 / math.sqrt(dim), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def _check(self):
        drift = abs(float(np.linalg.norm(self.amplitudes)) - 1.0)
        if drift > NORM_TOL:
            raise InvariantViolation(f"state norm drifted by {drift:g}")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def hadamard(self) -> "StateVector":
        """H^{(x) log N} on all qubits."""
        return StateVector(_butterfly(self.amplitudes.real) / math.sqrt(self.dim)
                           + 1j * _butterfly(self.amplitudes.imag) / math.sqrt(self.dim))

    def reflect_about_mean(self) -> "StateVector":
        """2|u><u| - I with |u> uniform (the Grover diffusion)."""
        return StateVector(2 * self.amplitudes.mean() - self.amplitudes)


def apply_phase_oracle(s: StateVector, w, counter: QueryCounter) -> StateVector:
    w = np.asarray(w)
    if w.shape != (s.dim,):
        raise InvalidInputError(f"oracle string has length {w.shape}, state has dimension {s.dim}")
    counter.oracle_queries += 1
    return StateVector(s.amplitudes * w)


# --- Bernstein-Vazirani -----------------------------------------------------

def bernstein_vazirani(x_block, counter: QueryCounter | None = None) -> np.ndarray:
    """Outcome distribution over z in {-1,+1}^{log l}, indexed by index_of(z).

    Coordinates of ``x_block`` are indexed by subset bitmasks S of [log l]; one
    query. A Hadamard codeword h(z) yields z with certainty.
    """
    x_block = np.asarray(x_block)
    l = x_block.shape[0]
    if l < 1 or l & (l - 1):
        raise InvalidInputError("block length must be a power of two")
    counter = counter if counter is not None else QueryCounter()
    state = apply_phase_oracle(StateVector.uniform(l), x_block, counter).hadamard()
    return state.probabilities()


# --- verified Grover search -------------------------------------------------

def grover_stages(N: int) -> list[int]:
    """Iteration counts floor(pi/4 sqrt(N/m)) for m = 1, 2, 4, ..., <= N."""
    stages, m = [], 1
    while m <= N:
        stages.append(math.floor(math.pi / 4 * math.sqrt(N / m)))
        m *= 2
    return stages


def _stage_success(N: int, marked: int, iterations: int) -> float:
    theta = math.asin(math.sqrt(marked / N))
    return math.sin((2 * iterations + 1) * theta) ** 2


@functools.lru_cache(maxsize=None)
def repetitions_for(N: int, floor: float = SUCCESS_FLOOR) -> int:
    """Fewest sweeps of the stage schedule that find any nonempty marked set w.p. >= floor."""
    stages = grover_stages(N)
    worst_fail = max(math.prod(1 - _stage_success(N, t, r) for r in stages) for t in range(1, N + 1))
    if worst_fail <= 1 - floor:
        return 1
    if worst_fail >= 1.0:
        raise InvariantViolation(f"schedule for N={N} can miss a marked set with certainty")
    return math.ceil(math.log(1 - floor) / math.log(worst_fail))


@dataclass(frozen=True)
class GroverSchedule:
    N: int
    stages: tuple[int, ...]
    repetitions: int
    queries_per_iteration: int
    reads_per_check: int

    @classmethod
    def build(cls, N: int, known_u: bool = False) -> "GroverSchedule":
        """``known_u``: one of the two strings is already known classically, so the
        marking oracle and the verification each cost one query instead of two."""
        if N < 1:
            raise InvalidInputError("need N >= 1")
        cost = 1 if known_u else 2
        return cls(N, tuple(grover_stages(N)), repetitions_for(N), cost, cost)

    @property
    def worst_case_queries(self) -> int:
        per_sweep = sum(r * self.queries_per_iteration + self.reads_per_check for r in self.stages)
        return self.repetitions * per_sweep


def _amplify(u: np.ndarray, w: np.ndarray, iterations: int, counter: QueryCounter,
             cost: int) -> float:
    """Run amplitude amplification from the uniform state; probability of a marked outcome."""
    N = u.shape[0]
    marks = u * w
    state = StateVector.uniform(N)
    for _ in range(iterations):
        state = apply_phase_oracle(state, marks, counter)
        counter.oracle_queries += cost - 1
        state = state.reflect_about_mean()
    return float(state.probabilities()[marks == -1].sum())


def grover_verified_unequal(u, w, schedule: GroverSchedule | None = None,
                            known_u: bool = False) -> tuple[float, int]:
    """Exact probability of reporting "unequal", and worst-case queries used.

    Each stage measures a candidate index and checks u_i != w_i directly, so
    "unequal" is only ever reported with a verified witness: for u == w the
    probability is exactly 0.
    """
    u, w = np.asarray(u), np.asarray(w)
    if u.shape != w.shape or u.ndim != 1:
        raise InvalidInputError("strings must have equal length")
    schedule = schedule or GroverSchedule.build(u.shape[0], known_u)
    if schedule.N != u.shape[0]:
        raise InvalidInputError("schedule built for a different length")
    if not np.any(u != w):
        return 0.0, schedule.worst_case_queries
    counter = QueryCounter()
    miss = 1.0
    for r in schedule.stages:
        found = _amplify(u, w, r, counter, schedule.queries_per_iteration)
        miss *= 1.0 - found
    return 1.0 - miss ** schedule.repetitions, schedule.worst_case_queries


# --- the full algorithm -----------------------------------------------------

@dataclass
class RunReport:
    output_dist: dict[int, float]
    true_value: int
    success_prob: float
    queries: dict[str, int] = field(default_factory=dict)
    branches: int = 0

    def to_json(self) -> dict:
        return {"output_dist": {str(k): v for k, v in sorted(self.output_dist.items())},
                "true_value": self.true_value, "success_prob": self.success_prob,
                "queries": dict(self.queries)}


def true_value(x, l: int, k: int, layout: BlockLayout) -> int:
    """F evaluated directly from the definition (for checking the simulation)."""
    sel = make_hadd(l).selector
    out = 1
    x = np.asarray(x)
    for i in range(layout.blocks):
        j = int(sel[index_of(x[layout.address_ids(i)])])
        if j == 0:
            return -1
        out *= int(x[layout.target_id(i, j)])
    return out


def algorithm_F(x, l: int, k: int, layout: BlockLayout) -> RunReport:
    """Bernstein-Vazirani per block, verified Grover equality check, parity of selected targets."""
    check_params(l, k)
    x = np.asarray(x, dtype=np.int64)
    if layout != BlockLayout(k // 2, l, l) or x.shape != (k * l,):
        raise InvalidInputError("input/layout do not match F(l, k)")
    if not np.all(np.abs(x) == 1):
        raise InvalidInputError("input must be ±1")
    blocks = k // 2
    r = l.bit_length() - 1
    address = np.concatenate([x[layout.address_ids(i)] for i in range(blocks)])
    schedule = GroverSchedule.build(blocks * l, known_u=True)

    bv_dists = []
    for i in range(blocks):
        bv_dists.append(bernstein_vazirani(x[layout.address_ids(i)]))
    bv_queries = blocks

    dist = {1: 0.0, -1: 0.0}
    branches = 0
    # every outcome is a branch, including those of probability zero
    for outcome in itertools.product(range(l), repeat=blocks):
        p_branch = math.prod(float(bv_dists[i][zi]) for i, zi in enumerate(outcome))
        branches += 1
        guess = np.concatenate([hadamard_encode(point(int(zi), r)) for zi in outcome])
        p_unequal, _ = grover_verified_unequal(guess, address, schedule)
        dist[-1] += p_branch * p_unequal
        if p_unequal < 1.0:
            # codeword h(z) selects target 1 + index(z)
            par = math.prod(int(x[layout.target_id(i, int(zi) + 1)]) for i, zi in enumerate(outcome))
            dist[par] += p_branch * (1.0 - p_unequal)
    total = sum(dist.values())
    if abs(total - 1.0) > NORM_TOL:
        raise InvariantViolation(f"output distribution sums to {total}")
    truth = true_value(x, l, k, layout)
    queries = {"bv": bv_queries, "grover": schedule.worst_case_queries,
               "classical": blocks}
    queries["total"] = queries["bv"] + queries["grover"] + queries["classical"]
    return RunReport(dist, truth, dist[truth], queries, branches)


def query_budget(l: int, k: int) -> int:
    """k/2 + worst-case Grover cost on kl/2 positions + k/2."""
    return k // 2 + GroverSchedule.build(k * l // 2, known_u=True).worst_case_queries + k // 2


def fix_addresses_to_first_target(l: int, k: int) -> TruthTable:
    """F with every block's address fixed to the codeword selecting target 1.

    Every assignment of all k*l/2 targets is evaluated through the truth table
    of F; the value must depend on the first target of each block only, and the
    function of those k/2 bits is returned.
    """
    F, layout = composed_F(l, k)
    blocks = k // 2
    first = index_of(hadamard_encode(point(0, l.bit_length() - 1)))
    base = 0
    for i in range(blocks):
        base |= first << layout.address_ids(i)[0]
    targets = layout.all_target_ids()
    values = np.zeros(1 << blocks, dtype=np.int8)
    for ti in range(1 << len(targets)):
        idx = base
        for b, v in enumerate(targets):
            idx |= ((ti >> b) & 1) << v
        key = sum(((idx >> layout.target_id(i, 1)) & 1) << i for i in range(blocks))
        val = int(F.values[idx])
        if values[key] not in (0, val):
            raise InvariantViolation("value depends on a target that is not selected")
        values[key] = val
    return TruthTable(blocks, values)
