"""Dense statevector kernel.

States live on n qubits as complex vectors of length 2**n, basis index
``i = sum_j q_j * 2**(n-1-j)`` (qubit 0 is the most significant bit, in
line with the Kronecker convention of :mod:`ktr.paulis`).  A Pauli string
acts as an amplitude permutation with +-1 / +-i phases; time evolution
under exp(-i t H) runs either exactly, through a cached Hermitian
eigenfactorization of the dense Hamiltonian, or with a symmetric
second-order Trotter splitting built from closed-form single-string
exponentials exp(-i theta P) = cos(theta) I - i sin(theta) P.

All values are immutable after construction and all operations are pure,
so states and plans can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalInconsistencyError
from .paulis import PauliString, PauliSum, _PHASES, dense_matrix

#: absolute imaginary residue tolerated in a Hermitian expectation
EXPECTATION_IMAG_TOL = 1e-12

#: relative Frobenius tolerance for the eigenfactorization self-check
FACTORIZATION_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Unit-norm amplitude vector on n qubits."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amps, dtype=complex, copy=True)
        if arr.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} amplitudes, got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "amps", arr)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def from_amplitudes(n: int, amps: Sequence[complex] | np.ndarray,
                    normalize: bool = False) -> StateVector:
    arr = np.asarray(amps, dtype=complex)
    if normalize:
        nrm = np.linalg.norm(arr)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        arr = arr / nrm
    return StateVector(n, arr)


def basis_state(n: int, bits: int | str | Sequence[int]) -> StateVector:
    """Computational basis state; ``bits`` is an index or a q0-first pattern."""
    if isinstance(bits, (str, list, tuple)):
        pattern = [int(b) for b in bits]
        if len(pattern) != n or any(b not in (0, 1) for b in pattern):
            raise ValueError("bit pattern must have one bit per qubit")
        index = 0
        for b in pattern:
            index = (index << 1) | b
    else:
        index = int(bits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def plus_state(n: int) -> StateVector:
    return StateVector(n, np.full(2 ** n, 2.0 ** (-n / 2), dtype=complex))


def product_state(factors: Iterable[Sequence[complex]]) -> StateVector:
    """Tensor product of single-qubit amplitude pairs, qubit 0 first."""
    amps = np.ones(1, dtype=complex)
    count = 0
    for factor in factors:
        vec = np.asarray(factor, dtype=complex)
        if vec.shape != (2,):
            raise ValueError("each factor must be a length-2 amplitude pair")
        amps = np.kron(amps, vec)
        count += 1
    return StateVector(count, amps)


def tensor_states(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(a.n + b.n, np.kron(a.amps, b.amps))


def random_state(n: int, rng: int | np.random.Generator) -> StateVector:
    """Haar-ish random unit vector (Gaussian amplitudes, normalized)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector(n, amps / np.linalg.norm(amps))


def _mask(bits: tuple[int, ...]) -> int:
    acc = 0
    for b in bits:
        acc = (acc << 1) | b
    return acc


def _parity(values: np.ndarray) -> np.ndarray:
    # folds up to 16 bits, enough for the dense cap
    v = values.copy()
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


def apply_pauli_to_array(amps: np.ndarray, p: PauliString) -> np.ndarray:
    """Low-level Pauli action on a raw (possibly unnormalized) array."""
    n = p.n
    dim = amps.shape[0]
    if dim != 2 ** n:
        raise ValueError("amplitude length does not match the string")
    x_mask = _mask(p.x)
    z_mask = _mask(p.z)
    idx = np.arange(dim)
    src = idx ^ x_mask
    signs = 1.0 - 2.0 * _parity(src & z_mask)
    return _PHASES[p.phase_exp] * signs * amps[src]


def apply_pauli(s: StateVector, p: PauliString) -> StateVector:
    if s.n != p.n:
        raise ValueError(f"qubit counts differ: {s.n} vs {p.n}")
    return StateVector(s.n, apply_pauli_to_array(s.amps, p))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    return complex(np.vdot(a.amps, b.amps))


def matrix_element(a: StateVector, o: PauliSum, b: StateVector) -> complex:
    """<a|O|b> for a Pauli-sum observable."""
    if a.n != o.n or b.n != o.n:
        raise ValueError("qubit counts differ")
    acc = 0.0 + 0.0j
    for coeff, string in o.terms:
        acc += coeff * np.vdot(a.amps, apply_pauli_to_array(b.amps, string))
    return complex(acc)


def expectation(s: StateVector, o: PauliSum) -> float:
    """<s|O|s>; the imaginary residue is checked and discarded."""
    value = matrix_element(s, o, s)
    if abs(value.imag) > EXPECTATION_IMAG_TOL:
        raise InternalInconsistencyError(
            f"Hermitian expectation has imaginary residue {value.imag:.3e}")
    return value.real


class EvolutionPlan:
    """Reusable strategy for evolving states under one Hamiltonian.

    ``exact`` mode factorizes the dense Hamiltonian once (H = Q L Q+) and
    applies U(t) = Q exp(-i t L) Q+; the factorization is cached and
    read-only, so concurrent evolutions may share it.  ``trotter2`` mode
    applies the symmetric second-order splitting with
    ceil(|t| * steps_per_unit) steps, running the term exponentials in
    stored order forward and then backward with half steps.
    """

    def __init__(self, h: PauliSum, mode: str = "exact",
                 steps_per_unit: int | None = None,
                 max_qubits: int | None = None):
        if mode not in ("exact", "trotter2"):
            raise ValueError(f"unknown evolution mode {mode!r}")
        if mode == "trotter2":
            if steps_per_unit is None or int(steps_per_unit) < 1:
                raise ValueError("trotter2 mode needs steps_per_unit >= 1")
            steps_per_unit = int(steps_per_unit)
        self.h = h
        self.mode = mode
        self.steps_per_unit = steps_per_unit
        self.max_qubits = max_qubits
        self._factorization: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def exact(cls, h: PauliSum, max_qubits: int | None = None) -> "EvolutionPlan":
        return cls(h, mode="exact", max_qubits=max_qubits)

    @classmethod
    def trotter2(cls, h: PauliSum, steps_per_unit: int) -> "EvolutionPlan":
        return cls(h, mode="trotter2", steps_per_unit=steps_per_unit)

    def factorization(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of the dense Hamiltonian (cached)."""
        if self._factorization is None:
            hd = dense_matrix(self.h, max_qubits=self.max_qubits)
            evals, evecs = np.linalg.eigh(hd)
            residual = np.linalg.norm((evecs * evals) @ evecs.conj().T - hd)
            scale = max(np.linalg.norm(hd), 1.0)
            if residual > FACTORIZATION_TOL * scale:
                raise InternalInconsistencyError(
                    f"eigenfactorization residual {residual:.3e} exceeds tolerance")
            evals.flags.writeable = False
            evecs.flags.writeable = False
            self._factorization = (evals, evecs)
        return self._factorization

    def prepare(self) -> "EvolutionPlan":
        """Force the cache to exist (useful before fanning out threads)."""
        if self.mode == "exact":
            self.factorization()
        return self


def _trotter_step(amps: np.ndarray, masks: list[tuple[int, int, int, float]],
                  dt: float, dim: int) -> np.ndarray:
    idx = np.arange(dim)
    for x_mask, z_mask, phase_exp, coeff in masks + masks[::-1]:
        theta = 0.5 * dt * coeff
        src = idx ^ x_mask
        signs = 1.0 - 2.0 * _parity(src & z_mask)
        rotated = _PHASES[phase_exp] * signs * amps[src]
        amps = math.cos(theta) * amps - 1j * math.sin(theta) * rotated
    return amps


def evolve(plan: EvolutionPlan, t: float, s: StateVector) -> StateVector:
    """exp(-i t H) |s> under the plan's strategy."""
    if plan.h.n != s.n:
        raise ValueError(f"qubit counts differ: {plan.h.n} vs {s.n}")
    if t == 0.0:
        return s
    if plan.mode == "exact":
        evals, evecs = plan.factorization()
        amps = evecs @ (np.exp(-1j * t * evals) * (evecs.conj().T @ s.amps))
        return StateVector(s.n, amps)
    steps = max(1, math.ceil(abs(t) * plan.steps_per_unit))
    dt = t / steps
    masks = [(_mask(p.x), _mask(p.z), p.phase_exp, c) for c, p in plan.h.terms]
    amps = s.amps.copy()
    for _ in range(steps):
        amps = _trotter_step(amps, masks, dt, s.dim)
    return StateVector(s.n, amps)
