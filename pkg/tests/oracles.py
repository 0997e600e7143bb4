"""Independent reference computations used by the tests.

Everything here goes through dense matrices and scipy, staying off the
library's own evolution/expectation code paths so that agreement between
the two is meaningful.
"""

import numpy as np
import scipy.linalg as sla

from ktr.initial import ProjectorSpec
from ktr.paulis import PauliString, PauliSum, dense_matrix


def dense_evolution(hd: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) via scipy's Pade expm (independent of eigh)."""
    return sla.expm(-1j * t * hd)


def overlap_matrices_direct(h: PauliSum, v0_amps: np.ndarray, grid):
    """Double-loop (a, b) oracle for the overlap matrices."""
    hd = dense_matrix(h)
    states = [dense_evolution(hd, float(t)) @ v0_amps for t in grid.times]
    m = grid.m
    a = np.zeros((m, m), dtype=complex)
    b = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            b[i, j] = np.vdot(states[i], states[j])
            a[i, j] = np.vdot(states[i], hd @ states[j])
    return a, b


def dense_projector(spec: ProjectorSpec) -> np.ndarray:
    mat = np.ones((1, 1), dtype=complex)
    for block, flip in zip(spec.t_blocks, spec.alpha):
        factor = (np.eye(2 ** block.n) + (-1) ** flip * dense_matrix(block)) / 2.0
        mat = np.kron(mat, factor)
    return mat


def all_pauli_strings(n: int):
    """Every Hermitian-canonical string on n qubits (4**n of them)."""
    for code in range(4 ** n):
        x, z = [], []
        c = code
        for _ in range(n):
            x.append(c & 1)
            z.append((c >> 1) & 1)
            c >>= 2
        yield PauliString.from_xz(tuple(x), tuple(z))


def brute_force_reversals_dense(h: PauliSum) -> set:
    """Supports (x, z) of all Hermitian involutions with {P, H} = 0, by
    exhaustive dense anticommutator checks (n <= 4 only)."""
    hd = dense_matrix(h)
    found = set()
    for p in all_pauli_strings(h.n):
        if p.weight == 0:
            continue
        pd = dense_matrix(p)
        if np.max(np.abs(pd @ hd + hd @ pd)) == 0.0:
            found.add((p.x, p.z))
    return found


def random_hermitian_string(n: int, rng: np.random.Generator) -> PauliString:
    x = tuple(int(b) for b in rng.integers(0, 2, size=n))
    z = tuple(int(b) for b in rng.integers(0, 2, size=n))
    return PauliString.from_xz(x, z)


def random_pauli_sum(n: int, terms: int, rng: np.random.Generator) -> PauliSum:
    picked = []
    for _ in range(terms):
        string = random_hermitian_string(n, rng)
        while string.weight == 0:
            string = random_hermitian_string(n, rng)
        picked.append((float(rng.normal()), string))
    return PauliSum(n, tuple(picked))


# single-qubit gates for circuit reconstructions
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
IDENTITY2 = np.eye(2, dtype=complex)


def kron_chain(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def controlled_not(n: int, control: int, target: int) -> np.ndarray:
    """Dense CX with qubit 0 as the most significant index bit."""
    dim = 2 ** n
    mat = np.zeros((dim, dim), dtype=complex)
    for basis in range(dim):
        if (basis >> (n - 1 - control)) & 1:
            image = basis ^ (1 << (n - 1 - target))
        else:
            image = basis
        mat[image, basis] = 1.0
    return mat
