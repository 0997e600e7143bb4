"""Regularized generalized eigenvalue solver and exact references.

The pencil A x = lambda B x is solved by eigendecomposing the Gram matrix
B, discarding the eigenspace below a relative threshold (B is positive
semidefinite in exact arithmetic, so negative eigenvalues are numerical
noise and always dropped), whitening A into the kept subspace and solving
the ordinary Hermitian problem there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePencilError
from .paulis import PauliSum, dense_matrix
from .krylov import ToeplitzPencil

DEFAULT_EPSILON = 1e-8

_HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumResult:
    """Low-lying spectrum estimate plus conditioning diagnostics."""

    eigenvalues: np.ndarray
    kept_dim: int
    threshold: float
    b_eigenvalues: np.ndarray

    def __post_init__(self):
        evals = np.array(self.eigenvalues, dtype=float, copy=True)
        bvals = np.array(self.b_eigenvalues, dtype=float, copy=True)
        evals.flags.writeable = False
        bvals.flags.writeable = False
        object.__setattr__(self, "eigenvalues", evals)
        object.__setattr__(self, "b_eigenvalues", bvals)

    @property
    def ground(self) -> float:
        return float(self.eigenvalues[0])


def solve_dense(a: np.ndarray, b: np.ndarray,
                epsilon: float = DEFAULT_EPSILON) -> SpectrumResult:
    """Threshold-and-whiten solve on assembled Hermitian matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    if np.max(np.abs(a - a.conj().T)) > _HERMITICITY_TOL:
        raise ValueError("A is not Hermitian within tolerance")
    if np.max(np.abs(b - b.conj().T)) > _HERMITICITY_TOL:
        raise ValueError("B is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    b = 0.5 * (b + b.conj().T)
    b_evals, b_evecs = np.linalg.eigh(b)
    b_max = float(b_evals[-1])
    if b_max <= 0.0:
        raise DegeneratePencilError("Gram matrix has no positive spectrum")
    keep = (b_evals > 0.0) & (b_evals >= epsilon * b_max)
    kept_dim = int(np.count_nonzero(keep))
    if kept_dim == 0:
        raise DegeneratePencilError(
            f"no Gram eigenvalue survives the threshold {epsilon:g}")
    whitener = b_evecs[:, keep] / np.sqrt(b_evals[keep])
    reduced = whitener.conj().T @ a @ whitener
    reduced = 0.5 * (reduced + reduced.conj().T)
    eigenvalues = np.linalg.eigvalsh(reduced)
    return SpectrumResult(eigenvalues=np.sort(eigenvalues), kept_dim=kept_dim,
                          threshold=epsilon, b_eigenvalues=b_evals)


def solve(pencil: ToeplitzPencil, epsilon: float = DEFAULT_EPSILON) -> SpectrumResult:
    """Solve the assembled pencil; see :func:`solve_dense`."""
    return solve_dense(pencil.matrix_a(), pencil.matrix_b(), epsilon)


def exact_reference(h: PauliSum, max_qubits: int | None = None) -> np.ndarray:
    """Full sorted spectrum of the dense Hamiltonian (desk-scale oracle)."""
    return np.linalg.eigvalsh(dense_matrix(h, max_qubits=max_qubits))


def sector_ground_energy(h: PauliSum, generators: list[PauliSum],
                         max_qubits: int | None = None) -> float:
    """Ground energy restricted to the joint +1 eigenspace of the generators."""
    hd = dense_matrix(h, max_qubits=max_qubits)
    if not generators:
        return float(np.linalg.eigvalsh(hd)[0])
    dense_gens = [dense_matrix(g, max_qubits=max_qubits) for g in generators]
    for i, gd in enumerate(dense_gens):
        if np.max(np.abs(gd @ hd - hd @ gd)) > 1e-12:
            raise ValueError(f"generator {i} does not commute with the Hamiltonian")
        for j in range(i):
            if np.max(np.abs(gd @ dense_gens[j] - dense_gens[j] @ gd)) > 1e-12:
                raise ValueError(f"generators {i} and {j} do not commute")
    dim = hd.shape[0]
    projector = np.eye(dim, dtype=complex)
    for gd in dense_gens:
        projector = projector @ (np.eye(dim) + gd) / 2.0
    rank = int(round(np.trace(projector).real))
    if rank == 0:
        raise ValueError("the joint +1 sector is empty")
    evals, evecs = np.linalg.eigh(projector)
    basis = evecs[:, evals > 0.5]
    restricted = basis.conj().T @ hd @ basis
    restricted = 0.5 * (restricted + restricted.conj().T)
    return float(np.linalg.eigvalsh(restricted)[0])
