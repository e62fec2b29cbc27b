"""Small dense complex linear algebra for qubit and qubit-metric Hilbert spaces.

All composite spaces use big-endian Kronecker ordering: the leftmost factor
varies slowest, so for the layout ``(2, 2, 2)`` = A (x) B (x) metric the basis
index of ``|a b m>`` is ``4*a + 2*b + m``.  Each factor is ordered ``(|0>, |1>)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

ATOL = 1e-12
EIG_ATOL = 1e-10
MAX_VECTOR_DIM = 8


@dataclass(frozen=True)
class FactorLayout:
    """Dimensions of the tensor factors, in Kronecker order."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {self.factor_dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.factor_dims))

    def __len__(self):
        return len(self.factor_dims)

    def check(self, dim: int) -> None:
        if self.total != dim:
            raise ValueError(
                f"layout {self.factor_dims} expects dimension {self.total}, got {dim}"
            )


def _as_layout(dims, dim: int) -> FactorLayout:
    layout = dims if isinstance(dims, FactorLayout) else FactorLayout(tuple(dims) if dims is not None else (dim,))
    layout.check(dim)
    return layout


@dataclass(frozen=True, eq=False)
class StateVector:
    """Ket over a tensor-product space of total dimension 2, 4 or 8."""

    amplitudes: np.ndarray
    layout: FactorLayout = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        dim = amps.size
        if dim not in (2, 4, 8):
            raise ValueError(f"state dimension must be a power of 2 up to {MAX_VECTOR_DIM}, got {dim}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "layout", _as_layout(self.layout, dim))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = ATOL) -> bool:
        return abs(self.norm - 1.0) <= atol

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator.

    Construction validates every invariant; pass ``check=False`` only for
    intermediate objects that are validated elsewhere.
    """

    data: np.ndarray
    layout: FactorLayout = None
    check: bool = True

    def __post_init__(self):
        rho = np.array(self.data, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix entries must be finite")
        rho.setflags(write=False)
        object.__setattr__(self, "data", rho)
        object.__setattr__(self, "layout", _as_layout(self.layout, rho.shape[0]))
        if self.check:
            validate_density(rho)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


def validate_density(rho: np.ndarray, atol: float = ATOL, eig_atol: float = EIG_ATOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit trace and PSD."""
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > atol:
        raise ValueError(f"density matrix is not Hermitian (max deviation {herm_err:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr:.15g}, expected 1")
    lam_min = np.linalg.eigvalsh(rho).min()
    if lam_min < -eig_atol:
        raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")


def ket(*bits: int) -> StateVector:
    """Computational basis ket, e.g. ``ket(0, 1)`` is ``|01>``."""
    vecs = [np.eye(2, dtype=complex)[b] for b in bits]
    return StateVector(reduce(np.kron, vecs), (2,) * len(bits))


PLUS = StateVector(np.array([1, 1]) / np.sqrt(2))
MINUS = StateVector(np.array([1, -1]) / np.sqrt(2))

State = Union[StateVector, DensityMatrix]


def tensor(a: State, b: State) -> State:
    """Kronecker product ``a (x) b`` with ``a`` as the slow index."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        if a.dim * b.dim > MAX_VECTOR_DIM:
            raise ValueError(
                f"tensor product dimension {a.dim * b.dim} exceeds {MAX_VECTOR_DIM}"
            )
        layout = a.layout.factor_dims + b.layout.factor_dims
        return StateVector(np.kron(a.amplitudes, b.amplitudes), layout)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        layout = a.layout.factor_dims + b.layout.factor_dims
        return DensityMatrix(np.kron(a.data, b.data), layout)
    raise TypeError("tensor operands must both be state vectors or both density matrices")


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def projector(v: StateVector, atol: float = ATOL) -> DensityMatrix:
    """Return ``|v><v|``; ``v`` must be normalized."""
    if not v.is_normalized(atol):
        raise ValueError(f"projector requires a normalized vector, norm is {v.norm:.15g}")
    return DensityMatrix(np.outer(v.amplitudes, v.amplitudes.conj()), v.layout)


def partial_trace(
    rho: DensityMatrix,
    layout: FactorLayout | Sequence[int] | None,
    keep: Iterable[int],
) -> DensityMatrix:
    """Trace out every factor not listed in ``keep``.

    Parameters
    ----------
    rho : DensityMatrix
        Operator on the composite space.
    layout : FactorLayout, sequence of int or None
        Factor dimensions; ``None`` uses ``rho.layout``.
    keep : iterable of int
        Indices of the factors to keep, in any order.  The result keeps them
        in their original relative order.

    Returns
    -------
    DensityMatrix
        Reduced operator on the kept factors.
    """
    layout = rho.layout if layout is None else layout
    if not isinstance(layout, FactorLayout):
        layout = FactorLayout(tuple(layout))
    if layout.total != rho.dim:
        raise ValueError(
            f"layout {layout.factor_dims} expects dimension {layout.total}, "
            f"but the density matrix has dimension {rho.dim}"
        )
    n = len(layout)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} factors")

    dims = layout.factor_dims
    t = rho.data.reshape(dims + dims)
    # einsum labels: row index i, column index n+i; traced factors share a label
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    kept_dims = tuple(dims[i] for i in keep)
    d = int(np.prod(kept_dims))
    return DensityMatrix(reduced.reshape(d, d), kept_dims)


def purity(rho: DensityMatrix) -> float:
    """``Tr rho^2`` (real for Hermitian ``rho``)."""
    m = rho.data
    # Tr(rho rho) = sum_ij rho_ij rho_ji = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def fidelity_pure(rho: DensityMatrix, v: StateVector) -> float:
    """Overlap ``<v|rho|v>`` of a density matrix with a pure state."""
    if rho.dim != v.dim:
        raise ValueError(f"dimension mismatch: density matrix {rho.dim}, vector {v.dim}")
    if not v.is_normalized():
        raise ValueError("fidelity_pure requires a normalized vector")
    a = v.amplitudes
    return float(np.real(a.conj() @ rho.data @ a))


def overlap(u: StateVector, v: StateVector) -> complex:
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def global_phase_equal(u: StateVector, v: StateVector, atol: float = ATOL) -> bool:
    """True iff ``|<u|v>| = 1`` within ``atol`` (same ray in Hilbert space)."""
    return abs(abs(overlap(u, v)) - 1.0) <= atol


def min_eigenvalue(rho: DensityMatrix) -> float:
    return float(np.linalg.eigvalsh(rho.data).min())


PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """Pauli expectation values ``(<X>, <Y>, <Z>)`` of a single-qubit state."""
    if rho.dim != 2:
        raise ValueError(f"Bloch vector needs a qubit, got dimension {rho.dim}")
    return np.array([np.real(np.trace(rho.data @ PAULI[k])) for k in "XYZ"])
