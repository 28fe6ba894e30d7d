"""Dense linear algebra over small labelled tensor-product Hilbert spaces.

States are flat complex amplitude vectors tagged with the dimension of each
tensor factor (leftmost factor = most significant mixed-radix digit).
Operators are dense square matrices.  Everything is immutable after
construction, so values can be shared freely between threads or processes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORMALIZED_ATOL = 1e-12
UNITARY_ATOL = 1e-10
PROJECTOR_ATOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Amplitude vector over an ordered tensor product of finite factors.

    ``normalized=True`` asserts unit norm; the assertion is checked at
    construction time and a violation raises ``ValueError``.
    """

    amps: np.ndarray
    factor_dims: tuple[int, ...]
    normalized: bool = False

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        if amps.size != math.prod(dims):
            raise ValueError(f"{amps.size} amplitudes do not fill factors {dims}")
        if self.normalized:
            err = abs(float(np.sum(np.abs(amps) ** 2)) - 1.0)
            if err > NORMALIZED_ATOL:
                raise ValueError(f"squared norm deviates from 1 by {err:.3e}")
        object.__setattr__(self, "amps", _freeze(amps))
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix with optional unitary/projector guarantees.

    Setting a flag makes the constructor verify the corresponding property
    (max-entry deviation at most 1e-10) and fail loudly otherwise.
    """

    entries: np.ndarray
    unitary: bool = False
    projector: bool = False

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if self.unitary:
            dev = float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())
            if dev > UNITARY_ATOL:
                raise ValueError(f"unitarity violated by {dev:.3e}")
        if self.projector:
            dev = max(
                float(np.abs(m @ m - m).max()),
                float(np.abs(m.conj().T - m).max()),
            )
            if dev > PROJECTOR_ATOL:
                raise ValueError(f"projector laws violated by {dev:.3e}")
        object.__setattr__(self, "entries", _freeze(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def omega(d: int) -> complex:
    """Primitive d-th root of unity exp(2*pi*i/d)."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return complex(np.exp(2j * np.pi / d))


def identity(d: int) -> Operator:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return Operator(np.eye(d, dtype=complex), unitary=True, projector=True)


def pauli_x(d: int) -> Operator:
    """Cyclic shift X|j> = |j+1 mod d> on a d-level system."""
    if d < 2:
        raise ValueError(f"shift operator needs dimension >= 2, got {d}")
    return Operator(np.roll(np.eye(d, dtype=complex), 1, axis=0), unitary=True)


def pauli_z(d: int) -> Operator:
    """Clock operator diag(1, w, ..., w^(d-1)) with w = exp(2*pi*i/d)."""
    if d < 2:
        raise ValueError(f"clock operator needs dimension >= 2, got {d}")
    return Operator(np.diag(omega(d) ** np.arange(d)), unitary=True)


def hadamard() -> Operator:
    return Operator(np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2), unitary=True)


def fourier_ket(d: int, k: int) -> Ket:
    """k-th discrete Fourier vector |u_k> = d^(-1/2) sum_j w^(-kj) |j>.

    With this sign convention X|u_k> = w^k |u_k> and Z|u_k> = |u_{k-1 mod d}>.
    """
    if d < 2:
        raise ValueError(f"Fourier basis needs dimension >= 2, got {d}")
    if not 0 <= k < d:
        raise IndexError(f"Fourier index {k} outside [0, {d})")
    j = np.arange(d)
    return Ket(omega(d) ** (-k * j) / math.sqrt(d), (d,), normalized=True)


def basis_ket(factor_dims: Sequence[int], index: int) -> Ket:
    """Computational basis vector with the given flat (mixed-radix) index."""
    dims = tuple(int(d) for d in factor_dims)
    total = math.prod(dims)
    if not 0 <= index < total:
        raise IndexError(f"basis index {index} outside [0, {total})")
    amps = np.zeros(total, dtype=complex)
    amps[index] = 1.0
    return Ket(amps, dims, normalized=True)


def plus_state(n: int) -> Ket:
    """|+>^n, the uniform superposition over all n-bit strings."""
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    return Ket(amps, (2,) * n, normalized=True)


def tensor(factors: Sequence[Ket] | Sequence[Operator]) -> Ket | Operator:
    """Kronecker product of kets (or of operators), leftmost factor first."""
    if not factors:
        raise ValueError("tensor of an empty sequence is undefined")
    if isinstance(factors[0], Ket):
        if not all(isinstance(f, Ket) for f in factors):
            raise ValueError("cannot mix kets and operators in one tensor product")
        amps = factors[0].amps
        dims: tuple[int, ...] = factors[0].factor_dims
        for f in factors[1:]:
            amps = np.kron(amps, f.amps)
            dims = dims + f.factor_dims
        return Ket(amps, dims, normalized=all(f.normalized for f in factors))
    if not all(isinstance(f, Operator) for f in factors):
        raise ValueError("cannot mix kets and operators in one tensor product")
    m = factors[0].entries
    for f in factors[1:]:
        m = np.kron(m, f.entries)
    return Operator(
        m,
        unitary=all(f.unitary for f in factors),
        projector=all(f.projector for f in factors),
    )


def inner(a: Ket, b: Ket) -> complex:
    """Hermitian inner product <a|b> (conjugate-linear in the first slot)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} != {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: Ket, b: Ket) -> float:
    """|<a|b>|^2; meaningful when both states are normalized."""
    return abs(inner(a, b)) ** 2


def apply(op: Operator, k: Ket) -> Ket:
    if op.dim != k.dim:
        raise ValueError(f"dimension mismatch {op.dim} != {k.dim}")
    return Ket(op.entries @ k.amps, k.factor_dims, normalized=k.normalized and op.unitary)


def canonical_phase(k: Ket, tol: float = 1e-12) -> Ket:
    """Rotate the global phase so the first amplitude above ``tol`` is real positive."""
    mags = np.abs(k.amps)
    nz = np.flatnonzero(mags > tol)
    if nz.size == 0:
        raise ValueError("cannot fix the phase of a (numerically) zero vector")
    lead = k.amps[nz[0]]
    return Ket(k.amps * (lead.conjugate() / abs(lead)), k.factor_dims, normalized=k.normalized)


def index_to_digits(index: int, factor_dims: Sequence[int]) -> tuple[int, ...]:
    """Mixed-radix digits of a flat basis index, most significant first."""
    dims = tuple(int(d) for d in factor_dims)
    total = math.prod(dims)
    if not 0 <= index < total:
        raise IndexError(f"basis index {index} outside [0, {total})")
    digits = []
    rem = index
    for d in reversed(dims):
        digits.append(rem % d)
        rem //= d
    return tuple(reversed(digits))


def digits_to_index(digits: Sequence[int], factor_dims: Sequence[int]) -> int:
    dims = tuple(int(d) for d in factor_dims)
    if len(digits) != len(dims):
        raise ValueError(f"{len(digits)} digits for {len(dims)} factors")
    index = 0
    for g, d in zip(digits, dims):
        if not 0 <= g < d:
            raise IndexError(f"digit {g} outside [0, {d})")
        index = index * d + g
    return index


def hamming_weights(n: int) -> np.ndarray:
    """Vector of bit counts for all integers in [0, 2^n)."""
    if n < 0:
        raise ValueError(f"qubit count must be nonnegative, got {n}")
    x = np.arange(1 << n, dtype=np.uint64)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + (
        (x >> np.uint64(2)) & np.uint64(0x3333333333333333)
    )
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    x = x + (x >> np.uint64(8))
    x = x + (x >> np.uint64(16))
    x = x + (x >> np.uint64(32))
    return (x & np.uint64(0x7F)).astype(np.int64)
