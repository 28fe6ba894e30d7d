"""Simulation of an n-qubit register coupled once per qubit to one qudit.

Two equivalent couplings are provided.  The phase coupling applies
|0><0| x I + |1><1| x Z_d between each qubit and the ancilla; preparing the
ancilla in the Fourier vector |u_0> and measuring it in the Fourier basis
heralds the total excitation number mod d.  The shift coupling is the
Hadamard conjugate (|+><+| x I + |-><-| x X_d) with a computational-basis
ancilla; it heralds the Hadamard-basis excitation number instead.

The same physics is exposed twice on purpose: ``run_module`` simulates the
couplings sequentially on a statevector, while ``build_projectors`` /
``outcome_distribution`` work through the parity projectors
P_i = d^(-1) sum_k w^(-ik) A^k with A the product of single-qubit phase
marks.  The two routes must agree and are cross-checked in the test suite.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import states
from .linalg import (
    Ket,
    Operator,
    basis_ket,
    fourier_ket,
    hadamard,
    hamming_weights,
    omega,
    pauli_x,
    pauli_z,
    tensor,
)

DEFAULT_STATEVECTOR_MAX_QUBITS = 20
DEFAULT_PROJECTOR_MAX_QUBITS = 14
MAX_QUBITS_ENV = "QPARITY_MAX_QUBITS"
ZERO_PROBABILITY_ATOL = 1e-12
_ORBIT_BASIS_ATOL = 1e-8


class ResourceLimitError(RuntimeError):
    """Requested register size exceeds the configured simulation envelope."""


def statevector_qubit_limit() -> int:
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return DEFAULT_STATEVECTOR_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_QUBITS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{MAX_QUBITS_ENV} must be positive, got {value}")
    return value


def projector_qubit_limit() -> int:
    # Explicit 2^n x 2^n matrices are far heavier than statevectors, so the
    # envelope for them never rises above the built-in cap.
    return min(statevector_qubit_limit(), DEFAULT_PROJECTOR_MAX_QUBITS)


class CouplingKind(Enum):
    PHASE = "phase"
    SHIFT = "shift"


class MeasurementBasis(Enum):
    FOURIER = "fourier"
    COMPUTATIONAL = "computational"


_DEFAULT_BASIS = {
    CouplingKind.PHASE: MeasurementBasis.FOURIER,
    CouplingKind.SHIFT: MeasurementBasis.COMPUTATIONAL,
}


def default_ancilla(d: int, coupling: CouplingKind) -> Ket:
    """Ancilla preparation that makes the module herald parity exactly."""
    if coupling is CouplingKind.PHASE:
        return fourier_ket(d, 0)
    return basis_ket((d,), 0)


@dataclass(frozen=True)
class ModuleConfig:
    """One parity-module run: register size, ancilla dimension, coupling.

    ``ancilla_prep`` defaults to the canonical preparation for the coupling;
    any other normalized d-level state may be supplied as long as its orbit
    under the coupling operator (Z_d or X_d) is orthonormal, in which case
    the measurement is taken in that orbit basis and outcome m heralds
    parity m directly.
    """

    n: int
    d: int
    coupling: CouplingKind = CouplingKind.PHASE
    ancilla_prep: Ket | None = None
    measurement_basis: MeasurementBasis | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got {self.n}")
        if self.d < 2:
            raise ValueError(f"a d=1 ancilla carries no parity information (got d={self.d})")
        if not isinstance(self.coupling, CouplingKind):
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.measurement_basis is None:
            object.__setattr__(self, "measurement_basis", _DEFAULT_BASIS[self.coupling])
        elif self.measurement_basis is not _DEFAULT_BASIS[self.coupling]:
            raise ValueError(
                f"{self.coupling.value} coupling heralds in the "
                f"{_DEFAULT_BASIS[self.coupling].value} basis, not "
                f"{self.measurement_basis.value}"
            )
        if self.ancilla_prep is not None:
            if self.ancilla_prep.dim != self.d:
                raise ValueError(
                    f"ancilla preparation has dimension {self.ancilla_prep.dim}, expected {self.d}"
                )
            if abs(self.ancilla_prep.norm() - 1.0) > 1e-10:
                raise ValueError("ancilla preparation must be normalized")


@dataclass(frozen=True)
class OutcomeRecord:
    """One heralded measurement branch."""

    outcome_label: int
    parity: int
    probability: float
    probability_exact: Fraction | None
    post_state: Ket | None
    classification: states.ClassificationResult | None
    zero_probability: bool


@dataclass(frozen=True)
class ProjectorSet:
    """The d parity projectors for a given coupling, plus their ranks."""

    n: int
    d: int
    coupling: CouplingKind
    projectors: tuple[Operator, ...]
    dims: tuple[int, ...]


def projector_dim(i: int, n: int, d: int) -> int:
    """Rank of the parity-i projector: sum of C(n, j) over j == i (mod d)."""
    if n < 1 or d < 2:
        raise ValueError(f"invalid register/ancilla sizes n={n}, d={d}")
    if not 0 <= i < d:
        raise IndexError(f"parity {i} outside [0, {d})")
    return sum(math.comb(n, j) for j in range(i, n + 1, d))


def _kron_power(m: np.ndarray, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        out = np.kron(out, m)
    return out


def build_projectors(n: int, d: int, coupling: CouplingKind = CouplingKind.PHASE) -> ProjectorSet:
    """Construct P_i = d^(-1) sum_k w^(-ik) A^k as explicit matrices.

    For the phase coupling A is diagonal with entry w^(weight of x); for the
    shift coupling every single-qubit mark is conjugated by a Hadamard.
    """
    if n < 1 or d < 2:
        raise ValueError(f"invalid register/ancilla sizes n={n}, d={d}")
    cap = projector_qubit_limit()
    if n > cap:
        raise ResourceLimitError(f"explicit projectors limited to {cap} qubits, requested {n}")
    om = omega(d)
    projectors = []
    if coupling is CouplingKind.PHASE:
        wts = hamming_weights(n)
        for i in range(d):
            diag = np.zeros(1 << n, dtype=complex)
            for k in range(d):
                diag += om ** (k * (wts - i))
            projectors.append(Operator(np.diag(diag / d), projector=True))
    elif coupling is CouplingKind.SHIFT:
        h = hadamard().entries
        powers = [_kron_power(h @ np.diag([1.0, om**k]) @ h, n) for k in range(d)]
        for i in range(d):
            total = np.zeros((1 << n, 1 << n), dtype=complex)
            for k in range(d):
                total += om ** (-i * k) * powers[k]
            projectors.append(Operator(total / d, projector=True))
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    dims = tuple(int(round(float(np.trace(p.entries).real))) for p in projectors)
    return ProjectorSet(n=n, d=d, coupling=coupling, projectors=tuple(projectors), dims=dims)


def _coupling_gate(d: int, coupling: CouplingKind) -> np.ndarray:
    """(2d) x (2d) matrix of the qubit-ancilla interaction, qubit factor first."""
    if coupling is CouplingKind.PHASE:
        ctrl0 = np.diag([1.0 + 0j, 0.0])
        ctrl1 = np.diag([0.0 + 0j, 1.0])
        mark = pauli_z(d).entries
    else:
        h = hadamard().entries
        ctrl0 = h @ np.diag([1.0 + 0j, 0.0]) @ h
        ctrl1 = h @ np.diag([0.0 + 0j, 1.0]) @ h
        mark = pauli_x(d).entries
    return np.kron(ctrl0, np.eye(d, dtype=complex)) + np.kron(ctrl1, mark)


def _apply_two_axes(joint: Ket, gate: np.ndarray, ax_a: int, ax_b: int) -> Ket:
    dims = joint.factor_dims
    t = joint.amps.reshape(dims)
    t = np.moveaxis(t, (ax_a, ax_b), (0, 1))
    lead_shape = t.shape[:2]
    rest = t.shape[2:]
    out = gate @ t.reshape(lead_shape[0] * lead_shape[1], -1)
    out = np.moveaxis(out.reshape(lead_shape + rest), (0, 1), (ax_a, ax_b))
    return Ket(out.reshape(-1), dims, normalized=joint.normalized)


def couple_once(joint: Ket, qubit: int, coupling: CouplingKind) -> Ket:
    """Apply one qubit-ancilla interaction to a joint register+ancilla state.

    The ancilla must be the last tensor factor.  Couplings to distinct
    qubits commute, so the application order never matters.
    """
    dims = joint.factor_dims
    if len(dims) < 2:
        raise ValueError("joint state must contain at least one qubit and the ancilla")
    n = len(dims) - 1
    if any(dim != 2 for dim in dims[:n]):
        raise ValueError(f"register factors must be qubits, got {dims[:n]}")
    if not 0 <= qubit < n:
        raise IndexError(f"qubit index {qubit} outside [0, {n})")
    return _apply_two_axes(joint, _coupling_gate(dims[-1], coupling), qubit, n)


def _is_uniform_plus(state: Ket) -> bool:
    target = 2.0 ** (-len(state.factor_dims) / 2)
    return bool(np.max(np.abs(state.amps - target)) <= 1e-12)


def _exact_parity_probability(n: int, d: int, coupling: CouplingKind, parity: int) -> Fraction:
    if coupling is CouplingKind.PHASE:
        return Fraction(sum(math.comb(n, j) for j in range(parity, n + 1, d)), 1 << n)
    # |+>^n is the Hadamard-basis all-zero string: parity 0 with certainty.
    return Fraction(1 if parity == 0 else 0, 1)


def _measurement_vectors(config: ModuleConfig, prep: Ket, custom: bool) -> tuple[np.ndarray, list[int]]:
    """Measurement kets (one row per outcome) and the parity each heralds."""
    d = config.d
    if not custom:
        if config.coupling is CouplingKind.PHASE:
            vecs = np.array([fourier_ket(d, m).amps for m in range(d)])
            parities = [(-m) % d for m in range(d)]
        else:
            vecs = np.eye(d, dtype=complex)
            parities = list(range(d))
        return vecs, parities
    step = pauli_z(d).entries if config.coupling is CouplingKind.PHASE else pauli_x(d).entries
    vecs = np.empty((d, d), dtype=complex)
    v = np.array(prep.amps)
    for m in range(d):
        vecs[m] = v
        v = step @ v
    gram = vecs.conj() @ vecs.T
    dev = float(np.abs(gram - np.eye(d)).max())
    if dev > _ORBIT_BASIS_ATOL:
        raise ValueError(
            f"ancilla preparation does not generate an orthonormal orbit "
            f"(Gram deviation {dev:.3e}); heralding would be ambiguous"
        )
    return vecs, list(range(d))


def run_module(state: Ket, config: ModuleConfig, *, classify_states: bool = True) -> list[OutcomeRecord]:
    """Couple every qubit to the ancilla once, measure, and report all branches.

    Returns one record per measurement outcome, zero-probability branches
    included but flagged (their post-state and classification are None).
    Probabilities additionally carry an exact rational value when the input
    is exactly |+>^n and the ancilla preparation is the default one.
    """
    if tuple(state.factor_dims) != (2,) * config.n:
        raise ValueError(
            f"input factors {state.factor_dims} do not match {config.n} qubits"
        )
    cap = statevector_qubit_limit()
    if config.n > cap:
        raise ResourceLimitError(f"statevector path limited to {cap} qubits, requested {config.n}")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError(f"input state must be normalized, norm is {state.norm():.12f}")
    custom = config.ancilla_prep is not None
    prep = config.ancilla_prep if custom else default_ancilla(config.d, config.coupling)
    joint = tensor([state, prep])
    for q in range(config.n):
        joint = couple_once(joint, q, config.coupling)
    vecs, parities = _measurement_vectors(config, prep, custom)
    mat = joint.amps.reshape(1 << config.n, config.d)
    exact_ok = (not custom) and _is_uniform_plus(state)
    records = []
    for m in range(config.d):
        branch = mat @ vecs[m].conj()
        prob = float(np.sum(np.abs(branch) ** 2))
        parity = parities[m]
        exact = (
            _exact_parity_probability(config.n, config.d, config.coupling, parity)
            if exact_ok
            else None
        )
        if prob < ZERO_PROBABILITY_ATOL:
            records.append(
                OutcomeRecord(m, parity, prob, exact, None, None, True)
            )
            continue
        post = Ket(branch / math.sqrt(prob), (2,) * config.n, normalized=True)
        cls = states.classify(post) if classify_states else None
        records.append(OutcomeRecord(m, parity, prob, exact, post, cls, False))
    total = sum(r.probability for r in records)
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"branch probabilities sum to {total}, not 1")
    return records


def outcome_distribution(state: Ket, n: int, d: int, coupling: CouplingKind = CouplingKind.PHASE) -> list[float]:
    """Heralding distribution p(j) = <state| P_j |state> via explicit projectors."""
    if tuple(state.factor_dims) != (2,) * n:
        raise ValueError(f"input factors {state.factor_dims} do not match {n} qubits")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("input state must be normalized")
    pset = build_projectors(n, d, coupling)
    probs = [float(np.real(np.vdot(state.amps, p.entries @ state.amps))) for p in pset.projectors]
    total = sum(probs)
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"projector probabilities sum to {total}, not 1")
    return probs


def photonic_module_action(state: Ket, ancilla_index: int, d: int, coupling: CouplingKind = CouplingKind.PHASE) -> Ket:
    """Joint register+ancilla state after the module, before any measurement.

    The ancilla starts in the Fourier vector |u_index> for the phase
    coupling and in the computational vector |index> for the shift
    coupling; the output is sum_i (P_i x V^i)|state>|ancilla> with V = Z_d
    or X_d respectively.
    """
    n = len(state.factor_dims)
    if any(dim != 2 for dim in state.factor_dims):
        raise ValueError(f"register factors must be qubits, got {state.factor_dims}")
    if not 0 <= ancilla_index < d:
        raise IndexError(f"ancilla index {ancilla_index} outside [0, {d})")
    pset = build_projectors(n, d, coupling)
    if coupling is CouplingKind.PHASE:
        anc = fourier_ket(d, ancilla_index).amps
        step = pauli_z(d).entries
    else:
        anc = basis_ket((d,), ancilla_index).amps
        step = pauli_x(d).entries
    total = np.zeros((1 << n) * d, dtype=complex)
    marked = np.array(anc)
    for i in range(d):
        total += np.kron(pset.projectors[i].entries @ state.amps, marked)
        marked = step @ marked
    return Ket(total, state.factor_dims + (d,), normalized=True)
