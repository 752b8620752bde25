"""Process models producing exact outcome probabilities.

Four kinds of process are modelled:

``ideal_rx``
    conjugation by exp(i pi sx / 4) with perfect preparations and projectors.
``detuned``
    the same nominal process, but every RF pulse (preparation, the evolution
    pulse itself and the measurement basis change) is detuned.
``correlated_env``
    an environment qubit prepared in the same state as the system, joint
    evolution exp(i pi/4 sz sz) exp(i pi/4 sx (x) 1), environment traced out.
``pulse_sequence``
    the two-ion pulse sequence with universally robust dynamical decoupling,
    all single-qubit pulses detuned.

Readout confusion and stray-light shifts act on the bright (outcome 1)
probability after the Born rule, readout first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .bases import CANONICAL, SETTINGS, canonical_label, label, meas_operator, prep_state
from .errors import BadPulseCount, BadState, ChoiGaugeError
from .linalg import partial_trace

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

KINDS = ("ideal_rx", "detuned", "correlated_env", "pulse_sequence")

# step-0 pulses (area, phase) producing each canonical preparation from |0>
PREP_PULSES = {"z0": None, "z1": (np.pi, 0.0), "x1": (np.pi / 2, np.pi / 2), "y1": (np.pi / 2, 0.0)}
# basis-change pulses before the z readout
MEAS_PULSES = {"z": None, "x": (np.pi / 2, np.pi / 2), "y": (np.pi / 2, 0.0)}
# universally robust decoupling phases within one ten-pulse block
DD_PHASES = tuple(p * np.pi / 5 for p in (0, 4, 2, 4, 0, 0, 4, 2, 4, 0))


@dataclass(frozen=True)
class ReadoutError:
    eps_bright: float
    eps_dark: float

    def __post_init__(self):
        for name in ("eps_bright", "eps_dark"):
            v = getattr(self, name)
            if not (0.0 <= v < 0.5):
                raise ChoiGaugeError(f"{name} must lie in [0, 0.5), got {v}")


@dataclass(frozen=True)
class StrayLight:
    transfer: float
    mean_bright_population: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.transfer < 1.0):
            raise ChoiGaugeError(f"transfer must lie in [0, 1), got {self.transfer}")
        if not (0.0 <= self.mean_bright_population <= 1.0):
            raise ChoiGaugeError("mean_bright_population must lie in [0, 1]")


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    detuning_ratio: float = 0.0
    readout: Optional[ReadoutError] = None
    stray: Optional[StrayLight] = None
    n_pulses: int = 100
    # environment preparation for pulse_sequence; None copies the system's
    env_prep: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ChoiGaugeError(f"unknown model kind {self.kind!r}")
        if not np.isfinite(self.detuning_ratio):
            raise ChoiGaugeError("detuning_ratio must be finite")
        if self.kind in ("ideal_rx", "correlated_env") and self.detuning_ratio != 0.0:
            raise ChoiGaugeError(f"{self.kind} takes no detuning; use 'detuned' or 'pulse_sequence'")
        if self.kind == "pulse_sequence":
            _check_pulses(self.n_pulses)
            if self.env_prep is not None:
                canonical_label(self.env_prep)

    @property
    def linear(self) -> bool:
        return self.kind in ("ideal_rx", "detuned") or (
            self.kind == "pulse_sequence" and self.env_prep is not None
        )

    def describe(self) -> str:
        if self.kind == "ideal_rx":
            s = "ideal"
        elif self.kind == "detuned":
            s = f"detuned({self.detuning_ratio:g})"
        elif self.kind == "correlated_env":
            s = "correlated"
        else:
            env = "same" if self.env_prep is None else self.env_prep
            s = f"pulse({self.detuning_ratio:g};n={self.n_pulses};env={env})"
        if self.readout is not None:
            s += f"+readout({self.readout.eps_bright:g};{self.readout.eps_dark:g})"
        if self.stray is not None:
            s += f"+stray({self.stray.transfer:g};{self.stray.mean_bright_population:g})"
        return s


def _check_pulses(n_pulses):
    if not isinstance(n_pulses, (int, np.integer)) or n_pulses <= 0 or n_pulses % 10:
        raise BadPulseCount(f"n_pulses must be a positive multiple of 10, got {n_pulses!r}")


def _check_state(rho) -> np.ndarray:
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise BadState(f"expected a 2x2 density matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > 1e-10 or abs(np.trace(m) - 1) > 1e-10:
        raise BadState("state must be Hermitian with unit trace")
    return m


EVOLUTION = 0.5 * np.sqrt(2) * (I2 + 1j * SX)  # exp(i pi sx / 4)


def ideal_apply(rho) -> np.ndarray:
    m = _check_state(rho)
    return EVOLUTION @ m @ EVOLUTION.conj().T


def detuned_axis_angle(theta: float, phase: float, ratio: float) -> tuple[float, np.ndarray]:
    """Effective rotation angle and (right-handed) rotation axis of a detuned pulse.

    The angle grows to theta * sqrt(1 + ratio^2) and the axis tilts toward
    +z with z-component ratio / sqrt(1 + ratio^2).
    """
    s = np.sqrt(1.0 + ratio * ratio)
    axis = np.array([-np.cos(phase), np.sin(phase), ratio]) / s
    return theta * s, axis


def detuned_rotation(theta: float, phase: float, ratio: float) -> np.ndarray:
    """Pulse R(theta, phase) = exp[i theta/2 (sx cos phase - sy sin phase)] under detuning."""
    angle, axis = detuned_axis_angle(theta, phase, ratio)
    gen = axis[0] * SX + axis[1] * SY + axis[2] * SZ
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * gen


def prepared_state(prep, ratio: float) -> np.ndarray:
    """State left by the step-0 pulse for ``prep`` starting from |0>."""
    lab = str(canonical_label(prep))
    ket = np.array([1, 0], dtype=complex)
    pulse = PREP_PULSES[lab]
    if pulse is not None:
        ket = detuned_rotation(pulse[0], pulse[1], ratio) @ ket
    return np.outer(ket, ket.conj())


def bright_projector(setting: str, ratio: float) -> np.ndarray:
    """Projector whose Born probability is the outcome-1 frequency of ``setting``.

    For x and y this is the state the (detuned) basis-change pulse maps onto
    the readout reference, i.e. the state that pulse would prepare.
    """
    if setting not in SETTINGS:
        raise ChoiGaugeError(f"unknown setting {setting!r}")
    if setting == "z":
        return meas_operator("z1")
    theta, phase = MEAS_PULSES[setting]
    ket = detuned_rotation(theta, phase, ratio) @ np.array([1, 0], dtype=complex)
    return np.outer(ket, ket.conj())


_ZZ_DIAG = np.array([1.0, -1.0, -1.0, 1.0])
_JOINT = np.diag(np.exp(1j * np.pi / 4 * _ZZ_DIAG)) @ np.kron(EVOLUTION, I2)


def correlated_env_apply(prep) -> np.ndarray:
    """Output state when the environment starts as a copy of the system."""
    rho = prep_state(prep)
    joint = _JOINT @ np.kron(rho, rho) @ _JOINT.conj().T
    return partial_trace(joint, "B")


def _coupling(fraction: float) -> np.ndarray:
    # exp(i t J/2 sz sz) with J * tau = pi/2; fraction = t / tau
    return np.diag(np.exp(1j * (np.pi / 4) * fraction * _ZZ_DIAG))


@lru_cache(maxsize=64)
def _dd_block(ratio: float, n_pulses: int) -> np.ndarray:
    block = _coupling(1 / (2 * n_pulses))
    for i, phase in enumerate(DD_PHASES):
        r = detuned_rotation(np.pi, phase, ratio)
        block = np.kron(r, r) @ block
        block = _coupling(1 / n_pulses if i < 9 else 1 / (2 * n_pulses)) @ block
    return block


def pulse_sequence_apply(prep_system, prep_env, ratio: float, n_pulses: int = 100) -> np.ndarray:
    """Reduced system state after the full decoupled two-ion sequence.

    Both ions are prepared by (detuned) step-0 pulses, the system receives a
    pi/2 pulse, and n_pulses/10 decoupling blocks interleave ideal
    sz (x) sz coupling segments totalling exp(i pi/4 sz sz).
    """
    _check_pulses(n_pulses)
    joint = np.kron(prepared_state(prep_system, ratio), prepared_state(prep_env, ratio))
    seq = np.linalg.matrix_power(_dd_block(float(ratio), int(n_pulses)), n_pulses // 10)
    seq = seq @ np.kron(detuned_rotation(np.pi / 2, 0.0, ratio), I2)
    joint = seq @ joint @ seq.conj().T
    return partial_trace(joint, "B")


def choi_of_linear_channel(apply: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """(1 (x) E)|Phi+><Phi+| with unnormalized |Phi+> = sum_j |jj>, input factor first."""
    out = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[a, b] = 1.0
            out += np.kron(unit, np.asarray(apply(unit), dtype=complex))
    return out


def output_state(model: ChannelModel, prep) -> np.ndarray:
    lab = str(canonical_label(prep))
    if model.kind == "ideal_rx":
        return ideal_apply(prep_state(lab))
    if model.kind == "correlated_env":
        return correlated_env_apply(lab)
    r = model.detuning_ratio
    if model.kind == "detuned":
        u = detuned_rotation(np.pi / 2, 0.0, r)
        return u @ prepared_state(lab, r) @ u.conj().T
    env = lab if model.env_prep is None else model.env_prep
    return pulse_sequence_apply(lab, env, r, model.n_pulses)


def readout_adjust(p_bright: float, e: ReadoutError) -> float:
    return p_bright * (1.0 - e.eps_bright) + (1.0 - p_bright) * e.eps_dark


def stray_adjust(p_bright: float, s: StrayLight) -> float:
    return min(1.0, p_bright + s.transfer * s.mean_bright_population)


def outcome_probabilities(model: ChannelModel, prep, setting: str) -> tuple[float, float]:
    if setting not in SETTINGS:
        raise ChoiGaugeError(f"unknown setting {setting!r}")
    rho = output_state(model, prep)
    ratio = model.detuning_ratio if model.kind in ("detuned", "pulse_sequence") else 0.0
    p1 = float(np.real(np.trace(bright_projector(setting, ratio) @ rho)))
    p1 = min(1.0, max(0.0, p1))
    if model.readout is not None:
        p1 = readout_adjust(p1, model.readout)
    if model.stray is not None:
        p1 = stray_adjust(p1, model.stray)
    p1 = min(1.0, max(0.0, p1))
    return 1.0 - p1, p1


@lru_cache(maxsize=256)
def probability_table(model: ChannelModel) -> np.ndarray:
    """Outcome-1 probabilities, shape (4 preparations, 3 settings x/y/z)."""
    table = np.array([[outcome_probabilities(model, k, s)[1] for s in SETTINGS] for k in CANONICAL])
    table.setflags(write=False)
    return table


def meas_label(setting: str, outcome: int):
    return label((setting, outcome))
