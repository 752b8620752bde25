"""Preparation states, measurement projectors and their dual operators.

The qubit operator basis is the four projectors |0><0|, |1><1|, |+><+| and
|i><i|. Each is named by a measurement setting and an outcome, so the same
label addresses a preparation, a projector and a row of a frequency table.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import NotCanonicalLabel, SingularGram

SETTINGS = ("x", "y", "z")
PREPS = ("z0", "z1", "x1", "y1")
CANONICAL = PREPS

_S2 = 1 / np.sqrt(2)
KET = {
    ("z", 0): np.array([1, 0], dtype=complex),
    ("z", 1): np.array([0, 1], dtype=complex),
    ("x", 1): np.array([_S2, _S2], dtype=complex),
    ("x", 0): np.array([_S2, -_S2], dtype=complex),
    ("y", 1): np.array([_S2, 1j * _S2], dtype=complex),
    ("y", 0): np.array([_S2, -1j * _S2], dtype=complex),
}


class BasisLabel(NamedTuple):
    setting: str
    outcome: int

    def __str__(self) -> str:
        return f"{self.setting}{self.outcome}"

    @property
    def canonical(self) -> bool:
        return str(self) in CANONICAL


def label(value) -> BasisLabel:
    """Coerce ``"x1"``, ``("x", 1)`` or a BasisLabel into a BasisLabel."""
    if isinstance(value, BasisLabel):
        return value
    if isinstance(value, str) and len(value) == 2:
        setting, outcome = value[0], value[1]
    elif isinstance(value, tuple) and len(value) == 2:
        setting, outcome = value
    else:
        raise NotCanonicalLabel(f"cannot interpret {value!r} as a basis label")
    try:
        outcome = int(outcome)
    except (TypeError, ValueError):
        raise NotCanonicalLabel(f"bad outcome in label {value!r}") from None
    if setting not in SETTINGS or outcome not in (0, 1):
        raise NotCanonicalLabel(f"unknown basis label {value!r}")
    return BasisLabel(setting, outcome)


def canonical_label(value) -> BasisLabel:
    lab = label(value)
    if not lab.canonical:
        raise NotCanonicalLabel(f"{lab} is a measurement outcome but not a basis element")
    return lab


def meas_operator(value) -> np.ndarray:
    lab = label(value)
    k = KET[tuple(lab)]
    return np.outer(k, k.conj())


def prep_state(value, conjugate_b_side: bool = False) -> np.ndarray:
    """Density matrix of a canonical preparation.

    With ``conjugate_b_side`` the entrywise conjugate is returned; only the
    y element changes (|i><i| becomes |-i><-i|).
    """
    lab = canonical_label(value)
    rho = meas_operator(lab)
    return rho.conj() if conjugate_b_side else rho


_DUALS = {
    "z0": 0.5 * np.array([[2, -1 + 1j], [-1 - 1j, 0]], dtype=complex),
    "z1": 0.5 * np.array([[0, -1 + 1j], [-1 - 1j, 2]], dtype=complex),
    "x1": np.array([[0, 1], [1, 0]], dtype=complex),
    "y1": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def qubit_dual(value) -> np.ndarray:
    """Hard-coded dual of a canonical projector: Tr[D_a M_b] = delta_ab."""
    lab = canonical_label(value)
    return _DUALS[str(lab)].copy()


def dual_from_gram(ops: Sequence, max_condition: float = 1e10) -> list[np.ndarray]:
    """Dual frame of an operator basis via the inverse Gram matrix.

    With G_ab = Tr[M_a^dagger M_b], the duals D_a = sum_c (G^-1)_ac M_c^dagger
    satisfy Tr[D_a M_b] = delta_ab.
    """
    mats = [np.asarray(m, dtype=complex) for m in ops]
    d = mats[0].shape[0]
    if len(mats) != d * d:
        raise SingularGram(f"need {d * d} operators for dimension {d}, got {len(mats)}")
    flat = np.array([m.reshape(-1) for m in mats])
    gram = flat.conj() @ flat.T
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularGram(f"Gram matrix condition number {cond:.3g} exceeds {max_condition:.0e}")
    ginv = np.linalg.inv(gram)
    return [sum(ginv[a, c] * mats[c].conj().T for c in range(len(mats))) for a in range(len(mats))]


class OperatorBasis(NamedTuple):
    elements: dict
    duals: dict


def qubit_basis() -> OperatorBasis:
    return OperatorBasis(
        elements={k: meas_operator(k) for k in CANONICAL},
        duals={k: qubit_dual(k) for k in CANONICAL},
    )


def product_basis(conjugate_b_side: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Prep-side (x) output-side operator products and their duals.

    Both arrays have shape (16, 4, 4) and are indexed ``4 * prep + output``
    over the canonical labels. The preparation factor comes first.
    """
    ops = np.empty((16, 4, 4), dtype=complex)
    duals = np.empty((16, 4, 4), dtype=complex)
    for k, pk in enumerate(CANONICAL):
        mk = prep_state(pk, conjugate_b_side)
        dk = qubit_dual(pk)
        if conjugate_b_side:
            dk = dk.conj()
        for j, oj in enumerate(CANONICAL):
            ops[4 * k + j] = np.kron(mk, meas_operator(oj))
            duals[4 * k + j] = np.kron(dk, qubit_dual(oj))
    return ops, duals
