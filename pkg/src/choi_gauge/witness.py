"""Rank-one witnesses and the Hoeffding consistency test.

A witness Z = |v><v| is expanded in the product basis (prep op) (x) (output op)
so its expectation can be read directly off measured frequencies. Each
(preparation, setting) pair contributes a bounded per-shot value, and the
squared spans of those values give the range constant C of the Hoeffding
bound P(<Z> <= -t) <= exp(-2 t^2 N / C).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bases import CANONICAL, SETTINGS, product_basis
from .errors import ChoiGaugeError, FormatError, IncompleteTable, ZeroVector
from .tomography import ChoiMatrix, CountsTable, FrequencyTable, frequencies

NORM_TOL = 1e-8
TINY = 5e-324  # smallest positive double; the bound never reports exactly 0


@dataclass(frozen=True)
class Witness:
    """Witness |v><v| with coefficients indexed 4 * prep + output (canonical order)."""

    vector: np.ndarray
    coefficients: np.ndarray
    conjugate_b_side: bool = True
    per_setting_ranges: np.ndarray = field(init=False, repr=False)
    range_constant: float = field(init=False)

    def __post_init__(self):
        vec = np.array(self.vector, dtype=complex)
        coef = np.array(self.coefficients, dtype=float)
        vec.setflags(write=False)
        coef.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "coefficients", coef)
        values = per_shot_values(coef)
        ranges = np.stack([values.min(axis=-1), values.max(axis=-1)], axis=-1)
        ranges.setflags(write=False)
        object.__setattr__(self, "per_setting_ranges", ranges)
        object.__setattr__(self, "range_constant", float(np.sum((ranges[..., 1] - ranges[..., 0]) ** 2)))

    @property
    def operator(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def to_json(self) -> str:
        doc = {
            "vector": [[float(z.real), float(z.imag)] for z in self.vector],
            "coefficients": [float(x) for x in self.coefficients],
            "range_constant": self.range_constant,
            "conjugate_b_side": self.conjugate_b_side,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Witness":
        """Load a witness, recomputing the expansion and checking it against the file."""
        try:
            doc = json.loads(text)
            vec = np.array([complex(re, im) for re, im in doc["vector"]])
            flag = bool(doc.get("conjugate_b_side", True))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed witness file: field {exc}") from None
        w = witness_from_vector(vec, flag)
        stored = doc.get("coefficients")
        if stored is not None:
            stored = np.asarray(stored, dtype=float)
            if stored.shape != (16,) or np.max(np.abs(stored - w.coefficients)) > 1e-8:
                raise FormatError("field 'coefficients' does not match the witness vector")
        return w


def per_shot_values(coefficients) -> np.ndarray:
    """Per-shot witness value for each (prep, setting, outcome), shape (4, 3, 2).

    Outcomes x0 and y0 are not basis elements and carry value 0.
    """
    c = np.asarray(coefficients, dtype=float).reshape(4, 4)
    out = np.zeros((4, 3, 2))
    out[:, 0, 1] = c[:, 2]
    out[:, 1, 1] = c[:, 3]
    out[:, 2, 0] = c[:, 0]
    out[:, 2, 1] = c[:, 1]
    return out


def witness_from_vector(v, conjugate_b_side: bool = True) -> Witness:
    """Expand |v><v| in the 16-element product basis by a direct linear solve."""
    vec = np.asarray(v, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise ChoiGaugeError(f"witness vector must have 4 components, got {vec.size}")
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        raise ZeroVector("witness vector is zero")
    if abs(norm - 1.0) > NORM_TOL:
        vec = vec / norm
    ops, _ = product_basis(conjugate_b_side)
    design = ops.reshape(16, 16).T  # column m is the flattened basis operator m
    target = np.outer(vec, vec.conj()).reshape(16)
    coef = np.linalg.solve(design, target)
    return Witness(vec, coef.real, conjugate_b_side)


def expectation_from_frequencies(w: Witness, f: FrequencyTable) -> float:
    if not isinstance(f, FrequencyTable):
        raise IncompleteTable("expected a FrequencyTable")
    return float(np.dot(w.coefficients, f.vector()))


def expectation_from_choi(w: Witness, c: ChoiMatrix) -> float:
    """Tr[Z c], equal to the frequency expectation for a linear-inversion estimate."""
    return float(np.real(np.vdot(w.vector, c.matrix @ w.vector)))


def hoeffding_bound(t: float, shots, w: Witness) -> float:
    """One-sided Hoeffding bound on observing an expectation at or below -t.

    ``shots`` is a common shot count or a (4, 3) array per (prep, setting);
    unequal counts use the weighted form exp(-2 t^2 / sum_s range_s^2 / N_s).
    """
    if not t > 0.0:
        return 1.0
    n = np.asarray(shots, dtype=float)
    if np.any(n < 1):
        raise ChoiGaugeError("shots must be at least 1 per setting")
    if n.ndim == 0 or np.all(n == n.flat[0]):
        denom = w.range_constant / float(n.flat[0])
    else:
        spans = w.per_setting_ranges[..., 1] - w.per_setting_ranges[..., 0]
        denom = float(np.sum(spans**2 / np.broadcast_to(n, spans.shape)))
    if denom <= 0.0:
        return 1.0
    return min(1.0, max(TINY, math.exp(-2.0 * t * t / denom)))


@dataclass(frozen=True)
class TestReport:
    expectation_t: float
    p_bound: float
    alpha: float
    verdict: str
    shots_per_setting: dict
    range_constant: Optional[float] = None
    lambda_min: Optional[float] = None

    __test__ = False  # keep pytest from collecting this class

    @property
    def inconsistent(self) -> bool:
        return self.verdict == "inconsistent"

    def to_dict(self) -> dict:
        d = {
            "expectation_t": self.expectation_t,
            "p_bound": self.p_bound,
            "alpha": self.alpha,
            "verdict": self.verdict,
            "shots_per_setting": self.shots_per_setting,
        }
        if self.range_constant is not None:
            d["range_constant"] = self.range_constant
        if self.lambda_min is not None:
            d["lambda_min"] = self.lambda_min
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def verdict_of(expectation: float, p_bound: float, alpha: float) -> str:
    return "inconsistent" if expectation < 0.0 and p_bound < alpha else "consistent"


def shots_map(shots) -> dict:
    n = np.broadcast_to(np.asarray(shots, dtype=np.int64), (4, 3))
    return {f"{p},{s}": int(n[k, i]) for k, p in enumerate(CANONICAL) for i, s in enumerate(SETTINGS)}


def check_alpha(alpha: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise ChoiGaugeError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def consistency_test(w: Witness, c: CountsTable, alpha: float) -> TestReport:
    """Test counts against a witness obtained independently of them."""
    alpha = check_alpha(alpha)
    f = frequencies(c)
    e = expectation_from_frequencies(w, f)
    p = hoeffding_bound(max(0.0, -e), c.shots, w)
    return TestReport(e, p, alpha, verdict_of(e, p, alpha), shots_map(c.shots), w.range_constant)
