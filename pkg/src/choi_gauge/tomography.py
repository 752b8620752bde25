"""Shot sampling, frequency tables and linear-inversion reconstruction.

Counts are stored per (preparation, setting, outcome) over the four
canonical preparations z0, z1, x1, y1 and the settings x, y, z. Reconstruction
expands conditional frequencies in the dual basis without any positivity
projection, so statistical or systematic negativity survives.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .bases import CANONICAL, SETTINGS, canonical_label, label, product_basis, qubit_dual
from .channels import ChannelModel, probability_table
from .errors import FormatError, IncompleteTable, ZeroShots
from .linalg import HermitianEig, hermitian_eig, hermiticity_error, symmetrize

COUNTS_HEADER = ("prep", "basis", "outcome", "count")


@dataclass(frozen=True)
class CountsTable:
    """Outcome counts, shape (4 preps, 3 settings, 2 outcomes).

    ``present`` marks which (prep, setting) pairs were measured at all.
    """

    counts: np.ndarray
    present: np.ndarray = field(default=None)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (4, 3, 2):
            raise FormatError(f"counts must have shape (4, 3, 2), got {c.shape}")
        if np.any(c < 0):
            raise FormatError("counts must be non-negative")
        p = np.ones((4, 3), dtype=bool) if self.present is None else np.asarray(self.present, dtype=bool)
        c = c.copy()
        c.setflags(write=False)
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "present", p)

    @classmethod
    def from_ones(cls, ones, n_shots: int) -> "CountsTable":
        """Build from outcome-1 counts of shape (4, 3) at a common shot number."""
        ones = np.asarray(ones, dtype=np.int64)
        return cls(np.stack([n_shots - ones, ones], axis=-1))

    @classmethod
    def from_records(cls, records: Mapping) -> "CountsTable":
        """Build from ``{(prep, setting, outcome): count}``; missing keys stay absent."""
        counts = np.zeros((4, 3, 2), dtype=np.int64)
        seen = np.zeros((4, 3, 2), dtype=bool)
        for (prep, setting, outcome), n in records.items():
            k = CANONICAL.index(str(canonical_label(prep)))
            s = SETTINGS.index(label((setting, outcome)).setting)
            counts[k, s, int(outcome)] = int(n)
            seen[k, s, int(outcome)] = True
        return cls(counts, seen.all(axis=-1))

    @property
    def shots(self) -> np.ndarray:
        """Shots per (prep, setting), shape (4, 3)."""
        return self.counts.sum(axis=-1)

    @property
    def complete(self) -> bool:
        return bool(self.present.all())

    def records(self) -> dict:
        return {
            (p, s, o): int(self.counts[k, i, o])
            for k, p in enumerate(CANONICAL)
            for i, s in enumerate(SETTINGS)
            for o in (0, 1)
            if self.present[k, i]
        }


@dataclass(frozen=True)
class FrequencyTable:
    """Conditional outcome-1 frequencies, shape (4 preps, 3 settings)."""

    ones: np.ndarray

    def __post_init__(self):
        f = np.array(self.ones, dtype=float)
        if f.shape != (4, 3):
            raise IncompleteTable(f"frequency table must have shape (4, 3), got {f.shape}")
        if not np.all(np.isfinite(f)):
            raise IncompleteTable("frequency table contains missing entries")
        f.setflags(write=False)
        object.__setattr__(self, "ones", f)

    def outcome(self, prep, setting: str, outcome: int) -> float:
        k = CANONICAL.index(str(canonical_label(prep)))
        f1 = self.ones[k, SETTINGS.index(setting)]
        return float(f1 if outcome else 1.0 - f1)

    def vector(self) -> np.ndarray:
        """Frequencies f_{j|k} at index 4k + j over canonical labels j, k."""
        f = self.ones
        return np.stack([1.0 - f[:, 2], f[:, 2], f[:, 0], f[:, 1]], axis=1).reshape(16)


@dataclass(frozen=True)
class ChoiMatrix:
    matrix: np.ndarray
    normalization: str = "trace-d"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise FormatError(f"Choi matrix must be 4x4, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eig(self) -> HermitianEig:
        return hermitian_eig(self.matrix)


def sample_counts(model: ChannelModel, n_shots: int, seed) -> CountsTable:
    """One binomial draw per (prep, setting) from the model's exact probabilities."""
    if n_shots < 1:
        raise ZeroShots("n_shots must be at least 1")
    rng = np.random.default_rng(seed)
    return CountsTable.from_ones(rng.binomial(n_shots, probability_table(model)), n_shots)


def frequencies(c: CountsTable) -> FrequencyTable:
    if not c.complete:
        k, s = np.argwhere(~c.present)[0]
        raise IncompleteTable(f"no counts for prep {CANONICAL[k]} setting {SETTINGS[s]}")
    shots = c.shots
    if np.any(shots == 0):
        k, s = np.argwhere(shots == 0)[0]
        raise ZeroShots(f"zero shots for prep {CANONICAL[k]} setting {SETTINGS[s]}")
    return FrequencyTable(c.counts[..., 1] / shots)


def exact_frequencies(model: ChannelModel) -> FrequencyTable:
    return FrequencyTable(probability_table(model))


def reconstruct_choi(f: FrequencyTable, conjugate_b_side: bool = True) -> ChoiMatrix:
    """Linear-inversion Choi estimate sum_{k,j} f_{j|k} Dk (x) Dj, prep factor first.

    With ``conjugate_b_side`` the preparation-side duals are complex-conjugated,
    which makes the estimate equal (1 (x) E)|Phi+><Phi+| for exact data.
    """
    if not isinstance(f, FrequencyTable):
        raise IncompleteTable("expected a FrequencyTable")
    _, duals = product_basis(conjugate_b_side)
    rho = np.tensordot(f.vector(), duals, axes=1)
    return ChoiMatrix(symmetrize(rho))


def reconstruct_states(f: FrequencyTable) -> dict:
    """Output state estimate for each canonical preparation."""
    vec = f.vector().reshape(4, 4)
    duals = [qubit_dual(j) for j in CANONICAL]
    return {p: sum(vec[k, j] * duals[j] for j in range(4)) for k, p in enumerate(CANONICAL)}


def min_eigenpair(c: ChoiMatrix) -> tuple[float, np.ndarray]:
    e = c.eig()
    return float(e.eigenvalues[0]), e.vector(0).copy()


# ---------------------------------------------------------------- file formats


def counts_to_csv(c: CountsTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COUNTS_HEADER)
    for k, p in enumerate(CANONICAL):
        for i, s in enumerate(SETTINGS):
            if c.present[k, i]:
                for o in (0, 1):
                    w.writerow((p, s, o, int(c.counts[k, i, o])))
    return buf.getvalue()


def counts_from_csv(text: str) -> CountsTable:
    """Parse a counts CSV in any row order; errors name the offending row and field."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(x.strip() for x in rows[0]) != COUNTS_HEADER:
        raise FormatError(f"row 1: header must be {','.join(COUNTS_HEADER)}")
    records = {}
    for n, row in enumerate(rows[1:], start=2):
        if not row or all(not x.strip() for x in row):
            continue
        if len(row) != 4:
            raise FormatError(f"row {n}: expected 4 fields, got {len(row)}")
        prep, basis, outcome, count = (x.strip() for x in row)
        if prep not in CANONICAL:
            raise FormatError(f"row {n}: field 'prep' has unknown value {prep!r}")
        if basis not in SETTINGS:
            raise FormatError(f"row {n}: field 'basis' has unknown value {basis!r}")
        if outcome not in ("0", "1"):
            raise FormatError(f"row {n}: field 'outcome' must be 0 or 1, got {outcome!r}")
        try:
            value = int(count)
        except ValueError:
            raise FormatError(f"row {n}: field 'count' is not an integer: {count!r}") from None
        if value < 0:
            raise FormatError(f"row {n}: field 'count' is negative")
        key = (prep, basis, int(outcome))
        if key in records:
            raise FormatError(f"row {n}: duplicate entry for {prep},{basis},{outcome}")
        records[key] = value
    if len(records) != 24:
        raise IncompleteTable(f"expected 24 data rows, got {len(records)}")
    return CountsTable.from_records(records)


def choi_to_json(c: ChoiMatrix, metadata: Optional[dict] = None) -> str:
    doc = {
        "dim": 2,
        "normalization": c.normalization,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in c.matrix],
        "metadata": dict(metadata or {}),
    }
    return json.dumps(doc, indent=2) + "\n"


def choi_from_json(text: str) -> tuple[ChoiMatrix, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("Choi file must hold a JSON object")
    if doc.get("dim") != 2:
        raise FormatError("field 'dim' must be 2")
    if doc.get("normalization", "trace-d") != "trace-d":
        raise FormatError("field 'normalization' must be 'trace-d'")
    raw = doc.get("matrix")
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in raw])
    except (TypeError, ValueError):
        raise FormatError("field 'matrix' must be a 4x4 array of [re, im] pairs") from None
    if m.shape != (4, 4):
        raise FormatError(f"field 'matrix' must be 4x4, got {m.shape}")
    if hermiticity_error(m) > 1e-8:
        raise FormatError("field 'matrix' is not Hermitian within 1e-8")
    return ChoiMatrix(m), dict(doc.get("metadata") or {})
