"""Two-round protocol, Monte Carlo sweeps and the shipped experimental fixture.

Every repetition owns a random stream derived from (master seed, shot
number, repetition index), and draws its witness round and its test round
in a fixed order. Results therefore do not depend on how repetitions are
split across worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

import numpy as np

from ._backend import kernels
from .bases import product_basis
from .channels import ChannelModel, probability_table
from .errors import ChoiGaugeError, FormatError, UnknownFixture, ZeroShots
from .tomography import ChoiMatrix, CountsTable, exact_frequencies, frequencies, min_eigenpair, reconstruct_choi
from .witness import (
    TestReport,
    Witness,
    check_alpha,
    consistency_test,
    expectation_from_choi,
    hoeffding_bound,
    shots_map,
    verdict_of,
    witness_from_vector,
)

CHUNK = 128
SWEEP_COLUMNS = ("model", "n_shots", "repetitions", "alpha", "discard_fraction", "mean_abs_t", "seed")


def repetition_rng(master_seed: int, n_shots: int, repetition: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(n_shots), int(repetition)))
    return np.random.default_rng(seq)


def draw_rounds(probs: np.ndarray, n_shots: int, master_seed: int, repetition: int):
    """Outcome-1 counts (4, 3) for the witness round and the test round."""
    rng = repetition_rng(master_seed, n_shots, repetition)
    return rng.binomial(n_shots, probs), rng.binomial(n_shots, probs)


def two_round_protocol(
    model: ChannelModel,
    n_shots: int,
    alpha: float,
    seed: int,
    repetition: int = 0,
    conjugate_b_side: bool = True,
) -> TestReport:
    """Derive a witness from one data set and test it on a fresh one.

    If the first reconstruction has no negative eigenvalue there is nothing to
    test and the report is consistent with bound 1.
    """
    alpha = check_alpha(alpha)
    if n_shots < 1:
        raise ZeroShots("n_shots must be at least 1")
    ones1, ones2 = draw_rounds(probability_table(model), n_shots, seed, repetition)
    choi = reconstruct_choi(frequencies(CountsTable.from_ones(ones1, n_shots)), conjugate_b_side)
    lam, vec = min_eigenpair(choi)
    if lam >= 0.0:
        return TestReport(0.0, 1.0, alpha, "consistent", shots_map(n_shots), 0.0, lam)
    w = witness_from_vector(vec, conjugate_b_side)
    report = consistency_test(w, CountsTable.from_ones(ones2, n_shots), alpha)
    return TestReport(**{**report.__dict__, "lambda_min": lam})


@dataclass(frozen=True)
class RepetitionBatch:
    """Per-repetition outputs of many independent two-round protocols."""

    lambda_min: np.ndarray
    expectation: np.ndarray
    range_constant: np.ndarray
    p_bound: np.ndarray

    def discards(self, alpha: float) -> np.ndarray:
        return (self.expectation < 0.0) & (self.p_bound < alpha)

    def discard_fraction(self, alpha: float) -> float:
        return float(np.mean(self.discards(alpha)))

    @property
    def mean_abs_t(self) -> float:
        return float(np.mean(np.maximum(0.0, -self.expectation)))


def worker_count(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("CHOI_GAUGE_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ChoiGaugeError(f"CHOI_GAUGE_THREADS must be a positive integer, got {env!r}") from None
        else:
            threads = min(8, os.cpu_count() or 1)
    if threads < 1:
        raise ChoiGaugeError("thread count must be positive")
    return threads


def run_repetitions(
    model: ChannelModel,
    n_shots: int,
    repetitions: int,
    master_seed: int,
    threads: Optional[int] = None,
    conjugate_b_side: bool = True,
) -> RepetitionBatch:
    if repetitions < 1:
        raise ChoiGaugeError("repetitions must be at least 1")
    if n_shots < 1:
        raise ZeroShots("n_shots must be at least 1")
    probs = probability_table(model)
    _, duals = product_basis(conjugate_b_side)

    def chunk(start: int):
        stop = min(start + CHUNK, repetitions)
        rounds = [draw_rounds(probs, n_shots, master_seed, r) for r in range(start, stop)]
        ones1 = np.array([a for a, _ in rounds], dtype=np.int64)
        ones2 = np.array([b for _, b in rounds], dtype=np.int64)
        return kernels.two_round_batch(ones1, ones2, n_shots, duals)

    starts = range(0, repetitions, CHUNK)
    workers = worker_count(threads)
    if workers == 1:
        parts = [chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, starts))
    return RepetitionBatch(*(np.concatenate([p[i] for p in parts]) for i in range(4)))


@dataclass(frozen=True)
class SweepRecord:
    model: str
    n_shots: int
    repetitions: int
    alpha: float
    discard_fraction: float
    mean_abs_t: float
    seed: int

    @property
    def discards(self) -> int:
        return int(round(self.discard_fraction * self.repetitions))


def _record(model, n_shots, repetitions, alpha, seed, batch: RepetitionBatch) -> SweepRecord:
    return SweepRecord(
        model.describe(), int(n_shots), int(repetitions), float(alpha),
        batch.discard_fraction(alpha), batch.mean_abs_t, int(seed),
    )


def sweep_shots(
    model: ChannelModel,
    shots_list: Iterable[int],
    repetitions: int,
    alpha: float,
    master_seed: int,
    threads: Optional[int] = None,
) -> list[SweepRecord]:
    alpha = check_alpha(alpha)
    return [
        _record(model, n, repetitions, alpha, master_seed, run_repetitions(model, n, repetitions, master_seed, threads))
        for n in shots_list
    ]


def sweep_detuning(
    ratios: Iterable[float],
    n_shots: int = 250,
    repetitions: int = 1000,
    alpha: float = 0.01,
    master_seed: int = 0,
    threads: Optional[int] = None,
    kind: str = "detuned",
) -> list[SweepRecord]:
    alpha = check_alpha(alpha)
    out = []
    for r in ratios:
        model = ChannelModel(kind, float(r))
        batch = run_repetitions(model, n_shots, repetitions, master_seed, threads)
        out.append(_record(model, n_shots, repetitions, alpha, master_seed, batch))
    return out


def sweep_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in records:
        w.writerow((r.model, r.n_shots, r.repetitions, repr(r.alpha), repr(r.discard_fraction), repr(r.mean_abs_t), r.seed))
    return buf.getvalue()


# ---------------------------------------------------------------- fixtures

FIXTURE_ALIASES = {"eq15": "correlated_experiment"}


@dataclass(frozen=True)
class Fixture:
    name: str
    choi: ChoiMatrix
    metadata: dict
    raw: bytes

    @property
    def n_shots(self) -> int:
        return int(self.metadata["n_shots"])


def fixture_to_json(name: str, matrix: np.ndarray, metadata: dict) -> str:
    doc = {
        "name": name,
        "dim": 2,
        "normalization": "trace-d",
        "matrix": [[[round(float(z.real), 12), round(float(z.imag), 12)] for z in row] for row in matrix],
        "metadata": metadata,
    }
    return json.dumps(doc, indent=2) + "\n"


def fixture_names() -> list[str]:
    files = resources.files("choi_gauge") / "data"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> Fixture:
    key = FIXTURE_ALIASES.get(name, name)
    path = resources.files("choi_gauge") / "data" / f"{key}.json"
    if not re.fullmatch(r"[A-Za-z0-9_]+", key) or not path.is_file():
        raise UnknownFixture(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    raw = path.read_bytes()
    doc = json.loads(raw)
    m = np.array([[complex(re_, im) for re_, im in row] for row in doc["matrix"]])
    fx = Fixture(doc["name"], ChoiMatrix(m), doc["metadata"], raw)
    if fixture_to_json(fx.name, m, fx.metadata).encode() != raw:
        raise FormatError(f"fixture {key} is not in canonical form")
    return fx


def parse_witness_source(source) -> ChannelModel:
    """Map a witness-source label to the theoretical model it names.

    Accepted: ``theoretical_correlation`` (or ``correlation``) and
    ``theoretical_detuned(R)`` (or ``detuned:R``).
    """
    if isinstance(source, ChannelModel):
        return source
    s = str(source).strip()
    if s in ("theoretical_correlation", "correlation", "correlated"):
        return ChannelModel("correlated_env")
    m = re.fullmatch(r"(?:theoretical_)?detuned(?:\(([^)]+)\)|:(.+))", s)
    if m:
        try:
            return ChannelModel("detuned", float(m.group(1) or m.group(2)))
        except ValueError:
            pass
    raise ChoiGaugeError(f"unknown witness source {source!r}")


def theoretical_witness(model: ChannelModel, conjugate_b_side: bool = True) -> Witness:
    """Witness from the minimal eigenvector of the model's exact reconstruction."""
    _, vec = min_eigenpair(reconstruct_choi(exact_frequencies(model), conjugate_b_side))
    return witness_from_vector(vec, conjugate_b_side)


def analyze_fixture(fx: Fixture, witness_source="theoretical_correlation", alpha: float = 0.01) -> TestReport:
    """Test a reconstructed Choi matrix against a theoretical witness.

    The expectation is Tr[Z rho], which equals the frequency expectation for
    any linear-inversion estimate, and the bound uses the fixture's shot count.
    """
    alpha = check_alpha(alpha)
    w = theoretical_witness(parse_witness_source(witness_source))
    e = expectation_from_choi(w, fx.choi)
    p = hoeffding_bound(max(0.0, -e), fx.n_shots, w)
    lam, _ = min_eigenpair(fx.choi)
    return TestReport(e, p, alpha, verdict_of(e, p, alpha), shots_map(fx.n_shots), w.range_constant, lam)
