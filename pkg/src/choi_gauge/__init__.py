"""Single-qubit process tomography with a witness-based consistency test.

Simulate tomography data under statistical and systematic errors, reconstruct
Choi matrices by linear inversion, and decide with a Hoeffding bound whether a
negative eigenvalue can be blamed on shot noise alone.
"""
from ._backend import BACKEND
from .bases import CANONICAL, SETTINGS, BasisLabel, dual_from_gram, meas_operator, prep_state, qubit_dual
from .campaign import (
    Fixture,
    SweepRecord,
    analyze_fixture,
    load_fixture,
    run_repetitions,
    sweep_detuning,
    sweep_shots,
    theoretical_witness,
    two_round_protocol,
)
from .channels import (
    ChannelModel,
    ReadoutError,
    StrayLight,
    choi_of_linear_channel,
    correlated_env_apply,
    detuned_rotation,
    ideal_apply,
    outcome_probabilities,
    pulse_sequence_apply,
)
from .errors import ChoiGaugeError
from .linalg import hermitian_eig, kron, partial_trace
from .tomography import (
    ChoiMatrix,
    CountsTable,
    FrequencyTable,
    exact_frequencies,
    frequencies,
    min_eigenpair,
    reconstruct_choi,
    reconstruct_states,
    sample_counts,
)
from .witness import TestReport, Witness, consistency_test, hoeffding_bound, witness_from_vector

__version__ = "0.1.0"
