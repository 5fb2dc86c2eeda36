"""Python interface to the qcredit C++ core."""

import json

from . import _qcredit
from ._qcredit import (
    ContractError,
    DegenerateDataError,
    Error,
    IndexError,
    ParseError,
    SizeError,
    UnsupportedGeneratorError,
    auc,
    bce_loss,
    entropy,
    finite_difference_gradient,
    generate_dataset,
    information_gain,
    ks_statistic,
    qnn_forward,
    stratified_partitions,
)

__all__ = [
    "ContractError",
    "DegenerateDataError",
    "Error",
    "IndexError",
    "ParseError",
    "SizeError",
    "UnsupportedGeneratorError",
    "auc",
    "bce_loss",
    "build_ansatz",
    "cross_validate",
    "entropy",
    "evaluate",
    "expectation",
    "finite_difference_gradient",
    "generate_dataset",
    "information_gain",
    "ks_statistic",
    "parameter_shift_gradient",
    "qnn_forward",
    "run_circuit",
    "stratified_partitions",
]


def _circuit_text(circuit):
    return circuit if isinstance(circuit, str) else json.dumps(circuit)


def build_ansatz(variant="simulation", num_qubits=3, angle_scale=None):
    """Circuit document (dict) for the named ansatz variant."""
    args = {} if angle_scale is None else {"angle_scale": angle_scale}
    return json.loads(_qcredit.build_ansatz(variant, num_qubits, **args))


def run_circuit(circuit, encoding, theta):
    """Final statevector amplitudes; qubit 0 is the most significant bit."""
    return _qcredit.run_circuit(_circuit_text(circuit), list(encoding), list(theta))


def expectation(circuit, encoding, theta, qubit=0):
    return _qcredit.expectation(_circuit_text(circuit), list(encoding), list(theta), qubit)


def parameter_shift_gradient(circuit, encoding, theta, qubit=0):
    """Returns (gradient, number of circuit evaluations)."""
    return _qcredit.parameter_shift_gradient(_circuit_text(circuit), list(encoding), list(theta), qubit)


def evaluate(scores, labels, threshold=None, partition=0):
    """Metrics report dict; threshold None selects the KS-optimal cut."""
    return json.loads(_qcredit.evaluate(list(scores), list(labels), threshold, partition))


def cross_validate(csv_text, config=None, benchmarks=True):
    """Runs the partitioned experiment on CSV text and returns a dict with
    config, partitions, aggregate, traces and (optionally) benchmarks."""
    return json.loads(_qcredit.cross_validate(csv_text, json.dumps(config or {}), benchmarks))
