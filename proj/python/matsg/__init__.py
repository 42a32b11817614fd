"""Matrix semigroups: construction, verification and structure recovery."""

import json

from . import _core
from ._core import (
    DomainError,
    Error,
    ParseError,
    PreconditionError,
    eigenclusters,
    equivalent,
    is_linear,
    jc_multiplicative,
    jc_multiplicative_exact,
    mat_exp,
    operator_norm,
    pi_sequence,
    rotation,
    unipotent_log,
)

__all__ = [
    "DomainError", "Error", "ParseError", "PreconditionError",
    "classify", "eigenclusters", "equivalent", "generate", "is_linear",
    "jc_multiplicative", "jc_multiplicative_exact", "kernel", "markov_check",
    "mat_exp", "operator_norm", "pi_sequence", "rotation", "unipotent_log", "verify",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def generate(seed, mode="real"):
    """Random model and its samples as a sample-set document (dict)."""
    return json.loads(_core.generate(seed, mode))


def verify(samples, tol=1e-9):
    return json.loads(_core.verify(_text(samples), tol))


def classify(samples, bound, tol_verify=1e-9, tol_recover=1e-8):
    return json.loads(_core.classify(_text(samples), bound, tol_verify, tol_recover))


def markov_check(kernel, triples, tol=1e-9):
    return json.loads(_core.markov_check(_text(kernel), [tuple(t) for t in triples], tol))


def kernel(spec, s, t):
    return _core.kernel(_text(spec), s, t)
