import math

import numpy as np
import pytest

import matsg


def test_mat_exp_of_rotation_generator():
    l = np.array([[0.0, 1.0], [-1.0, 0.0]])
    q = matsg.mat_exp(math.pi / 2 * l)
    assert np.allclose(q, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-14)


def test_unipotent_log_and_jc():
    assert np.allclose(matsg.unipotent_log(np.array([[1.0, 2.0], [0.0, 1.0]])), [[0.0, 2.0], [0.0, 0.0]])
    d, t = matsg.jc_multiplicative_exact([["2", "1"], ["0", "2"]])
    assert d == [["2", "0"], ["0", "2"]]
    assert t == [["1", "1/2"], ["0", "1"]]
    dr, tr = matsg.jc_multiplicative(np.array([[2.0, 1.0], [0.0, 2.0]]))
    assert np.allclose(dr @ tr, [[2.0, 1.0], [0.0, 2.0]])


def test_eigenclusters_and_norm():
    clusters = matsg.eigenclusters(np.diag([2.0, 2.0, 5.0]))
    assert sorted(c["multiplicity"] for c in clusters) == [1, 2]
    assert matsg.operator_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)


def test_cauchy_helpers():
    assert matsg.is_linear(["1", "sqrt(2)"], [1.0, math.sqrt(2.0)], 1e-12)
    assert not matsg.is_linear(["1", "sqrt(2)"], [1.0, 0.0], 1e-12)
    seq = matsg.pi_sequence(["1", "sqrt(2)"], [0.0, math.pi], [0.0, 0.0], 5)
    assert len(seq["terms"]) == 5
    for k, (value, fp, _) in enumerate(seq["terms"], start=1):
        assert abs(value) <= 1.0 / k
        assert abs(fp - math.pi) <= 1.0 / k


def test_generate_verify_classify():
    doc = matsg.generate(3)
    assert doc["schema"] == "1"
    assert matsg.verify(doc)["pass"]
    report = matsg.classify(doc, "exp(20x)")
    assert report["pass"]
    assert report["reconstruction"] <= 1e-8
    assert matsg.generate(3) == doc


def test_verify_detects_perturbation():
    doc = matsg.generate(4)
    doc["samples"]["1"]["entries"][0][0] += 1e-3
    report = matsg.verify(doc)
    assert not report["pass"]
    assert report["violations"]


def test_markov():
    assert matsg.markov_check({"kind": "min"}, [(1, 2, 3)])["pass"]
    frac = matsg.markov_check({"kind": "fractional", "H": 0.7}, [(1, 2, 3)])
    assert not frac["pass"]
    assert frac["max_residual"] > 1e-3
    assert matsg.kernel({"kind": "min"}, 1.0, 2.0)[0][0] == 1.0


def test_errors_are_typed():
    with pytest.raises(matsg.ParseError):
        matsg.verify("{not json")
    with pytest.raises(matsg.Error):
        matsg.mat_exp(np.zeros((2, 3)))
