import math

import pytest

import odeq


def test_parse_roundtrip():
    text = odeq.parse("6*q*((1+p)*r - q^2)/(1+p)^2")
    assert odeq.parse(text) == text
    with pytest.raises(ValueError):
        odeq.parse("r^2+")


def test_evaluate_and_derivatives():
    assert odeq.evaluate("r^2", 0, 0, 0, 0, 3) == 9
    assert odeq.partial("r^2", "r") == "2*r"
    assert odeq.total_derivative("u", "r^2") == "p"
    assert odeq.is_identically_zero("x*q - q*x")
    assert not odeq.is_identically_zero("x + 1")


def test_classify_worked_example():
    report = odeq.classify("((x*r + 3*q)^(4/3) - 4*r)/x")
    assert report["branch"] == "T2"
    assert report["matched"] == "r^(4/3)"
    assert report["fingerprint_constant"]


def test_classify_recovers_parameters():
    report = odeq.classify("r^2/q + 4*q*r/p - 6*q^3/p^2")
    assert report["matched"] == "K*r^2/q"
    k = report["parameters"]["K"]
    assert abs(k - 1) < 1e-6


def test_outside_scope():
    report = odeq.classify("0")
    assert report["matched"] is None
    assert report["verdict"] == "outside-scope"


def test_structure_dump_estructure():
    dump = odeq.structure("(-24*p*q*r + 18*q^3 + 4*r^2*u)/(-6*p^2 + 3*q*u)")
    assert "c8 = -3/8" in dump


def test_verify_transform():
    res = odeq.verify_transform(
        "1/x", "x + u", "6*q*((1+p)*r - q^2)/(1+p)^2", "6*q*r/p - 6*q^3/p^2"
    )
    assert res["ok"]
    bad = odeq.verify_transform("x", "u", "r^2", "exp(r)")
    assert not bad["ok"]


def test_scaling_with_parameters():
    res = odeq.verify_transform("x", "u/K^3", "r^(4/3)", "K*r^(4/3)", params={"K": 2})
    assert res["ok"]


def test_emit_pde_system():
    text = odeq.emit_pde_system("((x*r + 3*q)^(4/3) - 4*r)/x", "r^(4/3)")
    assert "D[x] phi = " in text
    assert text.count("\n") >= 17


def test_canonical_forms():
    forms = odeq.canonical_forms()
    assert len(forms) == 12
    ids = {f["id"] for f in forms}
    assert "exp(r)" in ids and "r^2" in ids


def test_determinism():
    a = odeq.classify("exp(r)")["report_structured"]
    b = odeq.classify("exp(r)")["report_structured"]
    assert a == b
