import math

import pytest

import oscimax


def test_zero_phase_average_is_exact():
    a = oscimax.average("char:1", "zero", 3.0, 4.0)
    assert a["re"] == 0.25
    assert a["method"] == "exact_piecewise"


def test_maximal_fresnel_reference():
    # sup over r for γ = t², χ_[−1,1] at x = 3 (mpmath value)
    s = oscimax.maximal("char:1", "laurent:t^2", 3.0)
    assert abs(s["value"] - 0.08213792641121787) <= s["err"] + 1e-9
    rows = oscimax.maximal("char:1", "zero", [2.0, -7.5], workers=2)
    assert [r["x"] for r in rows] == [2.0, -7.5]
    assert rows[1]["value"] == pytest.approx(1 / 8.5, rel=1e-9)


def test_norms_of_indicator():
    n = oscimax.norms("char:1", p=2.0, l=1.0)
    assert n["l1"] == 2.0
    assert n["weighted_l1"] == pytest.approx(3.0)
    assert n["llogl"] == pytest.approx(2 * math.log(math.e + 1))


def test_weights():
    assert oscimax.weight("psi:2")["all_pass"]
    w1 = oscimax.weight("psi:1")
    assert w1["lower_pass"] and w1["doubling_pass"] and not w1["tail_pass"]


def test_decay_rows():
    summary, csv = oscimax.decay(2.0, 0.5, [10.0, 40.0])
    assert summary["pass_counts"].get("FAIL", 0) == 0
    lines = csv.splitlines()
    assert lines[0].startswith("x,x_minus_beta,")
    # bound at x = 10 is 2/((x−β)·2(x−β)) = 1/90.25
    assert float(lines[1].split(",")[4]) == pytest.approx(0.011080332409972299, rel=1e-14)


def test_errors_map_to_python():
    with pytest.raises(oscimax.ConfigError):
        oscimax.average("char:1", "wobbly:3", 0.0, 1.0)
    with pytest.raises(ValueError):
        oscimax.maximal("char:1", "zero", [1.0], config={"epsilon": 1.5})
    with pytest.raises(ArithmeticError):
        oscimax.average("char:1", "laurent:t^-1", 0.0, 1.0)
