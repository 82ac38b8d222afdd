import os
from pathlib import Path

import pytest

hm = pytest.importorskip("hmotion")

MOTIONS = Path(os.environ.get("HMOTION_MOTIONS_DIR", Path(__file__).resolve().parents[2] / "motions"))


def load(name):
    family, points, degrees = hm.load_motion(str(MOTIONS / f"{name}.motion"))
    return family, points, degrees


def test_identity_validates():
    family, _, _ = load("identity")
    report = hm.check_motion(family, 100)
    assert report["passed"]
    assert report["basepoint_residual"] == 0.0


def test_winding_monodromy():
    family, _, _ = load("winding_w")
    words = hm.monodromy(family)
    assert [w["word"] for w in words] == ["s1 s1"]
    assert words[0]["exponent_sum"] == 2
    assert not hm.is_trivial_monodromy(family)


def test_wiggle_is_trivial():
    family, _, _ = load("wiggle")
    assert hm.is_trivial_monodromy(family)
    end = hm.lift(family, 0.1 + 0.2j)["end"]
    assert abs(end[2] - (0.5 + (0.1 + 0.2j - 0.5) / 10)) < 1e-12


def test_braid_quotient():
    twist = hm.full_twist(4)
    assert not hm.is_trivial_braid(4, twist)
    assert hm.is_trivial_mapping_class(4, twist)
    assert hm.is_trivial_braid(3, "s1 s2 s1 s2^-1 s1^-1 s2^-1")


def test_new_strand_and_induction():
    family, points, degrees = load("wiggle")
    strand = hm.solve_new_strand(family, 0.25)
    assert strand["margin"] >= 0.05
    assert strand["family"].puncture_count == family.puncture_count + 1
    extended, stages = hm.extend_inductive(family, points, degrees)
    assert len(stages) == 2
    assert all(s["forgetful_compatible"] for s in stages)


def test_errors_carry_the_cause():
    family, _, _ = load("winding_w")
    with pytest.raises(hm.HMotionError) as info:
        hm.solve_new_strand(family, 0.25)
    assert info.value.args[0] == "NontrivialMonodromy"
    with pytest.raises(hm.HMotionError) as info:
        hm.load_motion(str(MOTIONS / "malformed.motion"))
    assert info.value.args[0] == "ParseError"


def test_fixed_point():
    zeta = 0.3 - 0.1j
    result = hm.fixed_point(zeta, lambda g: [0.5 * v for v in g], [0j] * 4)
    assert all(abs(v - 2 * zeta) < 1e-10 for v in result["values"])
    assert result["unique"]


def test_continuous_motion_quality():
    family, _, _ = load("disk")
    grid = hm.continuous_motion(family, branch_count=4)
    assert grid["max_strand_error"] < 1e-6
    assert grid["min_jacobian"] > 0
    assert grid["max_beltrami"] < 1
