"""Holomorphic motions of finite sets: monodromy, lifts and extensions."""

from ._core import (
    HMotionError,
    MotionFamily,
    Tolerances,
    check_motion,
    continuous_motion,
    extend_inductive,
    fixed_point,
    full_twist,
    is_trivial_braid,
    is_trivial_mapping_class,
    is_trivial_monodromy,
    lift,
    lift_loop,
    load_motion,
    monodromy,
    parse_motion,
    solve_new_strand,
)

__all__ = [
    "HMotionError",
    "MotionFamily",
    "Tolerances",
    "check_motion",
    "continuous_motion",
    "extend_inductive",
    "fixed_point",
    "full_twist",
    "is_trivial_braid",
    "is_trivial_mapping_class",
    "is_trivial_monodromy",
    "lift",
    "lift_loop",
    "load_motion",
    "monodromy",
    "parse_motion",
    "solve_new_strand",
]
