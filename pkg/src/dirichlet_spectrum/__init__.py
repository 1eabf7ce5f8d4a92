"""Exact construction of best-approximation sequences with prescribed Dirichlet value.

The plane case with the Euclidean norm: vectors theta in R^2 whose
normalized cylinder volumes q_nu R_nu^2 stay in a chosen window, built
step by step in rational arithmetic and checked against a brute-force
best-approximation oracle.
"""
from .construction import (
    ConstructionState,
    SeedingError,
    StepRecord,
    WindowExhausted,
    construct,
    inductive_step,
    seed_construction,
    theta_enclosure,
)
from .exact import RationalInterval, cmp_sqrt, interval_arith, sqrt_enclosure
from .lattice import (
    BestApproximation,
    Cylinder,
    Frame,
    IntVec3,
    RatVec2,
    ThetaEnclosure,
    best_approx_oracle,
    build_frame,
    cylinder_contains,
    enumerate_cylinder_points,
    is_unimodular,
    natural_coords,
)
from .schedule import ParameterSchedule, StepParams, make_schedule
from .verify import ConditionReport, verify_conditions, verify_history

__version__ = "0.1.0"

__all__ = [
    "BestApproximation", "ConditionReport", "ConstructionState", "Cylinder", "Frame",
    "IntVec3", "ParameterSchedule", "RatVec2", "RationalInterval", "SeedingError",
    "StepParams", "StepRecord", "ThetaEnclosure", "WindowExhausted", "best_approx_oracle",
    "build_frame", "cmp_sqrt", "construct", "cylinder_contains", "enumerate_cylinder_points",
    "inductive_step", "interval_arith", "is_unimodular", "make_schedule", "natural_coords",
    "seed_construction", "sqrt_enclosure", "theta_enclosure", "verify_conditions",
    "verify_history",
]
