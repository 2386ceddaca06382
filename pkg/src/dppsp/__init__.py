"""Decentralized proximal point iterations for saddle-point problems on graphs."""

from .core import AlgoConfig, RunTrace, StepSizeWarning, lemma2_cap, run, theorem1_cap
from .diagnostics import (
    BoundInputs,
    bound_inputs,
    check_mvi,
    lemma2_margin,
    rate_slope,
    reference_solution,
    stationarity_gap,
    theorem1_rhs,
    theorem2_rhs,
)
from .graph import Graph, MixingMatrix, build_er_graph, laplacian, mixing_from_laplacian, path_graph
from .operators import Ball, Box, LocalSaddle, ProductSet
from .problems import InstanceSpec, make_instance
from .resolvent import ResolventConfig, resolve

__all__ = [
    "AlgoConfig",
    "Ball",
    "BoundInputs",
    "Box",
    "Graph",
    "InstanceSpec",
    "LocalSaddle",
    "MixingMatrix",
    "ProductSet",
    "ResolventConfig",
    "RunTrace",
    "StepSizeWarning",
    "bound_inputs",
    "build_er_graph",
    "check_mvi",
    "laplacian",
    "lemma2_cap",
    "lemma2_margin",
    "make_instance",
    "mixing_from_laplacian",
    "path_graph",
    "rate_slope",
    "reference_solution",
    "resolve",
    "run",
    "stationarity_gap",
    "theorem1_cap",
    "theorem1_rhs",
    "theorem2_rhs",
]
