"""Kaluza-Klein collapse of flat SU(2)-bundles over hyperbolic surfaces, at desk scale."""

__version__ = "0.1.0"

from .ade import FiniteSubgroup, GroupSpec, build_group, close, generators, lookup
from .bounds import corollary_a, corollary_b, riemann_hurwitz, sys_upper, theorem_bound
from .collapse import (
    CollapseConfig,
    CollapseExperiment,
    build_fiber_net,
    build_graph,
    measure_distortion,
    psi,
    run_collapse_experiment,
    shortest_paths,
)
from .gh import Correspondence, FiniteMetricSpace, distortion, gh_exact_small, gh_upper_bound, quotient_distance, rate_fit
from .hyperbolic import FundamentalPolygon, regular_polygon, sample_domain, systole_estimate
from .quat import UnitQuaternion, exp_map, log_map, su2_distance
from .surface_rep import Representation, build_ade_rep, conjugate, evaluate, holonomy_image
from .words import Word

__all__ = [
    "CollapseConfig",
    "CollapseExperiment",
    "Correspondence",
    "FiniteMetricSpace",
    "FiniteSubgroup",
    "FundamentalPolygon",
    "GroupSpec",
    "Representation",
    "UnitQuaternion",
    "Word",
    "build_ade_rep",
    "build_fiber_net",
    "build_graph",
    "build_group",
    "close",
    "conjugate",
    "corollary_a",
    "corollary_b",
    "distortion",
    "evaluate",
    "exp_map",
    "generators",
    "gh_exact_small",
    "gh_upper_bound",
    "holonomy_image",
    "log_map",
    "lookup",
    "measure_distortion",
    "psi",
    "quotient_distance",
    "rate_fit",
    "regular_polygon",
    "riemann_hurwitz",
    "run_collapse_experiment",
    "sample_domain",
    "shortest_paths",
    "su2_distance",
    "sys_upper",
    "systole_estimate",
    "theorem_bound",
]
