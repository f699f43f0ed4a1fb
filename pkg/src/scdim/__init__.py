"""Simplicial covering dimension of extremal concept classes."""
from .concepts import (ConceptClass, Domain, Partial, F5, cube, dual_class, generate, is_extremal, load_class,
                       shattered_sets, strongly_shattered_sets, thresholds, vc_dim)
from .complexes import build_cubical, build_simplicial, delta_complex, gamma_complex, subdivide
from .covers import (certify, closed_shrinkage, cover_order, lower_bound_certificate, pullback_cover,
                     rounding_radius, vertex_star_cover)
from .retraction import build_retraction
from .learner import loss, random_realizable, required_sample_size, run_experiment

__version__ = "0.1.0"
