"""Order-embeddings of topological posets into sampled hyperspaces of closed sets."""

__version__ = "0.1.0"

from .embedding import (
    SampledMetricPoset,
    canonical_ideal,
    forward_continuity_probe,
    inverse_continuity_probe,
    order_connectedness_probe,
    radial_convexity_check,
    radially_convex_metric,
)
from .errors import DomainError, HyperlatError, InputError, PreconditionError
from .fixedpoint import filtered_inf_check, tk_iterate
from .hyperspace import FellNbhd, Region, SetSequence, fell_membership, kp_check, monotone_limit
from .kernels import BACKEND
from .metric import MetricContext, SampledSet, hausdorff, make_set, wijsman_rho
from .order import FinitePoset, meet, join, validate_partial_order
from .pogroup import PoGroup, SymMatrix, ideal_product_check, loewner_leq, validate_pogroup
