"""Exact arithmetic and elliptic/translation classification in V_{d,k}."""

from .errors import *  # noqa: F401,F403
from .tree import (  # noqa: F401
    Ball,
    End,
    Relation,
    Shape,
    ball_relation,
    delta_depth,
    diameter,
    last_ball,
    parse_address,
    parse_shape,
    penult_ball,
    planar_compare,
    spherical_partition,
)
from .partition import (  # noqa: F401
    RegularPartition,
    TaggedPartition,
    apply_element,
    common_refinement,
    delta_refinement,
    omega,
    refines,
    theta,
    validate_partition,
)
from .element import Element, commutator  # noqa: F401
from .kernels import BACKEND  # noqa: F401

__version__ = "0.1.0"
