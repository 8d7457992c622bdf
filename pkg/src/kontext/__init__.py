"""Greechie orthogonality diagrams, two-valued measures and a Born-rule QRNG simulator."""
from ._core import BACKEND
from .greechie import (
    Atom,
    Block,
    Diagram,
    from_vectors,
    make_bug,
    make_star,
    parse,
    realize_check,
    serialize,
    star,
)
from .qrng import QrngConfig, SampleRun, certify_angle, debias, sample
from .ray_space import ContextBasis, Ray, born_probability, complete_context, cross3, inner_product, is_orthogonal, ray
from .valuations import (
    ClassificationReport,
    ContradictionError,
    Status,
    admits_two_valued,
    classify,
    enumerate_two_valued,
    is_separating,
    is_unital,
    propagate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Atom", "Block", "Diagram", "from_vectors", "make_bug", "make_star", "parse",
    "realize_check", "serialize", "star", "QrngConfig", "SampleRun", "certify_angle", "debias",
    "sample", "ContextBasis", "Ray", "born_probability", "complete_context", "cross3",
    "inner_product", "is_orthogonal", "ray", "ClassificationReport", "ContradictionError",
    "Status", "admits_two_valued", "classify", "enumerate_two_valued", "is_separating",
    "is_unital", "propagate",
]
