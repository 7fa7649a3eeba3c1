"""Package for sqsep cube: lifts to {-1, 1}^d, the hard family and exact distances."""

from .distances import (
    DiscreteDistribution,
    Channel,
    cube_domain,
    count_domain,
    cube_points,
    point_index,
    walsh_hadamard,
    tv_exact,
    product,
    push_forward,
)
from .lift import ProductMixtureCube, lift, fourier_gap, chernoff_bound
from .instance import (
    LabeledCloud,
    HardInstance,
    InstancePair,
    HardFamily,
    build_family,
    build_instance,
    margin_of,
    sign,
    agreement_rate,
    instance_tv,
    p1_negation_tv,
    certificate_block,
)

__all__ = [
    "DiscreteDistribution",
    "Channel",
    "cube_domain",
    "count_domain",
    "cube_points",
    "point_index",
    "walsh_hadamard",
    "tv_exact",
    "product",
    "push_forward",
    "ProductMixtureCube",
    "lift",
    "fourier_gap",
    "chernoff_bound",
    "LabeledCloud",
    "HardInstance",
    "InstancePair",
    "HardFamily",
    "build_family",
    "build_instance",
    "margin_of",
    "sign",
    "agreement_rate",
    "instance_tv",
    "p1_negation_tv",
    "certificate_block",
]
