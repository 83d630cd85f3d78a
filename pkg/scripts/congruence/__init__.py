"""
Partitions, carrier algebras and congruence generation.
"""

from scripts.congruence.carrier import CarrierAlgebra, CarrierError
from scripts.congruence.generation import (
    DEFAULT_CONGRUENCE_CAP,
    all_congruences,
    congruence_join,
    generated_congruence,
    is_compatible,
    kernel_of_projection,
    sample_congruences,
)
from scripts.congruence.partition import Partition, UnionFind, block_profile, restrict

__all__ = [
    "DEFAULT_CONGRUENCE_CAP",
    "CarrierAlgebra",
    "CarrierError",
    "Partition",
    "UnionFind",
    "all_congruences",
    "block_profile",
    "congruence_join",
    "generated_congruence",
    "is_compatible",
    "kernel_of_projection",
    "restrict",
    "sample_congruences",
]
