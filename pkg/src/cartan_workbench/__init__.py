"""Exact workbench for twisted convolution algebras over discrete groups."""

from .algebra import AlgebraElement, ConvolutionAlgebra
from .cocycles import CocycleDescriptor, CocycleTerm
from .groups import Ball, GroupDescriptor, TwistTerm
from .scalars import CircleElement, Cyclotomic
from .subgroups import SubgroupDescriptor
from .weyl import Character, WeylContext

__all__ = [
    "AlgebraElement",
    "Ball",
    "Character",
    "CircleElement",
    "CocycleDescriptor",
    "CocycleTerm",
    "ConvolutionAlgebra",
    "Cyclotomic",
    "GroupDescriptor",
    "SubgroupDescriptor",
    "TwistTerm",
    "WeylContext",
]
