"""Exact computation of valuations, gauges, positive cones and their
Baer-Krull liftings on matrix algebras with involution over Q(x_1,...,x_r)."""

from .field import (
    FunctionField,
    GammaVal,
    INF,
    OrderingSpec,
    PolyX,
    RatFunc,
    enumerate_orderings,
    newton_root_valuations,
    parse_element,
)

__all__ = [
    "FunctionField",
    "GammaVal",
    "INF",
    "OrderingSpec",
    "PolyX",
    "RatFunc",
    "enumerate_orderings",
    "newton_root_valuations",
    "parse_element",
]
