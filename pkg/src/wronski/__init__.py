"""Nets, labeling polytopes, and real rational functions with prescribed critical points."""

from wronski.netcomb import (
    CellComplex,
    Distinguished,
    DualTree,
    EdgeId,
    Face,
    NetClass,
    NetStructureError,
    build_complex,
    catalan_u,
    distinguished_elements,
    dual_trees,
    enumerate_nets,
    face_order,
    parity_map,
)

__version__ = "0.1.0"
