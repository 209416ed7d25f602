"""Spaces of planar curves with bounded curvature and prescribed endpoints.

Submodules
----------
strings   sign strings, bead points and nested-string sets
stretch   envelope functions, the median function zeta and the stretch solver
curves    piecewise constant curvature paths, classification, detection
classify  homotopy class of a curve space from its endpoint data
maps      pulley curves, the generator family and the sphere map
cli       command line front end
"""
from . import strings, stretch, curves, classify, maps, cli

__version__ = "0.1.0"
