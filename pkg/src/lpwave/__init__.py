"""Littlewood-Paley square functions over dyadic multiresolution grids.

Submodules: :mod:`grid` (sampled functions), :mod:`scaling` (scaling
systems), :mod:`proj1d` and :mod:`tensor` (projectors and details),
:mod:`czd` (stopping-time decomposition), :mod:`lpverify` (square function,
sign sums, Khintchine, weak type) and :mod:`cli`.
"""

from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
