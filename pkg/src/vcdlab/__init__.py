"""Exact computational laboratory for classical and cohomological VC-density."""

from .exactq import QMatrix, Subspace, kernel_basis, rref, subspace_from_spanning
from .cohomology import Complex, Subcomplex, cohomology_space, restriction_on_hp

__version__ = "0.1.0"
