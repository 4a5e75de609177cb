"""L2 regularity of refinable functions with arbitrary integer dilation matrices."""

from .attractor import SupportSet, TileCloud, omega, tile_points
from .bspline import bspline_mask, convolve_masks, tile_mask
from .errors import *  # noqa: F401,F403
from .lattice import (DigitSet, DilationMatrix, SpectralStructure, canonical_digits,
                      digits_valid, rational_invariant_check, spectral_moduli,
                      validate_dilation)
from .mask import Mask
from .maskdesign import (MomentSystem, brute_force_minimality, design_minimal_mask,
                         verify_lower_bound)
from .subdivision import GridData, iterate, sample_refinable, subdivision_step
from .transition import (Face, RegularityReport, autocorrelation, build_transition,
                         coordinate_faces, regularity, regularity_per_subspace, restrict,
                         spectral_radius, sum_rules_order)
from .trigpoly import FaceBasis, TrigPolynomial, ZeroConstraint, constraint_rows, face_basis

__version__ = "0.1.0"
