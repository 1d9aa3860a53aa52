"""Flexible discrete and smooth cones and cylinders carrying planar sections."""
from .discrete_cone import (ALL_SELECTORS, BranchSelector, FoldPair, InfeasibleError, SectionConfig,
                            detect_coupling, eval_D1, eval_D2, flat_states, fold_coupling,
                            synthesize_config)
from .bricard import build_strip, flex_sweep, mirror_plane_omega, pencil_section, verify_antiparallelogram
from .mesh import Mesh, export_obj, read_obj

__version__ = "0.1.0"
