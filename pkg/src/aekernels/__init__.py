"""Azimuth-equivariant BEV kernels: AeConv, anchor target codec, virtual depth."""
from ._accel import BACKEND, HAVE_NUMBA
from .aeconv import (GatherPlan, aeconv_backward, aeconv_forward_naive, aeconv_forward_planned,
                     build_gather_plan)
from .anchor import (AzimuthAnchor, BoxState, ResidualState, anchor_at_cell, anchor_at_point, decode,
                     encode, rotate_box, rotate_point, wrap_angle)
from .depth import (FixedDepthSpec, VirtualDepthSpec, bin_centers, map_scores, map_scores_for_camera,
                    real_bin_size, real_focal)
from .errors import ConfigurationError, CoverageError, FormatError
from .formats import read_tensor, write_tensor
from .geometry import (Camera, CameraRig, GridSpec, RadialBasisField, azimuth_of, parse_rig,
                       radial_basis_field, read_rig, rig_center)
from .revolve import Blob, RevolveReport, SyntheticScene, run_revolve, synth_scene
from .tensor import Kernel, bilinear_sample, kernel_offsets, rotate_resample, standard_conv

__version__ = "0.1.0"
