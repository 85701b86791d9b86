"""Gabor frames on Z_L and the twisted convolution algebra behind their frame operators."""

__version__ = "0.1.0"

from .algebra import (
    TwistedSeq,
    WeightSpec,
    apply_derivation,
    coefficients_from_operator,
    fold,
    janssen_coefficients,
    represent,
    twisted_involution,
    twisted_power,
    twisted_product,
    weighted_norm,
)
from .errors import (
    ConditioningError,
    ContourError,
    DimensionError,
    GaborNCTError,
    IncompatibleAlgebraError,
    LatticeError,
    NotAFrameError,
    NotInvertibleError,
    NumericalError,
    ParameterError,
    RepresentationUnavailableError,
    SupportOverflowError,
)
from .gabor import (
    FrameBounds,
    GaborSystem,
    dual_window,
    figa_constant,
    figa_residual,
    figa_sides,
    frame_bounds,
    frame_operator_matrix,
    power_window,
    reconstruct,
    tight_window,
    wexler_raz_check,
)
from .report import Report, emit
from .spectral import (
    ContourSpec,
    DecayProfile,
    SpectrumReport,
    decay_profile,
    invert_in_algebra,
    operator_spectrum,
    riesz_dunford,
    spectral_radius_compare,
    symmetry_probe,
)
from .tf_core import (
    LatticeSpec,
    TFPoint,
    adjoint_lattice,
    composition_phase,
    tf_shift,
    tf_shift_matrix,
)
from .windows import (
    WindowFamily,
    condition_a_sum,
    gaussian_ambiguity,
    make_window,
    modulation_norm,
    stft,
)
