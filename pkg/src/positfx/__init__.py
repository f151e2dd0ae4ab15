"""Bit-accurate posit / fixed-point arithmetic and quantization analysis."""

__version__ = "0.1.0"

from .dyadic import DyadicRational, decimal_string, dyadic
from .posit import (
    ConfigMismatchError,
    PositConfig,
    PositFields,
    PositPattern,
    Special,
    decode_fields,
    decode_value,
    encode_round,
    enumerate_all,
    negate,
    posit_add,
    posit_fma_accumulate,
    posit_mul,
)
from .normalized import (
    NormalizedPositPattern,
    NormalizedRangeError,
    compress,
    expand,
    in_normalized_range,
    max_normalized_value,
    quantize_normalized,
)
from .fixedpoint import (
    FxpConfig,
    FxpPattern,
    SignMagOverflowError,
    SignMagPattern,
    fxp_accumulate,
    fxp_multiply,
    fxp_quantize,
    fxp_quantize_float,
    relu,
    signmag_to_twos,
)
from .converter import (
    GENERAL,
    NORMALIZED,
    ConverterSpec,
    NaRInputError,
    StageTrace,
    convert,
)
from .mac import (
    FXP_ONLY,
    POFX_PER_USE,
    POSIT_FMA,
    POSIT_ONLY,
    MacDesign,
    MacTrace,
    dot_product,
    layer_forward,
)
from .analysis import (
    ErrorReport,
    LayerTensor,
    ParetoPoint,
    QuantScheme,
    activation_error_report,
    apply_scheme,
    hypervolume,
    pareto_front,
    prune_configs,
    reference_point,
    weight_error_report,
)
from .accelerator import (
    AcceleratorDesign,
    ResourceAccount,
    compare_designs,
    simulate,
)
