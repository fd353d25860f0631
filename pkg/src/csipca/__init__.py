"""PCA-based downlink CSI feedback compression toolkit.

Generate or load spatial-frequency channel matrices, move them into the
angular-delay or sub-band eigenvector representation, compress them with a
per-instance PCA plus an optional uniform scalar quantizer, and score the
round trip with the generalized cosine similarity, overhead-reduction, and
feedback-bit metrics. The csipca.bench subpackage drives all of it from
plain-text configs and a CLI.
"""

from .chanforge import (ArrayGeometry, Cfr, Dataset, DatasetMeta, GenConfig,
                        MultipathProfile, DEFAULT_GEOMETRY, DEFAULT_N_SUBCARRIERS,
                        DEFAULT_SCS_HZ, STOCK_PROFILE_NAMES, cir_to_cfr, generate_cir,
                        generate_dataset, generate_sample, load_dataset, load_profile,
                        save_dataset, steering_vector)
from .errors import (ConfigError, DataError, DegenerateInputError, FormatError,
                     InputError)
from .metrics import (FeedbackSchedule, GCS_VARIANTS, feedback_bits,
                      feedback_bits_ceil, gcs, overhead_reduction_ad,
                      overhead_reduction_ev, percent_display)
from .pca import (CsiReport, MODE_AD, MODE_EV, PcaBasis, choose_components, compress,
                  compress_ad, compress_ev, pca_fit, reconstruct, report_from_bytes,
                  report_to_bytes)
from .quant import (QuantizedMatrix, dequantize, quantize, quantize_report,
                    quantized_from_bytes, quantized_to_bytes)
from .xforms import (AngularDelay, EvMatrix, TAP_POLICIES, TapChannel, embed_taps,
                     from_angular_delay, select_taps, subband_average,
                     subband_eigenvectors, to_angular_delay)

__version__ = "0.1.0"
