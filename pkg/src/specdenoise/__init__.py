"""Denoising toolkit for two-segment SWIR reflectance spectra.

Pipeline pieces: synthetic labelled scenes, the composite noise model, a
from-scratch 1D convolutional U-Net denoiser trained on noisy/low-noise
pairs, classical smoothing baselines, and an evaluation protocol built on
reconstruction error, relative downstream classification and band-depth
summary parameters.
"""

from .grid import (
    N_CHANNELS,
    SEGMENT_1_CHANNELS,
    SEGMENT_2_CHANNELS,
    WavelengthGrid,
    build_default_grid,
    channel_range,
)
from .spectra import BLAND_LABEL, Dataset, Spectrum, Violation, validate_dataset, validate_spectrum
from .synth import (
    AbsorptionFeature,
    MineralTemplate,
    SceneConfig,
    clean_spectrum,
    default_bland_template,
    default_templates,
    generate_dataset,
    template_curve,
)
from .preprocess import (
    ARTIFACT_BAND_UM,
    NoiseParams,
    add_noise,
    add_noise_dataset,
    impute_artifact_band,
    impute_bad_values,
    sample_noise,
)
from .baselines import CotcatLikeParams, SGParams, cotcat_like, sg_coefficients, sg_filter
from .evaluate import (
    BandDepthParam,
    CentroidClassifier,
    EvalReport,
    MetricSet,
    OutcropReport,
    band_depth,
    centroid_classifier_predict,
    centroid_classifier_train,
    classification_metrics,
    continuum_remove,
    denoise_mse,
    outcrop_report,
    ratio_spectra,
    relative_metrics,
)
from .errors import CheckpointError, ConfigError, DataError, NumericError, SpecDenoiseError
from . import nn

__version__ = "0.1.0"
