"""Normal cloud model features, cloud sampling and SCN ensembles for
few-shot fault diagnosis."""

from .cloud_model import (
    CloudDescriptor,
    CloudDroplet,
    DropletBatch,
    SampleStats,
    backward_cloud,
    cloud_features,
    forward_cloud,
    membership,
    sample_stats,
)
from .ensemble import ScnCelModel, predict_scn_cel, train_scn_cel, vote
from .oversampling import (
    SAMPLERS,
    ClassCloudProfile,
    SamplerRequest,
    adasyn,
    bootstrap_oversample,
    class_cloud_profile,
    cloud_sample,
    get_sampler,
    kde_sample,
    smote,
)
from .scn import ScnConfig, ScnModel, one_hot, predict_scn, train_scn
from .signal_pipeline import (
    LabeledFeatureSet,
    Recording,
    WindowSpec,
    extract_cloud_features,
    normalize_minmax,
    sliding_windows,
    wavelet_denoise,
)

__version__ = "0.1.0"

__all__ = [
    "CloudDescriptor", "CloudDroplet", "DropletBatch", "SampleStats", "backward_cloud", "cloud_features",
    "forward_cloud", "membership", "sample_stats",
    "ScnCelModel", "predict_scn_cel", "train_scn_cel", "vote",
    "SAMPLERS", "ClassCloudProfile", "SamplerRequest", "adasyn", "bootstrap_oversample",
    "class_cloud_profile", "cloud_sample", "get_sampler", "kde_sample", "smote",
    "ScnConfig", "ScnModel", "one_hot", "predict_scn", "train_scn",
    "LabeledFeatureSet", "Recording", "WindowSpec", "extract_cloud_features", "normalize_minmax",
    "sliding_windows", "wavelet_denoise",
]
