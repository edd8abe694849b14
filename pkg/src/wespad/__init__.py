"""
WESPAD model: information gain, noisy-region flags in regular and distorted
embedding spaces, context flags, feature assembly and bundles
"""

from src.wespad.config import FeatureGroup, FeatureLayout, WespadConfig, load_config
from src.wespad.information_gain import IGResolver, IGWeights, compute_ig, ig_lookup
from src.wespad.regions import RegionFlagModel, Space, fit_region_model, flags_for, region_flags
from src.wespad.model import (
    FeatureSpace,
    TrainingSplit,
    WespadModel,
    featurize,
    featurize_many,
    fit_wespad,
    predict,
    predict_many,
)
from src.wespad.bundle import load_bundle, save_bundle

__all__ = [
    'FeatureGroup',
    'FeatureLayout',
    'WespadConfig',
    'load_config',
    'IGResolver',
    'IGWeights',
    'compute_ig',
    'ig_lookup',
    'RegionFlagModel',
    'Space',
    'fit_region_model',
    'flags_for',
    'region_flags',
    'FeatureSpace',
    'TrainingSplit',
    'WespadModel',
    'featurize',
    'featurize_many',
    'fit_wespad',
    'predict',
    'predict_many',
    'load_bundle',
    'save_bundle',
]
