"""Public package exports."""

from .config import RunConfig, load_config
from .enhancer import Enhancer, enhancer
from .models import BackgroundLight, ColorSpace, Image, TransmissionMap
from .network import ModelConfig, ModelWeights, forward
from .training import TrainConfig, train

__all__ = [
    "enhancer",
    "Enhancer",
    "Image",
    "ColorSpace",
    "BackgroundLight",
    "TransmissionMap",
    "ModelConfig",
    "ModelWeights",
    "TrainConfig",
    "RunConfig",
    "forward",
    "load_config",
    "train",
]

__version__ = "0.1.0"
