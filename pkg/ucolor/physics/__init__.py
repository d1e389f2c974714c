"""Underwater image formation: background light, transmission priors, inversion."""

from .background import DEFAULT_EPSILON, estimate_background_light
from .formation import (
    DEFAULT_T_FLOOR,
    RestoreResult,
    classical_restore,
    invert_model,
    invert_model_raw,
    reverse_transmission,
    rmt_pyramid,
    synthesize,
)
from .priors import (
    DEFAULT_PATCH,
    DcpPrior,
    GdcpPrior,
    TransmissionPrior,
    UdcpPrior,
    available_priors,
    dark_channel,
    dcp_transmission,
    gdcp_transmission,
    get_prior,
    udcp_transmission,
)

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_PATCH",
    "DEFAULT_T_FLOOR",
    "DcpPrior",
    "GdcpPrior",
    "RestoreResult",
    "TransmissionPrior",
    "UdcpPrior",
    "available_priors",
    "classical_restore",
    "dark_channel",
    "dcp_transmission",
    "estimate_background_light",
    "gdcp_transmission",
    "get_prior",
    "invert_model",
    "invert_model_raw",
    "reverse_transmission",
    "rmt_pyramid",
    "synthesize",
    "udcp_transmission",
]
