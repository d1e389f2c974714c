"""Architecture hyper-parameters and the ablation presets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ucolor.configbase import ConfigSection

LEVELS = 3
PAPER_BASE_WIDTH = 128
PAPER_REDUCTION = 16
KNOWN_PRIORS = ("gdcp", "dcp", "udcp")


@dataclass
class ModelConfig(ConfigSection):
    """Hyper-parameters of the enhancement network.

    Desk-scale defaults (``base_width=8``, ``attention_reduction=4``) train on
    a laptop CPU; :meth:`paper_scale` gives the published widths.
    """

    section = "model"
    presets = {
        "no_hsv": {"use_hsv": False},
        "no_lab": {"use_lab": False},
        "no_hsv_lab": {"use_hsv": False, "use_lab": False},
        "rgb3": {"triplicate_rgb": True},
        "no_mtgm": {"use_mtgm": False},
        "rdcp": {"prior": "dcp"},
        "rudcp": {"prior": "udcp"},
        "no_cam": {"use_cam": False},
    }

    base_width: int = 8
    levels: int = LEVELS
    attention_reduction: int = 4
    leaky_slope: float = 0.2
    use_hsv: bool = True
    use_lab: bool = True
    triplicate_rgb: bool = False
    use_mtgm: bool = True
    use_cam: bool = True
    prior: str = "gdcp"
    prior_patch: int = 15
    init_std: float = 0.02

    def violations(self) -> list[str]:
        problems: list[str] = []
        if not isinstance(self.base_width, int) or self.base_width < 1:
            problems.append(f"model.base_width must be a positive integer; got {self.base_width!r}")
        if self.levels != LEVELS:
            problems.append(f"model.levels must be {LEVELS}; got {self.levels!r}")
        if not isinstance(self.attention_reduction, int) or self.attention_reduction < 1:
            problems.append(
                f"model.attention_reduction must be a positive integer; got {self.attention_reduction!r}"
            )
        elif isinstance(self.base_width, int) and self.base_width % self.attention_reduction:
            problems.append(
                f"model.attention_reduction {self.attention_reduction} must divide "
                f"model.base_width {self.base_width}"
            )
        if not 0.0 <= float(self.leaky_slope) < 1.0:
            problems.append(f"model.leaky_slope must lie in [0, 1); got {self.leaky_slope!r}")
        if self.prior not in KNOWN_PRIORS:
            problems.append(f"model.prior must be one of {', '.join(KNOWN_PRIORS)}; got {self.prior!r}")
        if not isinstance(self.prior_patch, int) or self.prior_patch < 1 or self.prior_patch % 2 == 0:
            problems.append(f"model.prior_patch must be a positive odd integer; got {self.prior_patch!r}")
        if not float(self.init_std) > 0.0:
            problems.append(f"model.init_std must be positive; got {self.init_std!r}")
        return problems

    @classmethod
    def paper_scale(cls, **overrides: Any) -> "ModelConfig":
        """Configuration with the published encoder widths (128/256/512) and ``r = 16``."""
        values = {"base_width": PAPER_BASE_WIDTH, "attention_reduction": PAPER_REDUCTION}
        values.update(overrides)
        return cls(**values)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(self.base_width * 2**k for k in range(self.levels))

    @property
    def paths(self) -> tuple[str, ...]:
        """Encoder paths in concatenation order; the RGB path is always present."""
        names = ["rgb"]
        if self.use_hsv:
            names.append("hsv")
        if self.use_lab:
            names.append("lab")
        return tuple(names)

    @property
    def fused(self) -> bool:
        """Whether dense connections (and their fusion convs) exist."""
        return len(self.paths) > 1
