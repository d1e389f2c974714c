"""Training hyper-parameters."""

from __future__ import annotations

from dataclasses import dataclass

from ucolor.configbase import ConfigSection

RECON_LOSSES = ("l2", "l1")
REDUCTIONS = ("mean", "sum")


@dataclass
class TrainConfig(ConfigSection):
    """Optimizer, sampling and loss settings.

    Published values are ``learning_rate=1e-4``, ``batch_size=16`` and
    ``patch=128``; the defaults here are desk-scale. ``perceptual_weight``
    is the weight of the perceptual term in the total loss; run configs
    may also spell it ``lambda``.
    """

    section = "train"
    presets = {
        "no_perc": {"use_perceptual": False, "recon_loss": "l1"},
    }
    aliases = {"lambda": "perceptual_weight"}

    learning_rate: float = 1e-4
    batch_size: int = 2
    patch: int = 32
    perceptual_weight: float = 0.01
    recon_loss: str = "l2"
    reduction: str = "mean"
    use_perceptual: bool = True
    steps: int = 100
    seed: int = 0
    feature_seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    log_every: int = 10
    checkpoint_every: int = 0

    def violations(self) -> list[str]:
        problems: list[str] = []
        if not float(self.learning_rate) > 0.0:
            problems.append(f"train.learning_rate must be positive; got {self.learning_rate!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            problems.append(f"train.batch_size must be a positive integer; got {self.batch_size!r}")
        if not isinstance(self.patch, int) or self.patch < 4 or self.patch % 4:
            problems.append(f"train.patch must be a positive multiple of 4; got {self.patch!r}")
        if float(self.perceptual_weight) < 0.0:
            problems.append(f"train.perceptual_weight must be >= 0; got {self.perceptual_weight!r}")
        if self.recon_loss not in RECON_LOSSES:
            problems.append(f"train.recon_loss must be one of {', '.join(RECON_LOSSES)}; got {self.recon_loss!r}")
        if self.reduction not in REDUCTIONS:
            problems.append(f"train.reduction must be one of {', '.join(REDUCTIONS)}; got {self.reduction!r}")
        if not isinstance(self.steps, int) or self.steps < 0:
            problems.append(f"train.steps must be a non-negative integer; got {self.steps!r}")
        for name in ("beta1", "beta2"):
            value = float(getattr(self, name))
            if not 0.0 <= value < 1.0:
                problems.append(f"train.{name} must lie in [0, 1); got {value!r}")
        if not float(self.epsilon) > 0.0:
            problems.append(f"train.epsilon must be positive; got {self.epsilon!r}")
        if not isinstance(self.log_every, int) or self.log_every < 1:
            problems.append(f"train.log_every must be a positive integer; got {self.log_every!r}")
        if not isinstance(self.checkpoint_every, int) or self.checkpoint_every < 0:
            problems.append(
                f"train.checkpoint_every must be a non-negative integer; got {self.checkpoint_every!r}"
            )
        return problems
