"""Time extrapolation of a fitted DMD expansion (reduced-order model)."""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError, OverflowGuardError

GROWTH_POLICIES = ("zero-delta", "keep-delta")

#: Largest admissible ``delta * dt * R`` under the keep-delta policy.
MAX_GROWTH_EXPONENT = 50.0


@dataclass(frozen=True)
class ExtensionSpec:
    """Extend ``source`` to ``total_frames`` snapshots.

    ``growth_policy`` must be given explicitly: ``"zero-delta"`` evaluates all
    modes as neutrally stable, ``"keep-delta"`` keeps the fitted growth rates.
    """

    total_frames: int
    growth_policy: str
    source: object

    def __post_init__(self):
        if self.growth_policy not in GROWTH_POLICIES:
            raise ConfigurationError(f"growth_policy must be one of {GROWTH_POLICIES}, "
                                     f"got {self.growth_policy!r}")
        k = self.source.time_grid.count
        if int(self.total_frames) != self.total_frames or self.total_frames <= k:
            raise InvalidInputError(f"total_frames must be an integer larger than the "
                                    f"{k} training snapshots, got {self.total_frames}")


def apply_policy(expansion, growth_policy, total_frames):
    if growth_policy == "zero-delta":
        return expansion.with_zero_growth()
    if growth_policy != "keep-delta":
        raise ConfigurationError(f"unknown growth policy {growth_policy!r}")
    if expansion.n_modes:
        worst = float(np.max(expansion.growth_rates)) * expansion.time_grid.dt * total_frames
        if worst > MAX_GROWTH_EXPONENT:
            raise OverflowGuardError(
                f"growth exponent delta*dt*R = {worst:.3g} exceeds {MAX_GROWTH_EXPONENT}; "
                "use the zero-delta policy or fewer frames")
    return expansion


def extend(expansion, spec):
    """Evaluate the expansion on ``spec.total_frames`` snapshots from the training start.

    The first ``K`` frames coincide bit for bit with ``reconstruct`` of the
    (policy-adjusted) expansion on its training grid.
    """
    if spec.source is not expansion:
        spec = ExtensionSpec(spec.total_frames, spec.growth_policy, expansion)
    exp = apply_policy(expansion, spec.growth_policy, spec.total_frames)
    return exp.reconstruct(exp.time_grid.with_count(int(spec.total_frames)))


def extend_frames(expansion, total_frames, growth_policy="zero-delta"):
    return extend(expansion, ExtensionSpec(total_frames, growth_policy, expansion))
