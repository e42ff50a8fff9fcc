"""Synthetic beating-ring phantoms standing in for cine image stacks."""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError


@dataclass(frozen=True)
class PhantomSpec:
    """Parameters of a beating annulus phantom.

    The ring of slice ``i`` has a base radius that swells smoothly towards the
    middle slices; the radius is modulated in time by ``harmonics`` cosines of
    the beat frequency with amplitudes falling off as ``1/h**2``.
    """

    nx: int = 128
    ny: int = 128
    slices: int = 10
    frames: int = 20
    freq_bpm: float = 360.0
    harmonics: int = 1
    noise_sigma: float = 0.0
    seed: int = 0
    dt: float = 8e-3
    ring_width: float = 0.06
    beat_depth: float = 0.08

    def __post_init__(self):
        for name in ("nx", "ny", "slices", "frames", "harmonics"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be >= 0")
        if self.freq_bpm < 0 or self.dt <= 0:
            raise ConfigurationError("freq_bpm must be >= 0 and dt > 0")

    @property
    def omega(self):
        return 2.0 * np.pi * self.freq_bpm / 60.0


def ring_radius(spec, slice_index, times):
    """Ring radius in pixels for one slice at the given times."""
    size = min(spec.nx, spec.ny)
    s = (slice_index + 0.5) / spec.slices
    base = 0.25 * size * (0.8 + 0.2 * np.sin(np.pi * s))
    h = np.arange(1, spec.harmonics + 1)[:, None]
    phases = 0.7 * (h - 1)
    beat = np.sum(np.cos(h * spec.omega * times[None, :] + phases) / h**2, axis=0)
    return base * (1.0 + spec.beat_depth * beat)


def make_phantom(spec, times=None):
    """Render the phantom as an ``(nx, ny, slices, frames)`` array in ``[0, 1]``.

    ``times`` overrides the default sampling ``k * dt``; noise, if any, is
    drawn from ``numpy.random.default_rng(spec.seed)``.
    """
    if times is None:
        times = spec.dt * np.arange(spec.frames)
    times = np.asarray(times, dtype=np.float64)
    x = np.arange(spec.nx) - (spec.nx - 1) / 2.0
    y = np.arange(spec.ny) - (spec.ny - 1) / 2.0
    rho = np.hypot(x[:, None], y[None, :])[..., None]
    width = spec.ring_width * min(spec.nx, spec.ny)

    out = np.empty((spec.nx, spec.ny, spec.slices, times.size))
    for i in range(spec.slices):
        r = ring_radius(spec, i, times)
        out[:, :, i, :] = np.exp(-0.5 * ((rho - r[None, None, :]) / width) ** 2)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        out += spec.noise_sigma * rng.standard_normal(out.shape)
        np.clip(out, 0.0, 1.0, out=out)
    return out
