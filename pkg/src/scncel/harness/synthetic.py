"""Synthetic bearing-like vibration signals.

A stand-in for real test-rig recordings: a sinusoidal carrier, a train of
one-sided exponentially decaying impacts at jittered intervals, and white noise.
The presets are fixtures tuned so that the six health states land in
distinct but overlapping regions of (Ex, En, He) space; they make no
claim about bearing physics.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..signal_pipeline import Recording

# impact decay time constant, in samples
IMPACT_DECAY = 6.0


@dataclass(frozen=True)
class SyntheticClassSpec:
    """Signal recipe for one health state.

    Rates and frequencies are per 1000 samples; ``impulse_jitter`` is the
    standard deviation of the spacing between impacts, in samples.
    """

    amplitude: float
    impulse_rate: float = 0.0
    impulse_jitter: float = 0.0
    noise_std: float = 0.0
    carrier_freq: float = 30.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")
        if self.amplitude + self.noise_std <= 0:
            raise ValueError("amplitude + noise_std must be > 0")


# normal: weak carrier, no impacts. or12: strongest and most regular impacts.
# re: weak, highly irregular impacts in heavier noise.
PRESETS: dict[str, SyntheticClassSpec] = {
    "normal": SyntheticClassSpec(amplitude=0.5, impulse_rate=0.0, impulse_jitter=0.0, noise_std=0.3, carrier_freq=29.0),
    "ir": SyntheticClassSpec(amplitude=2.0, impulse_rate=20.0, impulse_jitter=2.0, noise_std=0.3, carrier_freq=29.0),
    "or3": SyntheticClassSpec(amplitude=1.5, impulse_rate=10.0, impulse_jitter=5.0, noise_std=0.3, carrier_freq=29.0),
    "or6": SyntheticClassSpec(amplitude=1.0, impulse_rate=5.0, impulse_jitter=10.0, noise_std=0.3, carrier_freq=29.0),
    "or12": SyntheticClassSpec(amplitude=3.0, impulse_rate=10.0, impulse_jitter=1.0, noise_std=0.2, carrier_freq=29.0),
    "re": SyntheticClassSpec(amplitude=0.7, impulse_rate=15.0, impulse_jitter=30.0, noise_std=0.4, carrier_freq=29.0),
}

# class ids follow this order
PRESET_ORDER = ("normal", "ir", "or3", "or6", "or12", "re")


def impact_times(spec: SyntheticClassSpec, length: int, rng: np.random.Generator) -> np.ndarray:
    if spec.impulse_rate <= 0:
        return np.empty(0)
    spacing = 1000.0 / spec.impulse_rate
    n = int(length / spacing) + 2
    gaps = np.maximum(spacing + spec.impulse_jitter * rng.standard_normal(n), 1.0)
    times = rng.uniform(0, spacing) + np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    return times[times < length]


def generate_synthetic_recording(spec: SyntheticClassSpec, length: int, label: int,
                                 rng: np.random.Generator) -> Recording:
    """One recording of ``length`` samples, deterministic given ``rng``'s state."""
    if length < 2:
        raise ValueError("length must be >= 2")
    t = np.arange(length, dtype=float)
    x = spec.amplitude * np.sin(2 * np.pi * spec.carrier_freq * t / 1000.0)
    span = int(np.ceil(IMPACT_DECAY * 8))
    tau = np.arange(span, dtype=float)
    for t0 in impact_times(spec, length, rng):
        start = int(np.ceil(t0))
        stop = min(start + span, length)
        dt = tau[: stop - start] + (start - t0)
        x[start:stop] += spec.amplitude * np.exp(-dt / IMPACT_DECAY)
    x += spec.noise_std * rng.standard_normal(length)
    meta = {"source": "synthetic", **asdict(spec)}
    return Recording(x, label, meta)


def preset_specs(names=PRESET_ORDER) -> list[SyntheticClassSpec]:
    try:
        return [PRESETS[n] for n in names]
    except KeyError as exc:
        raise ValueError(f"unknown preset {exc.args[0]!r}; known: {', '.join(PRESETS)}") from None
