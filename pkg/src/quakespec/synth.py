"""Deterministic synthetic accelerograms for oracle testing and demos.

Random numbers come from the Philox 4x64-10 counter-based generator
(Salmon et al. 2011) keyed by the user seed with the counter starting
at zero, consumed as raw 64-bit words:

    uniform_i = (word_i >> 11) * 2**-53          in [0, 1)
    phase_i   = 2*pi * uniform_i
    gauss_{2i, 2i+1} = Box-Muller from (uniform_{2i}', uniform_{2i+1})
                       where u' = (word >> 11 + 1) * 2**-53 avoids log(0)

This pins the byte stream to a published algorithm rather than to any
library's distribution code, so identical spec + seed reproduces the
same record bit-for-bit anywhere.  First four raw words for seed 7 are
frozen as test vectors in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_core import Accelerogram
from .response import _sdof_histories

KINDS = ("sine", "multisine", "band_noise", "filtered_noise")

# Minimum record length in units of the longest characteristic period.
MIN_DURATION_PERIODS = 10.0


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic record.

    frequencies/amplitudes apply to sine and multisine, band to
    band_noise, natural_freq/filter_damping to filtered_noise.  seed is
    mandatory for the stochastic kinds and ignored by the exact ones.
    """

    kind: str
    dt: float
    duration: float
    frequencies: tuple = (1.0,)
    amplitudes: tuple = (1.0,)
    band: tuple = (0.0, 5.0)
    natural_freq: float = 1.0
    filter_damping: float = 0.3
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")
        object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "band", tuple(float(b) for b in self.band))

    def characteristic_period(self) -> float:
        if self.kind in ("sine", "multisine"):
            return 1.0 / min(self.frequencies)
        if self.kind == "band_noise":
            fa, fb = self.band
            return 1.0 / fa if fa > 0.0 else 1.0 / fb
        return 1.0 / self.natural_freq


def _raw_words(seed: int, n: int) -> np.ndarray:
    return np.random.Philox(key=np.uint64(seed)).random_raw(n)


def _uniforms(seed: int, n: int) -> np.ndarray:
    return (_raw_words(seed, n) >> np.uint64(11)) * 2.0 ** -53


def _gaussians(seed: int, n: int) -> np.ndarray:
    m = (n + 1) // 2
    u = _uniforms(seed, 2 * m).reshape(2, m)
    # shift u1 off zero so log stays finite; costs one ulp of bias
    u1 = u[0] + 2.0 ** -53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u[1]
    z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
    return z[:n]


def _validate(spec: SynthSpec):
    if spec.kind in ("sine", "multisine"):
        if not spec.frequencies or any(f <= 0.0 for f in spec.frequencies):
            raise ValueError("frequencies must be positive")
        if len(spec.amplitudes) != len(spec.frequencies):
            raise ValueError("need one amplitude per frequency")
    if spec.kind == "band_noise":
        fa, fb = spec.band
        if fa < 0.0 or fa >= fb:
            raise ValueError(f"invalid band [{fa}, {fb}]: need 0 <= f_a < f_b")
        if fb > 0.5 / spec.dt:
            raise ValueError("band edge beyond Nyquist")
    if spec.kind == "filtered_noise":
        if not spec.natural_freq > 0.0:
            raise ValueError("natural_freq must be positive")
        if not 0.0 < spec.filter_damping < 1.0:
            raise ValueError("filter_damping must lie in (0, 1)")
        if spec.dt * spec.natural_freq > 0.1:
            raise ValueError("dt too coarse for the filter: need dt <= 0.1/natural_freq")
    if spec.kind in ("band_noise", "filtered_noise") and spec.seed is None:
        raise ValueError(f"{spec.kind} requires a seed")
    min_dur = MIN_DURATION_PERIODS * spec.characteristic_period()
    if spec.duration < min_dur:
        raise ValueError(
            f"duration {spec.duration} s too short; need >= {min_dur:.3g} s "
            f"(10 characteristic periods)")


def generate(spec: SynthSpec) -> Accelerogram:
    """Synthesize the record described by spec.

    The sample count is round(duration/dt), so the sampling window is
    exactly `duration` long and integer-frequency sines stay coherent
    with the record's own transform grid.
    """
    _validate(spec)
    n = int(round(spec.duration / spec.dt))
    t = np.arange(n) * spec.dt
    label = f"synth:{spec.kind}"

    if spec.kind == "sine" or spec.kind == "multisine":
        a = np.zeros(n)
        for freq, amp in zip(spec.frequencies, spec.amplitudes):
            a = a + amp * np.sin(2.0 * np.pi * freq * t)
        return Accelerogram(dt=spec.dt, samples=a, label=label)

    if spec.kind == "band_noise":
        # Unit-amplitude, random-phase ordinates on the record's own
        # frequency grid; spectral support is exact by construction.
        m = n // 2 + 1
        f = np.arange(m) / (n * spec.dt)
        fa, fb = spec.band
        sel = (f >= fa) & (f <= fb)
        sel[0] = False  # no DC: records must be zero-mean
        if not np.any(sel):
            raise ValueError("band contains no transform frequencies")
        phases = 2.0 * np.pi * _uniforms(spec.seed, m)
        c = np.zeros(m, dtype=complex)
        c[sel] = np.exp(1j * phases[sel])
        a = np.fft.irfft(c, n)
        peak = np.max(np.abs(a))
        return Accelerogram(dt=spec.dt, samples=a * (spec.amplitudes[0] / peak),
                            label=label)

    # filtered_noise: white noise shaped by a second-order oscillator;
    # the output is the oscillator's absolute acceleration, whose
    # magnitude response peaks near the natural frequency.
    w = _gaussians(spec.seed, n)
    period = 1.0 / spec.natural_freq
    u, v = _sdof_histories(w, spec.dt, period, spec.filter_damping)
    omega = 2.0 * math.pi / period
    a = 2.0 * spec.filter_damping * omega * v + omega * omega * u
    a = a - a.mean()
    peak = np.max(np.abs(a))
    if peak == 0.0:
        raise ValueError("degenerate noise draw")
    return Accelerogram(dt=spec.dt, samples=a * (spec.amplitudes[0] / peak),
                        label=label)
