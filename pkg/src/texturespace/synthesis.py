"""Friction texture synthesis from (frequency, amplitude, irregularity).

A texture is built by bandpass-filtering seeded white noise with a resonant
biquad whose Q-factor is the inverse of the irregularity value, flattening
the result by dividing out its analytic (Hilbert) envelope, and scaling to
the requested amplitude. The result is a normalized friction command in
[-1, 1] that can be mapped onto a display drive-current range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert, lfilter

# Canonical parameter grid: three logarithmically spaced values per knob.
CENTER_FREQUENCIES_HZ = (150.0, 260.0, 450.0)
AMPLITUDES = (0.30, 0.55, 1.0)
IRREGULARITIES = (0.067, 0.34, 1.67)

DEFAULT_FS_HZ = 100_000.0
DEFAULT_DURATION_S = 2.0

# Drive-current mapping: unit amplitude spans 1..5 mA around a 3 mA center
# so average friction stays constant across textures.
CURRENT_CENTER_MA = 3.0
CURRENT_SPAN_MA = 2.0

# Rendering pads: extra signal synthesized and trimmed from each end so the
# FFT-based envelope's wrap-around artifacts and the filter start-up
# transient never reach the output.
EDGE_PAD_S = 0.25
# Tail folded into the head with a linear ramp so exports loop without a
# click under continuous playback.
LOOP_CROSSFADE_S = 0.05

# Envelope division guard, relative to the peak envelope value.
ENVELOPE_EPS_REL = 1e-6

# Filter/divide alternations per render; see synthesize_texture.
FLATTEN_PASSES = 8


@dataclass(frozen=True)
class TextureParams:
    """The engineering triple defining one texture.

    f0_hz: center frequency of the bandpass, Hz.
    amplitude: normalized peak friction command, in (0, 1].
    irregularity: spectral width knob; the filter Q is 1/irregularity.
    """

    f0_hz: float
    amplitude: float
    irregularity: float

    def __post_init__(self):
        if self.f0_hz <= 0:
            raise ValueError(f"f0_hz must be positive, got {self.f0_hz}")
        if not 0 < self.amplitude <= 1:
            raise ValueError(f"amplitude must be in (0, 1], got {self.amplitude}")
        if self.irregularity <= 0:
            raise ValueError(
                f"irregularity must be positive, got {self.irregularity}"
            )

    @property
    def q_factor(self) -> float:
        return 1.0 / self.irregularity


@dataclass(frozen=True)
class BiquadCoefficients:
    """Second-order bandpass section, unnormalized (a0 kept explicit).

    The feedforward path is antisymmetric (b1 = 0, b2 = -b0), which pins the
    magnitude peak exactly at omega0 with unit gain.
    """

    b0: float
    b1: float
    b2: float
    a0: float
    a1: float
    a2: float
    q_factor: float
    omega0: float  # rad/sample
    fs: float

    def response(self, freqs_hz: np.ndarray) -> np.ndarray:
        """Closed-form complex frequency response H(e^jw) at the given Hz."""
        w = 2.0 * np.pi * np.asarray(freqs_hz, dtype=float) / self.fs
        z1 = np.exp(-1j * w)
        z2 = z1 * z1
        num = self.b0 + self.b1 * z1 + self.b2 * z2
        den = self.a0 + self.a1 * z1 + self.a2 * z2
        return num / den


@dataclass(frozen=True)
class TextureSignal:
    """A rendered texture: normalized friction samples plus provenance."""

    samples: np.ndarray
    fs: float
    params: TextureParams
    seed: int
    duration: float

    def __post_init__(self):
        self.samples.flags.writeable = False

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class CurrentSignal:
    """Drive-current envelope in mA."""

    samples: np.ndarray
    fs: float
    center_ma: float = CURRENT_CENTER_MA
    span_ma: float = CURRENT_SPAN_MA

    def __post_init__(self):
        self.samples.flags.writeable = False


@dataclass(frozen=True)
class TextureSet:
    """Ordered texture catalog plus the shared synthesis configuration."""

    entries: tuple  # of (texture_id, TextureParams)
    fs: float = DEFAULT_FS_HZ
    duration: float = DEFAULT_DURATION_S
    base_seed: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def params_for(self, texture_id: int) -> TextureParams:
        for tid, params in self.entries:
            if tid == texture_id:
                return params
        raise KeyError(f"no texture with id {texture_id}")

    def seed_for(self, texture_id: int) -> int:
        return self.base_seed + texture_id

    def texture_ids(self) -> list:
        return [tid for tid, _ in self.entries]


def design_bandpass(f0_hz: float, irregularity: float, fs: float) -> BiquadCoefficients:
    """Design the resonant bandpass for a given center frequency and width.

    With Q = 1/irregularity and w0 = 2*pi*f0/fs the section is

        b0 = sin(w0)/(2Q),  b1 = 0,  b2 = -b0
        a0 = 1 + sin(w0)/(2Q),  a1 = -2cos(w0),  a2 = 1 - sin(w0)/(2Q)

    which has |H| = 1 exactly at w0 and a -3 dB width of ~f0/Q.

    Raises:
        ValueError: if f0 is outside (0, fs/2) or irregularity <= 0.
    """
    if not 0 < f0_hz < fs / 2:
        raise ValueError(f"f0_hz must be in (0, fs/2) = (0, {fs / 2}), got {f0_hz}")
    if irregularity <= 0:
        raise ValueError(f"irregularity must be positive, got {irregularity}")
    q = 1.0 / irregularity
    w0 = 2.0 * math.pi * f0_hz / fs
    alpha = math.sin(w0) / (2.0 * q)
    return BiquadCoefficients(
        b0=alpha,
        b1=0.0,
        b2=-alpha,
        a0=1.0 + alpha,
        a1=-2.0 * math.cos(w0),
        a2=1.0 - alpha,
        q_factor=q,
        omega0=w0,
        fs=fs,
    )


def white_noise(n_samples: int, seed: int) -> np.ndarray:
    """Zero-mean unit-variance Gaussian noise from a counter-based generator.

    Philox is used so the same (n_samples, seed) pair reproduces the same
    sequence on any platform.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.standard_normal(n_samples)


def filter_apply(coeffs: BiquadCoefficients, signal: np.ndarray) -> np.ndarray:
    """Run the biquad difference equation over the signal, zero initial state.

    y[n] = (b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]) / a0
    """
    signal = np.asarray(signal, dtype=float)
    if signal.size == 0:
        raise ValueError("input signal is empty")
    b = np.array([coeffs.b0, coeffs.b1, coeffs.b2])
    a = np.array([coeffs.a0, coeffs.a1, coeffs.a2])
    return lfilter(b, a, signal)


def analytic_envelope(signal: np.ndarray) -> np.ndarray:
    """Magnitude of the analytic signal (signal + j * Hilbert transform).

    The FFT-based transform wraps around, so the first and last few cycles
    carry edge artifacts; callers that care should evaluate the interior.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.size < 4:
        raise ValueError(f"signal too short for envelope ({signal.size} samples)")
    return np.abs(hilbert(signal))


def envelope_normalize(signal: np.ndarray) -> np.ndarray:
    """Divide a signal by its analytic envelope, flattening amplitude to ~1.

    Low-frequency envelope fluctuations of narrowband noise otherwise
    dominate perception and swamp any gain term. Division is guarded at
    deep envelope nulls; because |signal| <= envelope pointwise, the output
    magnitude never exceeds 1.

    Raises:
        ValueError: for an all-zero signal, which has no envelope to divide by.
    """
    env = analytic_envelope(signal)
    peak = env.max()
    if peak == 0.0:
        raise ValueError("cannot envelope-normalize an all-zero signal")
    return np.asarray(signal, dtype=float) / np.maximum(env, ENVELOPE_EPS_REL * peak)


def _loop_crossfade(signal: np.ndarray, n_fade: int) -> np.ndarray:
    """Fold the final n_fade samples into the head with a linear ramp.

    Output is n_fade samples shorter and plays seamlessly when looped: the
    first output sample is the rendered continuation of the last one.
    """
    if n_fade <= 0:
        return signal
    if len(signal) <= 2 * n_fade:
        raise ValueError("signal too short to crossfade")
    body = signal[: len(signal) - n_fade].copy()
    tail = signal[len(signal) - n_fade :]
    w = np.arange(n_fade) / n_fade
    body[:n_fade] = (1.0 - w) * tail + w * body[:n_fade]
    return body


def synthesize_texture(
    params: TextureParams,
    duration: float = DEFAULT_DURATION_S,
    fs: float = DEFAULT_FS_HZ,
    seed: int = 0,
    flatten_passes: int = FLATTEN_PASSES,
) -> TextureSignal:
    """Render one texture: noise -> bandpass -> envelope flatten -> scale.

    A single envelope division leaves the quotient's own envelope rippling
    by tens of percent: dividing out the amplitude turns it into phase
    wobble, which leaks back into the measured envelope. Alternating
    band-pass filtering with envelope division converges on a signal that
    is simultaneously band-shaped and amplitude-flat; eight rounds put
    >98% of interior envelope samples within [0.9, 1.1] for every texture
    in the catalog while keeping the spectral peak at f0.

    Extra signal is synthesized and trimmed from both ends so the output is
    statistically stationary (no filter warm-up, no envelope edge artifacts),
    and the rendered tail is crossfaded into the head so the exact
    round(duration * fs) samples returned loop without a click. Any residual
    float overshoot is clipped at +/- amplitude.
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    if params.f0_hz >= fs / 2:
        raise ValueError(
            f"f0_hz {params.f0_hz} is not below the Nyquist frequency {fs / 2}"
        )
    if flatten_passes < 1:
        raise ValueError("flatten_passes must be >= 1")
    n_out = int(round(duration * fs))
    n_pad = int(round(EDGE_PAD_S * fs))
    n_fade = int(round(LOOP_CROSSFADE_S * fs))

    coeffs = design_bandpass(params.f0_hz, params.irregularity, fs)
    noise = white_noise(n_out + 2 * n_pad + n_fade, seed)
    flattened = envelope_normalize(filter_apply(coeffs, noise))
    for _ in range(flatten_passes - 1):
        flattened = envelope_normalize(filter_apply(coeffs, flattened))
    trimmed = flattened[n_pad : n_pad + n_out + n_fade]
    looped = _loop_crossfade(trimmed, n_fade)
    samples = np.clip(params.amplitude * looped, -params.amplitude, params.amplitude)
    return TextureSignal(
        samples=samples, fs=fs, params=params, seed=seed, duration=duration
    )


def build_texture_set(
    fs: float = DEFAULT_FS_HZ,
    duration: float = DEFAULT_DURATION_S,
    base_seed: int = 0,
) -> TextureSet:
    """Construct the canonical 24-texture catalog.

    Full 3x3x3 grid of (f0, amplitude, irregularity) values minus the three
    highest-frequency lowest-amplitude combinations, which are too weak to
    feel. Entries are ordered by (f0, irregularity, amplitude) ascending and
    renumbered 1..24, so each consecutive id triple shares a filter and
    steps through amplitudes; the final six ids are the 450 Hz textures with
    the lowest amplitude missing. Per-texture noise seeds are
    base_seed + texture_id.
    """
    entries = []
    texture_id = 1
    f_max = max(CENTER_FREQUENCIES_HZ)
    a_min = min(AMPLITUDES)
    for f0 in CENTER_FREQUENCIES_HZ:
        for irregularity in IRREGULARITIES:
            for amplitude in AMPLITUDES:
                if f0 == f_max and amplitude == a_min:
                    continue
                entries.append(
                    (texture_id, TextureParams(f0, amplitude, irregularity))
                )
                texture_id += 1
    return TextureSet(
        entries=tuple(entries), fs=fs, duration=duration, base_seed=base_seed
    )


def render_set(texture_set: TextureSet) -> list:
    """Synthesize every texture in the set with its derived seed."""
    return [
        synthesize_texture(
            params,
            duration=texture_set.duration,
            fs=texture_set.fs,
            seed=texture_set.seed_for(tid),
        )
        for tid, params in texture_set.entries
    ]


def to_current(
    signal: TextureSignal,
    center_ma: float = CURRENT_CENTER_MA,
    span_ma: float = CURRENT_SPAN_MA,
) -> CurrentSignal:
    """Map a normalized texture onto the display drive-current range.

    current[n] = center + span * samples[n]; with the defaults a
    unit-amplitude texture spans 1..5 mA. The center is shared by all
    textures so average friction stays consistent.
    """
    if span_ma <= 0:
        raise ValueError(f"span_ma must be positive, got {span_ma}")
    if center_ma - span_ma < 0:
        raise ValueError(
            f"current range would go negative: center {center_ma} - span {span_ma}"
        )
    return CurrentSignal(
        samples=center_ma + span_ma * signal.samples,
        fs=signal.fs,
        center_ma=center_ma,
        span_ma=span_ma,
    )


def pink_noise(n_samples: int, seed: int, peak: float = 0.9) -> np.ndarray:
    """Seeded 1/f noise for audio masking, peak-normalized.

    White noise is shaped in the frequency domain by 1/sqrt(f) so power
    falls 3 dB per octave.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    white = white_noise(n_samples, seed)
    spectrum = np.fft.rfft(white)
    f = np.fft.rfftfreq(n_samples)
    weights = np.zeros_like(f)
    weights[1:] = 1.0 / np.sqrt(f[1:])
    shaped = np.fft.irfft(spectrum * weights, n=n_samples)
    return peak * shaped / np.max(np.abs(shaped))
