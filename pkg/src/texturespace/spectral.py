"""Spectrum estimation and measurement utilities for texture verification.

Provides amplitude spectra (raw FFT) for deterministic signals, averaged
periodograms for stochastic textures, peak/bandwidth/centroid measurements,
plus the sweep generator, transfer-function estimator, and turntable
kinematics helpers used when characterizing a display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import chirp, csd, welch


@dataclass(frozen=True)
class Spectrum:
    """Single-sided spectrum with its provenance.

    scale is "amplitude" (raw-FFT amplitude per bin) or "power" (density
    from an averaged periodogram); measurements branch on it so -3 dB means
    the same physical thing either way. n_samples is kept from the source
    signal so energy bookkeeping stays possible after the transform.
    """

    frequencies: np.ndarray
    magnitudes: np.ndarray
    fs: float
    window: str = "rect"
    scale: str = "amplitude"
    n_samples: int = 0

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        mags = np.asarray(self.magnitudes, dtype=float)
        if freqs.shape != mags.shape:
            raise ValueError("frequencies and magnitudes must have equal length")
        if freqs.size == 0:
            raise ValueError("empty spectrum")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if freqs[-1] > self.fs / 2 + 1e-9:
            raise ValueError("frequencies exceed the Nyquist limit")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be nonnegative")
        if self.scale not in ("amplitude", "power"):
            raise ValueError(f"unknown scale {self.scale!r}")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "magnitudes", mags)
        freqs.setflags(write=False)
        mags.setflags(write=False)

    def power_weights(self) -> np.ndarray:
        """Magnitudes converted to power-proportional weights."""
        if self.scale == "power":
            return self.magnitudes
        return self.magnitudes**2


@dataclass(frozen=True)
class SweepSignal:
    samples: np.ndarray
    fs: float
    f_start: float
    f_end: float
    duration: float


@dataclass(frozen=True)
class BodeData:
    """Transfer-function estimate on a frequency grid."""

    frequencies: np.ndarray
    gain_db: np.ndarray
    phase_deg: np.ndarray


def magnitude_spectrum(signal, fs: float) -> Spectrum:
    """Single-sided amplitude spectrum of a real signal (rectangular window).

    Bin k holds the amplitude of the corresponding cosine component, i.e. a
    unit sine shows up as a bin of height ~1. DC and (for even lengths) the
    Nyquist bin are not doubled. Use signal_energy() to recover the exact
    time-domain energy from the result.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < 16:
        raise ValueError(f"signal too short for a spectrum ({x.size} samples)")
    spec = np.abs(np.fft.rfft(x)) / x.size
    spec[1:] *= 2.0
    if x.size % 2 == 0:
        spec[-1] /= 2.0  # Nyquist bin is not mirrored
    freqs = np.fft.rfftfreq(x.size, 1.0 / fs)
    return Spectrum(freqs, spec, fs, window="rect", scale="amplitude", n_samples=x.size)


def signal_energy(spectrum: Spectrum) -> float:
    """Sum |x[n]|^2 reconstructed from an amplitude Spectrum (Parseval)."""
    if spectrum.scale != "amplitude" or spectrum.n_samples <= 0:
        raise ValueError("energy bookkeeping needs a raw amplitude spectrum")
    a = spectrum.magnitudes.copy()
    n = spectrum.n_samples
    half = np.full(a.size, 0.5)
    half[0] = 1.0
    if n % 2 == 0:
        half[-1] = 1.0
    return float(n * np.sum(half * a**2))


def welch_spectrum(
    signal, fs: float, nperseg: int = 2**16, window: str = "hann"
) -> Spectrum:
    """Averaged periodogram (50% overlap) for stochastic signals.

    Returns a power-scaled Spectrum; single realizations of filtered noise
    need the averaging before any peak or width measurement is meaningful.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < 16:
        raise ValueError(f"signal too short for a spectrum ({x.size} samples)")
    nperseg = int(min(nperseg, x.size))
    freqs, psd = welch(x, fs=fs, nperseg=nperseg, noverlap=nperseg // 2, window=window)
    # drop the DC bin: strictly-increasing positive grid, and DC is
    # meaningless for zero-mean textures
    return Spectrum(
        freqs[1:], psd[1:], fs, window=window, scale="power", n_samples=x.size
    )


DEFAULT_CENTROID_BAND = (50.0, 2000.0)


def _band_slice(spectrum: Spectrum, band) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = band
    mask = (spectrum.frequencies >= lo) & (spectrum.frequencies <= hi)
    if not np.any(mask):
        raise ValueError(f"no spectrum bins inside band {band}")
    return spectrum.frequencies[mask], spectrum.magnitudes[mask]


def spectral_centroid(spectrum: Spectrum, band=DEFAULT_CENTROID_BAND) -> float:
    """Magnitude-weighted mean frequency over the analysis band."""
    freqs, mags = _band_slice(spectrum, band)
    total = np.sum(mags)
    if total <= 0:
        raise ValueError("zero spectrum has no centroid")
    return float(np.sum(freqs * mags) / total)


def spectral_peak(spectrum: Spectrum, band=DEFAULT_CENTROID_BAND) -> float:
    """Peak-frequency estimate: power-weighted centroid of the half-power top.

    Plain argmax wanders across the broad flat top of a wide-band texture
    spectrum (single bins fluctuate several dB); averaging the region within
    3 dB of the maximum is stable for both narrow and broad peaks.
    """
    freqs, mags = _band_slice(spectrum, band)
    power = mags if spectrum.scale == "power" else mags**2
    top = power.max()
    if top <= 0:
        raise ValueError("zero spectrum has no peak")
    keep = power >= 0.5 * top
    return float(np.sum(freqs[keep] * power[keep]) / np.sum(power[keep]))


def measured_bandwidth(
    spectrum: Spectrum, smooth_bins: int = 1, band=None
) -> float:
    """-3 dB width around the spectral maximum, interpolated between bins.

    The spectrum is box-smoothed first (smooth_bins=1 disables); crossings
    are found by walking outward from the maximum, linearly interpolating
    the half-power frequency on each side. Assumes a unimodal main lobe.

    Raises:
        ValueError: if there is no peak or a -3 dB crossing is missing
            inside the analysis band.
    """
    if band is None:
        freqs, mags = spectrum.frequencies, spectrum.magnitudes
    else:
        freqs, mags = _band_slice(spectrum, band)
    power = mags if spectrum.scale == "power" else mags**2
    if smooth_bins > 1:
        kernel = np.ones(int(smooth_bins)) / int(smooth_bins)
        power = np.convolve(power, kernel, mode="same")
    top = power.max()
    if top <= 0:
        raise ValueError("no peak above the noise floor")
    half = 0.5 * top
    k = int(np.argmax(power))

    def cross(i_from, step):
        i = i_from
        while 0 <= i + step < len(power):
            if power[i + step] < half <= power[i]:
                f1, f2 = freqs[i], freqs[i + step]
                p1, p2 = power[i], power[i + step]
                return f1 + (f2 - f1) * (p1 - half) / (p1 - p2)
            i += step
        return None

    lo = cross(k, -1)
    hi = cross(k, +1)
    if lo is None or hi is None:
        raise ValueError("-3 dB crossing not found inside the analysis band")
    return float(hi - lo)


def generate_sweep(
    f_start: float, f_end: float, duration: float, fs: float
) -> SweepSignal:
    """Unit-amplitude logarithmic sine sweep from f_start to f_end.

    Logarithmic pacing gives equal dwell per octave, so low and high bands
    are excited equally when the sweep drives a response measurement.
    """
    if not 0 < f_start < f_end:
        raise ValueError("need 0 < f_start < f_end")
    if f_end >= fs / 2:
        raise ValueError(f"f_end {f_end} must be below the Nyquist frequency")
    if duration <= 0:
        raise ValueError("duration must be positive")
    t = np.arange(int(round(duration * fs))) / fs
    samples = chirp(t, f0=f_start, t1=duration, f1=f_end, method="logarithmic")
    return SweepSignal(samples, fs, f_start, f_end, duration)


def estimate_response(
    input_signal,
    output_signal,
    fs: float,
    band=(10.0, 1000.0),
    nperseg: int = 2**12,
) -> BodeData:
    """H1 transfer estimate (cross-spectrum over input auto-spectrum).

    Needs the input to actually carry energy across the band; bins whose
    input power sits at the numerical floor would just amplify noise, so
    their presence is treated as an error.
    """
    x = np.asarray(input_signal, dtype=float)
    y = np.asarray(output_signal, dtype=float)
    if x.shape != y.shape:
        raise ValueError("input and output must have equal length")
    nperseg = int(min(nperseg, x.size))
    freqs, pxx = welch(x, fs=fs, nperseg=nperseg, noverlap=nperseg // 2)
    _, pxy = csd(x, y, fs=fs, nperseg=nperseg, noverlap=nperseg // 2)
    mask = (freqs >= band[0]) & (freqs <= band[1])
    if not np.any(mask):
        raise ValueError(f"no estimate bins inside band {band}")
    pxx_b, pxy_b = pxx[mask], pxy[mask]
    if np.min(pxx_b) < 1e-10 * np.max(pxx):
        raise ValueError("input has insufficient excitation across the band")
    h = pxy_b / pxx_b
    return BodeData(
        frequencies=freqs[mask],
        gain_db=20.0 * np.log10(np.abs(h)),
        phase_deg=np.degrees(np.angle(h)),
    )


def scan_kinematics(rpm: float, radius_mm: float) -> float:
    """Linear scanning velocity (mm/s) at a given turntable radius."""
    if rpm < 0 or radius_mm < 0:
        raise ValueError("rpm and radius must be nonnegative")
    return 2.0 * math.pi * rpm / 60.0 * radius_mm


def wavelength_to_frequency(velocity_mm_s: float, wavelength_mm: float) -> float:
    """Temporal frequency produced by scanning a spatial period at velocity."""
    if velocity_mm_s < 0:
        raise ValueError("velocity must be nonnegative")
    if wavelength_mm <= 0:
        raise ValueError("wavelength must be positive")
    return velocity_mm_s / wavelength_mm
