"""Spectral analysis of activity time series.

The processing chain used throughout: magnitude DFT, drop the zero-frequency
bin, normalize the remaining bins to sum 1, then (optionally) smooth with a
centered moving average.  Frequency is indexed as f = omega/(2*pi) * N, so a
tone cos(omega * t) sampled N times at unit spacing peaks at bin
round(omega * N / (2*pi)).  Squaring a two-tone signal moves energy to the sum
and difference frequencies; time-domain smoothing then suppresses the sum line
and leaves the low-frequency beat dominant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .errors import AllZero, BadCutoff, TooShort, WindowTooLarge


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real signal."""

    values: np.ndarray
    dt: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise TooShort(f"time series needs >= 2 samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series values must be finite")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def times(self):
        return self.origin + self.dt * np.arange(self.values.size)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Spectrum:
    """Magnitude spectrum over integer frequency indices.

    Raw spectra carry bins f = 0 .. floor(N/2); normalized spectra drop the
    zero-frequency bin, so their first entry is f = 1 and the magnitudes sum
    to 1.
    """

    bins: np.ndarray
    n_samples: int
    normalized: bool

    def __post_init__(self):
        b = np.array(self.bins, dtype=float)
        if np.any(b < 0):
            raise ValueError("magnitudes must be nonnegative")
        b.flags.writeable = False
        object.__setattr__(self, "bins", b)

    @property
    def freq_indices(self):
        start = 1 if self.normalized else 0
        return np.arange(start, start + self.bins.size)

    def peak_frequency_index(self):
        """Frequency index of the largest non-DC magnitude."""
        if self.normalized:
            return int(1 + np.argmax(self.bins))
        if self.bins.size < 2:
            return 0
        return int(1 + np.argmax(self.bins[1:]))


def dft_spectrum(s: TimeSeries) -> Spectrum:
    """Raw magnitude spectrum at bins 0 .. floor(N/2)."""
    if len(s) < 4:
        raise TooShort(f"need at least 4 samples, got {len(s)}")
    mag = np.abs(np.fft.rfft(s.values))
    return Spectrum(bins=mag, n_samples=len(s), normalized=False)


def normalize_spectrum(sp: Spectrum) -> Spectrum:
    """Drop the zero-frequency bin and scale the rest to sum 1.

    Idempotent; raises AllZero when no oscillating mode carries any magnitude.
    """
    if sp.normalized:
        return sp
    rest = sp.bins[1:]
    total = rest.sum()
    if total == 0.0:
        raise AllZero("no nonzero oscillating modes")
    return Spectrum(bins=rest / total, n_samples=sp.n_samples, normalized=True)


def _moving_average(values, window):
    # centered; near the edges the half-width shrinks so the window stays
    # symmetric and peaks are not dragged sideways
    n = values.size
    half = window // 2
    out = np.empty(n)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    for i in range(n):
        k = min(half, i, n - 1 - i)
        out[i] = (csum[i + k + 1] - csum[i - k]) / (2 * k + 1)
    return out


def smooth_spectrum(sp: Spectrum, window: int) -> Spectrum:
    """Centered moving average over bins; window 1 is the identity.

    Normalized input is re-normalized to unit mass afterwards.
    """
    if window < 1:
        raise WindowTooLarge(f"window must be >= 1, got {window}")
    if window > sp.bins.size:
        raise WindowTooLarge(f"window {window} exceeds {sp.bins.size} bins")
    if window == 1:
        return sp
    sm = _moving_average(sp.bins, window)
    if sp.normalized:
        total = sm.sum()
        if total > 0:
            sm = sm / total
    return Spectrum(bins=sm, n_samples=sp.n_samples, normalized=sp.normalized)


def square_series(s: TimeSeries) -> TimeSeries:
    return TimeSeries(values=s.values ** 2, dt=s.dt, origin=s.origin)


def smooth_series(s: TimeSeries, window: int) -> TimeSeries:
    """Centered moving average in the time domain, truncated at the edges."""
    if window < 1:
        raise WindowTooLarge(f"window must be >= 1, got {window}")
    if window > len(s):
        raise WindowTooLarge(f"window {window} exceeds length {len(s)}")
    if window == 1:
        return s
    return TimeSeries(values=_moving_average(s.values, window), dt=s.dt,
                      origin=s.origin)


def low_freq_share(sp: Spectrum, cutoff_bin: int) -> float:
    """Fraction of a normalized spectrum's mass at frequency indices
    <= cutoff_bin."""
    if not sp.normalized:
        raise BadCutoff("low_freq_share requires a normalized spectrum")
    max_f = sp.bins.size  # indices run 1 .. size
    if not (1 <= cutoff_bin <= max_f):
        raise BadCutoff(f"cutoff must lie in [1, {max_f}], got {cutoff_bin}")
    return float(sp.bins[:cutoff_bin].sum())


def analyze_period(s: TimeSeries, window: int) -> Spectrum:
    """The full chain: DFT, DC removal + unit normalization, smoothing."""
    return smooth_spectrum(normalize_spectrum(dft_spectrum(s)), window)


@dataclass(frozen=True)
class BeatDemo:
    """Two cosines, their sum, the squared sum, and the smoothed square,
    each with its normalized spectrum.  Panels are keyed "a" .. "e"."""

    signals: dict
    spectra: dict

    PANELS = ("a", "b", "c", "d", "e")

    def peak_bins(self):
        return {k: self.spectra[k].peak_frequency_index() for k in self.PANELS}


def beat_demo(omega1: float, omega2: float, n: int,
              smooth_window: int = 64) -> BeatDemo:
    """Beat-formation demonstration with driving frequencies omega1, omega2.

    ``n`` must be a power of two >= 256; both frequencies must lie in
    (0, pi).  With (0.10, 0.11, 4096) the tone spectra peak at bins 65 and 72,
    the squared sum at 137 and 6..7, and after window-64 smoothing the beat
    line dominates.
    """
    if n < 256 or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two >= 256, got {n}")
    for w in (omega1, omega2):
        if not (0.0 < w < np.pi):
            raise ValueError(f"angular frequency {w} outside (0, pi)")
    t = np.arange(n, dtype=float)
    s1 = TimeSeries(np.cos(omega1 * t))
    s2 = TimeSeries(np.cos(omega2 * t))
    ssum = TimeSeries(s1.values + s2.values)
    ssq = square_series(ssum)
    ssm = smooth_series(ssq, smooth_window)
    signals = {"a": s1, "b": s2, "c": ssum, "d": ssq, "e": ssm}
    spectra = {k: normalize_spectrum(dft_spectrum(v)) for k, v in signals.items()}
    return BeatDemo(signals=signals, spectra=spectra)


def estimate_beat_frequency(values, dt: float = 1.0) -> float:
    """Angular frequency of the dominant amplitude-envelope modulation.

    Takes the analytic-signal envelope, removes its mean, and reads off the
    strongest spectral line with parabolic refinement.  For a two-tone signal
    this recovers |omega_1 - omega_2|.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 8:
        raise TooShort("beat estimation needs at least 8 samples")
    env = np.abs(hilbert(v - v.mean()))
    mag = np.abs(np.fft.rfft(env - env.mean()))
    if mag[1:].max(initial=0.0) == 0.0:
        return 0.0
    k = int(1 + np.argmax(mag[1:]))
    f = float(k)
    if 1 <= k < mag.size - 1 and mag[k - 1] > 0 and mag[k + 1] > 0 and mag[k] > 0:
        a, b, g = np.log(mag[k - 1]), np.log(mag[k]), np.log(mag[k + 1])
        denom = a - 2 * b + g
        if denom < 0:
            f = k + (a - g) / (2 * denom)
    return 2.0 * np.pi * f / (v.size * dt)
