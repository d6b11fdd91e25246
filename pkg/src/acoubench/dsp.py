"""Spectral transforms and mid-level signal representations.

Everything here is a pure function of its inputs: radix-2 FFT, power
spectra, STFT spectrograms, mel filterbank cepstra, Daubechies wavelet
subband energies and chroma folding. Filterbank and twiddle tables are
cached read-only, so the kernels are safe to call from multiple threads.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from ._fftcore import fft_core, is_pow2, next_pow2
from .audio import AudioSignal, frame_signal, hann_window
from .errors import ParameterError

LOG_ENERGY_FLOOR = 1e-10

__all__ = [
    "Spectrum",
    "Spectrogram",
    "WaveletDecomposition",
    "next_pow2",
    "fft",
    "ifft",
    "power_spectrum",
    "stft",
    "mel_filterbank",
    "mfcc_frames",
    "mfcc",
    "default_window_size",
    "dwt_energies",
    "chroma_vector",
    "chroma_mean",
]


# ---------------------------------------------------------------------------
# FFT
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins of a single frame or signal.

    ``bin_hz`` is the frequency step between adjacent bins,
    ``sample_rate / size``.
    """

    bins: np.ndarray
    bin_hz: float
    size: int

    def __post_init__(self):
        if self.bins.shape != (self.size,):
            raise ParameterError("spectrum bins must have exactly `size` entries")


def fft(x: np.ndarray, sample_rate_hz: float = 1.0) -> Spectrum:
    """DFT of a real (or complex) sequence whose length is a power of two.

    Callers zero-pad to a power of two themselves; a non-power-of-two
    length is an error, not an implicit pad.
    """
    x = np.asarray(x)
    if x.ndim != 1:
        raise ParameterError("fft expects a 1-D sequence")
    n = len(x)
    if not is_pow2(n):
        raise ParameterError(f"FFT length must be a power of two, got {n}")
    bins = fft_core(x)
    return Spectrum(bins=bins, bin_hz=sample_rate_hz / n, size=n)


def ifft(spectrum: Spectrum) -> np.ndarray:
    """Inverse DFT; returns the complex time sequence."""
    return fft_core(spectrum.bins, inverse=True)


def power_spectrum(spectrum: Spectrum) -> np.ndarray:
    """One-sided power spectrum P[k] = |X[k]|^2, k = 0..size/2."""
    half = spectrum.size // 2 + 1
    return np.abs(spectrum.bins[:half]) ** 2


# ---------------------------------------------------------------------------
# STFT
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrogram:
    """One-sided power spectrogram, rows = frames."""

    power: np.ndarray
    frame_times_s: np.ndarray
    bin_hz: float

    def __post_init__(self):
        if self.power.ndim != 2:
            raise ParameterError("spectrogram power must be a 2-D matrix")
        if np.any(self.power < 0):
            raise ParameterError("spectrogram power must be non-negative")

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.power.shape[1]) * self.bin_hz


def stft(x: AudioSignal, window_size: int, hop: int) -> Spectrogram:
    """Hann-windowed short-time power spectrogram.

    Frames are zero-padded to the next power of two before the FFT, so
    any window size is accepted.
    """
    frames = frame_signal(x, window_size, hop).frames
    nfft = next_pow2(window_size)
    windowed = frames * hann_window(window_size)
    if nfft > window_size:
        pad = np.zeros((frames.shape[0], nfft - window_size))
        windowed = np.hstack([windowed, pad])
    spec = fft_core(windowed)
    half = nfft // 2 + 1
    power = np.abs(spec[:, :half]) ** 2
    starts = np.arange(frames.shape[0]) * hop
    times = (starts + window_size / 2.0) / x.sample_rate_hz
    return Spectrogram(power=power, frame_times_s=times, bin_hz=x.sample_rate_hz / nfft)


# ---------------------------------------------------------------------------
# Mel filterbank / MFCC
# ---------------------------------------------------------------------------

def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


@functools.lru_cache(maxsize=32)
def mel_filterbank(n_filters: int, nfft: int, sample_rate_hz: float) -> np.ndarray:
    """Triangular mel filterbank matrix of shape [n_filters, nfft//2 + 1].

    Filters span 0 Hz to Nyquist with unit-height triangles.
    """
    nyquist = sample_rate_hz / 2.0
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), n_filters + 2)
    hz_points = mel_to_hz(mel_points)
    freqs = np.arange(nfft // 2 + 1) * sample_rate_hz / nfft
    bank = np.zeros((n_filters, len(freqs)))
    for i in range(n_filters):
        left, center, right = hz_points[i], hz_points[i + 1], hz_points[i + 2]
        rising = (freqs - left) / max(center - left, 1e-12)
        falling = (right - freqs) / max(right - center, 1e-12)
        bank[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    bank.flags.writeable = False
    return bank


@functools.lru_cache(maxsize=32)
def _dct_ii_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Orthonormal DCT-II matrix taking n_in log-energies to n_out coefficients."""
    k = np.arange(n_out)[:, None]
    n = np.arange(n_in)[None, :]
    mat = np.cos(np.pi * k * (2 * n + 1) / (2.0 * n_in))
    mat *= np.sqrt(2.0 / n_in)
    mat[0] *= np.sqrt(0.5)
    mat.flags.writeable = False
    return mat


def mfcc_frames(
    x: AudioSignal,
    n_coeffs: int = 13,
    n_filters: int = 26,
    window_size: int | None = None,
    hop: int | None = None,
) -> np.ndarray:
    """Per-frame mel-frequency cepstral coefficients, shape [frames, n_coeffs].

    Pipeline per frame: one-sided power spectrum -> triangular mel
    filterbank (0 Hz to Nyquist) -> log with a floor of 1e-10 ->
    orthonormal DCT-II -> first ``n_coeffs`` coefficients.
    """
    if window_size is None:
        window_size = default_window_size(x.sample_rate_hz)
    if hop is None:
        hop = window_size // 2
    if len(x.samples) < window_size:
        raise ParameterError(
            f"signal too short for MFCC: {len(x.samples)} samples < window {window_size}"
        )
    if n_coeffs < 1 or n_coeffs > n_filters:
        raise ParameterError("n_coeffs must be in 1..n_filters")
    spec = stft(x, window_size, hop)
    nfft = round(x.sample_rate_hz / spec.bin_hz)
    bank = mel_filterbank(n_filters, nfft, x.sample_rate_hz)
    energies = spec.power @ bank.T
    log_energies = np.log(np.maximum(energies, LOG_ENERGY_FLOOR))
    return log_energies @ _dct_ii_matrix(n_coeffs, n_filters).T


def mfcc(x: AudioSignal, n_coeffs: int = 13, **kwargs) -> np.ndarray:
    """Per-frame mean of the first ``n_coeffs`` MFCCs."""
    return mfcc_frames(x, n_coeffs=n_coeffs, **kwargs).mean(axis=0)


def default_window_size(sample_rate_hz: float) -> int:
    """Analysis window used by STFT-based features: ~32 ms, power of two."""
    return next_pow2(max(2, round(sample_rate_hz * 0.032)))


# ---------------------------------------------------------------------------
# Discrete wavelet decomposition (Daubechies db4)
# ---------------------------------------------------------------------------

# db4 scaling (low-pass) decomposition filter, 8 taps, 4 vanishing moments.
_DB4_LO = np.array(
    [
        -0.010597401784997278,
        0.032883011666982945,
        0.030841381835986965,
        -0.18703481171888114,
        -0.02798376941698385,
        0.6308807679295904,
        0.7148465705525415,
        0.23037781330885523,
    ]
)
# Quadrature mirror high-pass: g[k] = (-1)^k h[L-1-k].
_DB4_HI = _DB4_LO[::-1].copy()
_DB4_HI[1::2] *= -1.0


@dataclass(frozen=True)
class WaveletDecomposition:
    """Subband energies of a multilevel discrete wavelet decomposition.

    ``detail_energies[i]`` is the level-(i+1) detail band energy D1..Dn;
    the transform is orthonormal with periodic extension, so detail plus
    approximation energies reproduce the total signal energy.
    """

    detail_energies: tuple
    approx_energy: float
    total_energy: float

    @property
    def subband_energies(self) -> np.ndarray:
        """D1..Dn followed by the final approximation energy."""
        return np.array(list(self.detail_energies) + [self.approx_energy])


def _dwt_step(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One periodized analysis step; returns (approximation, detail)."""
    if len(x) % 2 == 1:
        x = np.append(x, 0.0)  # zero sample keeps the transform orthonormal
    n = len(x)
    taps = len(_DB4_LO)
    idx = (np.arange(0, n, 2)[:, None] + np.arange(taps)[None, :]) % n
    windows = x[idx]
    return windows @ _DB4_LO, windows @ _DB4_HI


def dwt_energies(x: AudioSignal, levels: int = 5) -> WaveletDecomposition:
    """Daubechies-4 subband energies over ``levels`` decomposition levels."""
    samples = x.samples
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    if len(samples) < 2 ** levels:
        raise ParameterError(
            f"signal of {len(samples)} samples too short for {levels} levels"
        )
    total = float(np.sum(samples ** 2))
    details = []
    approx = samples
    for _ in range(levels):
        approx, detail = _dwt_step(approx)
        details.append(float(np.sum(detail ** 2)))
    return WaveletDecomposition(
        detail_energies=tuple(details),
        approx_energy=float(np.sum(approx ** 2)),
        total_energy=total,
    )


# ---------------------------------------------------------------------------
# Chroma
# ---------------------------------------------------------------------------

def chroma_vector(spec: Spectrogram, sample_rate_hz: float) -> np.ndarray:
    """12-bin pitch-class power profile averaged over frames (A = class 9).

    Bin powers fold onto the chromatic scale with A4 = 440 Hz as the
    reference; the DC bin carries no pitch and is skipped.
    """
    if spec.power.shape[0] == 0:
        raise ParameterError("empty spectrogram")
    freqs = spec.frequencies
    valid = freqs > 0
    midi = 69.0 + 12.0 * np.log2(freqs[valid] / 440.0)
    classes = np.round(midi).astype(int) % 12
    folded = np.zeros((spec.power.shape[0], 12))
    for pc in range(12):
        cols = np.where(valid)[0][classes == pc]
        if len(cols):
            folded[:, pc] = spec.power[:, cols].sum(axis=1)
    return folded.mean(axis=0)


def chroma_mean(spec: Spectrogram, sample_rate_hz: float) -> float:
    """Mean of the 12 frame-averaged chroma values."""
    return float(chroma_vector(spec, sample_rate_hz).mean())
