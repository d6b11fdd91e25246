"""Extraction of the canonical 127-feature vector.

Three extractor groups (35 time, 45 frequency, 47 time-frequency)
produce values in the fixed order defined by :mod:`acoubench.registry`.
Degenerate inputs never poison the output: zero-variance moments,
spectral statistics of silence and empty ratios all collapse to 0, so
every feature is finite for every valid signal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dsp
from .audio import AudioSignal
from .dataset import Dataset, Scaler, fit_scaler
from .errors import ParameterError
from .registry import FEATURE_COUNT, REGISTRY_VERSION, feature_names

_EPS = 1e-12


@dataclass(frozen=True)
class FeatureVector:
    """Ordered 127-value descriptor of one signal."""

    values: np.ndarray
    registry_version: str = REGISTRY_VERSION

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.shape != (FEATURE_COUNT,):
            raise ParameterError(f"feature vector must have {FEATURE_COUNT} values")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("feature vector contains non-finite values")


# ---------------------------------------------------------------------------
# spectral statistic helpers (1-D spectrum or 2-D spectrogram rows)
# ---------------------------------------------------------------------------

def _safe_div(num, den):
    den = np.asarray(den, dtype=float)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def spectral_centroid(power, freqs):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1)
    return _safe_div((power * freqs).sum(axis=-1), total)


def spectral_bandwidth(power, freqs):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1)
    centroid = spectral_centroid(power, freqs)
    dev = (freqs - centroid[..., None]) ** 2
    return np.sqrt(_safe_div((power * dev).sum(axis=-1), total))


def spectral_rolloff(power, freqs, fraction=0.85):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1, keepdims=True)
    cum = np.cumsum(power, axis=-1)
    hit = cum >= fraction * total
    idx = np.argmax(hit, axis=-1)
    out = freqs[idx]
    return np.where(total[..., 0] > 0, out, 0.0)


def spectral_flatness(power):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1)
    floored = np.maximum(power, _EPS)
    geo = np.exp(np.mean(np.log(floored), axis=-1))
    return np.where(total > 0, geo / floored.mean(axis=-1), 0.0)


def spectral_entropy(power):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1, keepdims=True)
    p = _safe_div(power, total)
    plogp = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    ent = -plogp.sum(axis=-1) / np.log(power.shape[-1])
    return np.where(total[..., 0] > 0, ent, 0.0)


def _spectral_shape_moments(power, freqs):
    """Skewness and kurtosis of the power-weighted frequency distribution."""
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1)
    centroid = spectral_centroid(power, freqs)
    dev = freqs - centroid[..., None]
    var = _safe_div((power * dev ** 2).sum(axis=-1), total)
    m3 = _safe_div((power * dev ** 3).sum(axis=-1), total)
    m4 = _safe_div((power * dev ** 4).sum(axis=-1), total)
    sigma = np.sqrt(var)
    skew = _safe_div(m3, sigma ** 3)
    kurt = _safe_div(m4, var ** 2)
    return skew, kurt


def dominant_frequency(power, freqs):
    power = np.asarray(power, dtype=float)
    total = power.sum(axis=-1)
    return np.where(total > 0, freqs[np.argmax(power, axis=-1)], 0.0)


def _octave_band_edges(nyquist_hz: float, n_bands: int = 8) -> np.ndarray:
    return nyquist_hz / (2.0 ** np.arange(n_bands, -1, -1))


def octave_band_energies(power, freqs, n_bands: int = 8):
    """Per-octave-band power along the last axis; highest band ends at Nyquist."""
    edges = _octave_band_edges(freqs[-1], n_bands)
    cuts = np.searchsorted(freqs, edges, side="left")
    cuts[-1] = len(freqs)
    out = [
        np.asarray(power, dtype=float)[..., cuts[b] : cuts[b + 1]].sum(axis=-1)
        for b in range(n_bands)
    ]
    return np.stack(out, axis=-1)


def spectral_contrast(power, freqs, n_bands: int = 8):
    """Mean over octave bands of log10(peak power / valley power)."""
    power = np.asarray(power, dtype=float)
    edges = _octave_band_edges(freqs[-1], n_bands)
    cuts = np.searchsorted(freqs, edges, side="left")
    cuts[-1] = len(freqs)
    contrasts = []
    for b in range(n_bands):
        band = power[..., cuts[b] : cuts[b + 1]]
        if band.shape[-1] == 0:
            continue
        peak = band.max(axis=-1)
        valley = band.min(axis=-1)
        contrasts.append(np.log10((peak + _EPS) / (valley + _EPS)))
    if not contrasts:
        return np.zeros(power.shape[:-1])
    return np.mean(np.stack(contrasts, axis=-1), axis=-1)


def spectral_flux(power_rows):
    """Per-step L2 difference of successive unit-norm magnitude frames."""
    mags = np.sqrt(np.asarray(power_rows, dtype=float))
    norms = np.linalg.norm(mags, axis=1, keepdims=True)
    unit = _safe_div(mags, norms)
    if unit.shape[0] < 2:
        return np.zeros(0)
    return np.linalg.norm(np.diff(unit, axis=0), axis=1)


# ---------------------------------------------------------------------------
# shared per-signal intermediates
# ---------------------------------------------------------------------------

class _SignalContext:
    """Lazily computed spectral intermediates shared across feature groups."""

    def __init__(self, x: AudioSignal):
        self.x = x
        self.window = dsp.default_window_size(x.sample_rate_hz)
        self.hop = self.window // 2
        self._spectrogram = None
        self._full_power = None
        self._full_freqs = None
        self._mfcc_frames = None
        self._dwt = None

    @property
    def spectrogram(self) -> dsp.Spectrogram:
        if self._spectrogram is None:
            if len(self.x.samples) < self.window:
                raise ParameterError(
                    f"signal of {len(self.x.samples)} samples shorter than one "
                    f"{self.window}-sample analysis window"
                )
            self._spectrogram = dsp.stft(self.x, self.window, self.hop)
        return self._spectrogram

    @property
    def full_spectrum(self):
        """One-sided power spectrum of the whole (zero-padded) signal."""
        if self._full_power is None:
            samples = self.x.samples
            nfft = dsp.next_pow2(len(samples))
            padded = np.zeros(nfft)
            padded[: len(samples)] = samples
            spec = dsp.fft(padded, self.x.sample_rate_hz)
            self._full_power = dsp.power_spectrum(spec)
            self._full_freqs = np.arange(nfft // 2 + 1) * spec.bin_hz
        return self._full_power, self._full_freqs

    @property
    def mfcc_frames(self) -> np.ndarray:
        if self._mfcc_frames is None:
            self._mfcc_frames = dsp.mfcc_frames(
                self.x, n_coeffs=13, window_size=self.window, hop=self.hop
            )
        return self._mfcc_frames

    @property
    def dwt(self) -> dsp.WaveletDecomposition:
        if self._dwt is None:
            self._dwt = dsp.dwt_energies(self.x, levels=5)
        return self._dwt


# ---------------------------------------------------------------------------
# time-domain group (35)
# ---------------------------------------------------------------------------

def _standardized_moment(x, mean, std, order):
    if std == 0:
        return 0.0
    return float(np.mean(((x - mean) / std) ** order))


def time_features(x: AudioSignal) -> np.ndarray:
    s = x.samples
    n = len(s)
    sr = x.sample_rate_hz

    mean = float(s.mean())
    std = float(s.std())
    var = std ** 2
    abs_s = np.abs(s)
    rms = float(np.sqrt(np.mean(s ** 2)))
    peak = float(abs_s.max())
    mean_abs = float(abs_s.mean())
    energy = float(np.sum(s ** 2))

    skew = _standardized_moment(s, mean, std, 3)
    kurt = _standardized_moment(s, mean, std, 4)
    m5 = _standardized_moment(s, mean, std, 5)
    m6 = _standardized_moment(s, mean, std, 6)

    crest = peak / rms if rms > 0 else 0.0
    shape = rms / mean_abs if mean_abs > 0 else 0.0
    impulse = peak / mean_abs if mean_abs > 0 else 0.0
    sqrt_mean = float(np.mean(np.sqrt(abs_s))) ** 2
    clearance = peak / sqrt_mean if sqrt_mean > 0 else 0.0

    signs = np.sign(s)
    signs[signs == 0] = 1.0
    zcr = float(np.count_nonzero(signs[1:] != signs[:-1])) / (n - 1) if n > 1 else 0.0
    centered = s - mean
    csigns = np.sign(centered)
    csigns[csigns == 0] = 1.0
    mcr = float(np.count_nonzero(csigns[1:] != csigns[:-1])) / (n - 1) if n > 1 else 0.0

    # amplitude-weighted time distribution
    times = np.arange(n) / sr
    wsum = abs_s.sum()
    if wsum > 0:
        t_centroid = float((times * abs_s).sum() / wsum)
        t_var = float((abs_s * (times - t_centroid) ** 2).sum() / wsum)
        t_spread = float(np.sqrt(t_var))
        if t_spread > 0:
            t_skew = float((abs_s * (times - t_centroid) ** 3).sum() / wsum / t_spread ** 3)
            t_kurt = float((abs_s * (times - t_centroid) ** 4).sum() / wsum / t_var ** 2)
        else:
            t_skew = t_kurt = 0.0
    else:
        t_centroid = t_spread = t_skew = t_kurt = 0.0

    diff = np.diff(s) if n > 1 else np.zeros(1)
    diff_rms = float(np.sqrt(np.mean(diff ** 2)))
    mobility = float(diff.std() / std) if std > 0 else 0.0
    dstd = diff.std()
    if dstd > 0 and mobility > 0 and len(diff) > 1:
        d2 = np.diff(diff)
        complexity = float((d2.std() / dstd) / mobility)
    else:
        complexity = 0.0

    if var > 0 and n > 1:
        lag1 = float(np.sum(centered[:-1] * centered[1:]) / np.sum(centered ** 2))
    else:
        lag1 = 0.0

    env_win = max(1, round(sr * 0.010))
    envelope = np.convolve(abs_s, np.full(env_win, 1.0 / env_win), mode="same")

    q25, q75 = np.percentile(s, [25, 75])
    median = float(np.median(s))

    return np.array(
        [
            mean,
            std,
            var,
            skew,
            kurt,
            rms,
            peak,
            crest,
            shape,
            zcr,
            t_centroid,
            float(s.min()),
            float(s.max()),
            float(s.max() - s.min()),
            mean_abs,
            float(np.median(abs_s)),
            impulse,
            clearance,
            energy,
            float(np.log10(energy + 1e-12)),
            float(q75 - q25),
            float(np.median(np.abs(s - median))),
            t_spread,
            t_skew,
            t_kurt,
            mobility,
            complexity,
            lag1,
            m5,
            m6,
            mcr,
            diff_rms,
            float(envelope.mean()),
            float(envelope.std()),
            float(envelope.max()),
        ]
    )


# ---------------------------------------------------------------------------
# frequency-domain group (45)
# ---------------------------------------------------------------------------

def freq_features(x: AudioSignal, _ctx: _SignalContext | None = None) -> np.ndarray:
    ctx = _ctx or _SignalContext(x)
    power, freqs = ctx.full_spectrum
    total = power.sum()

    skew, kurt = _spectral_shape_moments(power, freqs)
    band_energies = octave_band_energies(power, freqs)
    band_ratios = _safe_div(band_energies, total)

    flux_track = spectral_flux(ctx.spectrogram.power)
    mean_flux = float(flux_track.mean()) if len(flux_track) else 0.0

    mf = ctx.mfcc_frames
    mfcc_means = mf.mean(axis=0)
    mfcc_stds = mf.std(axis=0)

    chroma = dsp.chroma_mean(ctx.spectrogram, x.sample_rate_hz)

    head = np.array(
        [
            float(spectral_centroid(power, freqs)),
            float(spectral_bandwidth(power, freqs)),
            float(spectral_rolloff(power, freqs)),
            mean_flux,
            float(spectral_flatness(power)),
            float(spectral_entropy(power)),
            float(spectral_contrast(power, freqs)),
            float(skew),
            float(kurt),
            float(dominant_frequency(power, freqs)),
        ]
    )
    return np.concatenate([head, band_ratios, mfcc_means, mfcc_stds, [chroma]])


# ---------------------------------------------------------------------------
# time-frequency group (47)
# ---------------------------------------------------------------------------

def _traj_stats(values: np.ndarray) -> list[float]:
    if len(values) == 0:
        return [0.0, 0.0, 0.0]
    return [float(values.mean()), float(values.std()), float(values.max())]


def timefreq_features(x: AudioSignal, _ctx: _SignalContext | None = None) -> np.ndarray:
    if len(x.samples) < 2 ** 5:
        raise ParameterError("signal too short for a 5-level wavelet decomposition")
    ctx = _ctx or _SignalContext(x)
    sgram = ctx.spectrogram
    power = sgram.power
    freqs = sgram.frequencies

    values: list[float] = []
    values += _traj_stats(spectral_centroid(power, freqs))
    values += _traj_stats(spectral_bandwidth(power, freqs))
    values += _traj_stats(spectral_rolloff(power, freqs))
    values += _traj_stats(spectral_flatness(power))
    values += _traj_stats(spectral_flux(power))

    dwt = ctx.dwt
    subbands = dwt.subband_energies
    values += [float(v) for v in subbands]
    shares = _safe_div(subbands, subbands.sum())
    values += [float(v) for v in shares]
    plogp = np.where(shares > 0, shares * np.log(np.where(shares > 0, shares, 1.0)), 0.0)
    values.append(float(-plogp.sum()))

    contrast_track = spectral_contrast(power, freqs)
    values += [float(contrast_track.mean()), float(contrast_track.std())]

    frame_power = power.sum(axis=1)
    values += [float(frame_power.mean()), float(frame_power.std()), float(frame_power.max())]
    values.append(
        _standardized_moment(frame_power, float(frame_power.mean()), float(frame_power.std()), 3)
    )

    mod_freq, mod_strength = _modulation_peak(frame_power, x.sample_rate_hz / ctx.hop)
    values += [mod_freq, mod_strength]

    values += _traj_stats(spectral_entropy(power))

    dom = dominant_frequency(power, freqs)
    values += [float(dom.mean()), float(dom.std())]

    nyq = freqs[-1]
    total = power.sum()
    low = power[:, freqs < nyq / 8].sum()
    mid = power[:, (freqs >= nyq / 8) & (freqs < nyq / 2)].sum()
    high = power[:, freqs >= nyq / 2].sum()
    values += [
        float(_safe_div(low, total)),
        float(_safe_div(mid, total)),
        float(_safe_div(high, total)),
    ]

    mean_cell = power.mean()
    values.append(float(power.max() / mean_cell) if mean_cell > 0 else 0.0)
    values.append(float(spectral_flatness(power.ravel())))
    fp_mean = frame_power.mean()
    values.append(float(frame_power.std() / fp_mean) if fp_mean > 0 else 0.0)

    return np.array(values)


def _modulation_peak(trajectory: np.ndarray, frame_rate_hz: float) -> tuple[float, float]:
    """Dominant modulation frequency and its power share, 0/0 when degenerate."""
    centered = trajectory - trajectory.mean()
    if len(centered) < 4 or np.allclose(centered, 0):
        return 0.0, 0.0
    nfft = dsp.next_pow2(len(centered))
    padded = np.zeros(nfft)
    padded[: len(centered)] = centered
    spec = dsp.fft(padded, frame_rate_hz)
    p = dsp.power_spectrum(spec)[1:]  # skip the (zero) DC bin
    total = p.sum()
    if total == 0:
        return 0.0, 0.0
    k = int(np.argmax(p)) + 1
    return float(k * spec.bin_hz), float(p[k - 1] / total)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def extract_all(x: AudioSignal) -> FeatureVector:
    """Full 127-value vector: time[0..34] + frequency[35..79] + time-frequency[80..126]."""
    ctx = _SignalContext(x)
    values = np.concatenate(
        [time_features(x), freq_features(x, ctx), timefreq_features(x, ctx)]
    )
    return FeatureVector(values=values)


def extract_matrix(signals) -> np.ndarray:
    """Feature matrix [n_signals, 127]; rows follow input order."""
    return np.vstack([extract_all(sig).values for sig in signals])


def extract_dataset(dataset: Dataset) -> Dataset:
    if dataset.signals is None:
        raise ParameterError("dataset retains no signals to extract from")
    return dataset.with_features(
        extract_matrix(dataset.signals), registry_version=REGISTRY_VERSION
    )


def standardize(train: Dataset, apply_to: Dataset) -> tuple[Dataset, Dataset, Scaler]:
    """Z-score both datasets using statistics fitted on `train` only."""
    if train.features is None or len(train) == 0:
        raise ParameterError("training dataset must be non-empty with features")
    scaler = fit_scaler(train.features)
    return (
        train.with_features(scaler.transform(train.features)),
        apply_to.with_features(scaler.transform(apply_to.features)),
        scaler,
    )


def save_feature_csv(path, features: np.ndarray, labels=None) -> None:
    """Feature matrix as CSV with a registry-name header row."""
    features = np.asarray(features, dtype=float)
    header = list(feature_names())
    if labels is not None:
        header.append("label")
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, row in enumerate(features):
            out = [repr(float(v)) for v in row]  # shortest round-trip form
            if labels is not None:
                out.append(int(labels[i]))
            writer.writerow(out)
