"""Pitch-mapped audio rendering, FM modulation, filtering, and file export.

A signal becomes a sequence of fixed-length sine notes whose frequencies are
a linear (optionally logarithmic) map of the sample values into a configured
pitch range.  Oscillator phase is carried across note boundaries and a short
linear fade is applied per note, together standing in for the de-noising of
the rendered sound.  FM rendering shares the same synthesis core, so a zero
modulation index reproduces the plain rendering bit for bit.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter


@dataclass(frozen=True)
class SonifyConfig:
    """Rendering parameters; the defaults are the reference settings."""

    note_duration: float = 0.1
    f_min: float = 261.63
    f_max: float = 1244.51
    audio_rate: int = 44100
    lowpass_cutoff: float = 4000.0
    amplitude_per_voice: float = 0.8
    fade: float = 0.005
    pitch_scale: str = "linear"

    def __post_init__(self):
        if self.note_duration <= 0:
            raise ValueError(f"note_duration must be positive, got {self.note_duration}")
        if not 0 < self.f_min < self.f_max < self.audio_rate / 2:
            raise ValueError(
                f"need 0 < f_min < f_max < audio_rate/2, got "
                f"{self.f_min}, {self.f_max}, rate {self.audio_rate}"
            )
        if not 0 <= self.amplitude_per_voice <= 1:
            raise ValueError(f"amplitude_per_voice must be in [0, 1], got {self.amplitude_per_voice}")
        if self.fade < 0:
            raise ValueError(f"fade must be non-negative, got {self.fade}")
        if self.pitch_scale not in ("linear", "log"):
            raise ValueError(f"pitch_scale must be 'linear' or 'log', got {self.pitch_scale!r}")


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform samples at a fixed rate."""

    samples: np.ndarray
    rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float).reshape(-1))

    @property
    def duration(self) -> float:
        return self.samples.size / self.rate


def pitch_map(value, y_min: float, y_max: float, cfg: SonifyConfig = SonifyConfig()):
    """Map a value from [y_min, y_max] into [f_min, f_max]; out-of-range clamps."""
    if y_min >= y_max:
        raise ValueError(f"degenerate value range [{y_min}, {y_max}]")
    frac = np.clip((np.asarray(value, dtype=float) - y_min) / (y_max - y_min), 0.0, 1.0)
    if cfg.pitch_scale == "log":
        f = cfg.f_min * (cfg.f_max / cfg.f_min) ** frac
    else:
        f = cfg.f_min + frac * (cfg.f_max - cfg.f_min)
    return float(f) if np.ndim(value) == 0 else f


def _note_bounds(n_notes: int, cfg: SonifyConfig) -> np.ndarray:
    # cumulative rounding keeps total length == round(n_notes * dur * rate)
    edges = np.round(np.arange(n_notes + 1) * cfg.note_duration * cfg.audio_rate)
    return edges.astype(int)


def _fade_envelope(m: int, cfg: SonifyConfig) -> np.ndarray:
    env = np.ones(m)
    k = min(int(round(cfg.fade * cfg.audio_rate)), m // 2)
    if k > 0:
        ramp = np.arange(1, k + 1) / k
        env[:k] = ramp
        env[m - k:] = ramp[::-1]
    return env


def _synth(pitches, cfg: SonifyConfig, index_env=None, mod_ratio: float = 1.0) -> AudioBuffer:
    freqs = np.asarray(pitches, dtype=float).reshape(-1)
    if freqs.size == 0:
        raise ValueError("need at least one pitch")
    if np.any(freqs < cfg.f_min - 1e-9) or np.any(freqs > cfg.f_max + 1e-9):
        raise ValueError("pitches must lie within [f_min, f_max]")
    if index_env is not None:
        index_env = np.asarray(index_env, dtype=float).reshape(-1)
        if index_env.size != freqs.size:
            raise ValueError(
                f"{index_env.size} index values for {freqs.size} notes"
            )
        if np.any(index_env < 0):
            raise ValueError("modulation indices must be non-negative")
    edges = _note_bounds(freqs.size, cfg)
    out = np.empty(edges[-1])
    phase_c = 0.0
    phase_m = 0.0
    for j, f in enumerate(freqs):
        m = edges[j + 1] - edges[j]
        i = np.arange(m)
        arg = phase_c + 2.0 * np.pi * f * i / cfg.audio_rate
        if index_env is not None:
            f_mod = mod_ratio * f
            arg = arg + index_env[j] * np.sin(phase_m + 2.0 * np.pi * f_mod * i / cfg.audio_rate)
            phase_m = (phase_m + 2.0 * np.pi * f_mod * m / cfg.audio_rate) % (2.0 * np.pi)
        note = cfg.amplitude_per_voice * np.sin(arg)
        out[edges[j]:edges[j + 1]] = note * _fade_envelope(m, cfg)
        phase_c = (phase_c + 2.0 * np.pi * f * m / cfg.audio_rate) % (2.0 * np.pi)
    return AudioBuffer(samples=out, rate=cfg.audio_rate)


def render_voice(pitches, cfg: SonifyConfig = SonifyConfig()) -> AudioBuffer:
    """Concatenated sine notes, one per pitch, phase-continuous across notes."""
    return _synth(pitches, cfg)


def fm_modulate(carrier_pitches, index_envelope, mod_ratio: float = 1.0,
                cfg: SonifyConfig = SonifyConfig()) -> AudioBuffer:
    """Per-note FM: sin(2*pi*f_c*t + I*sin(2*pi*f_m*t)) with f_m = mod_ratio*f_c.

    ``index_envelope`` provides the modulation index I for each note.  With
    all indices zero the output equals :func:`render_voice` exactly.
    """
    return _synth(carrier_pitches, cfg, index_env=index_envelope, mod_ratio=mod_ratio)


def mix(voices) -> AudioBuffer:
    """Average voices sample-wise; re-normalize to peak 0.9 only if clipping."""
    voices = list(voices)
    if not voices:
        raise ValueError("need at least one voice")
    rates = {v.rate for v in voices}
    if len(rates) > 1:
        raise ValueError(f"voices have mixed rates: {sorted(rates)}")
    length = max(v.samples.size for v in voices)
    total = np.zeros(length)
    for v in voices:
        total[:v.samples.size] += v.samples
    total /= len(voices)
    peak = np.max(np.abs(total)) if length else 0.0
    if peak > 1.0:
        total *= 0.9 / peak
    return AudioBuffer(samples=total, rate=voices[0].rate)


def lowpass(buffer: AudioBuffer, cutoff: float) -> AudioBuffer:
    """Second-order Butterworth low-pass; unity gain at DC."""
    if not 0 < cutoff < buffer.rate / 2:
        raise ValueError(f"cutoff must be in (0, {buffer.rate / 2}), got {cutoff}")
    b, a = butter(2, cutoff, btype="low", fs=buffer.rate)
    return AudioBuffer(samples=lfilter(b, a, buffer.samples), rate=buffer.rate)


def write_wav(buffer: AudioBuffer, path):
    """16-bit PCM mono RIFF/WAVE; samples scaled by 32767, half away from zero."""
    x = np.clip(buffer.samples, -1.0, 1.0) * 32767.0
    q = np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5)).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(buffer.rate)
        fh.writeframes(q.tobytes())


def read_wav(path) -> AudioBuffer:
    """Read back a mono 16-bit WAV into floats in [-1, 1]."""
    with wave.open(str(path), "rb") as fh:
        if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
            raise ValueError("expected mono 16-bit PCM")
        raw = fh.readframes(fh.getnframes())
        rate = fh.getframerate()
    samples = np.frombuffer(raw, dtype="<i2").astype(float) / 32767.0
    return AudioBuffer(samples=samples, rate=rate)


def spectrogram(buffer: AudioBuffer, fft_size: int = 1024, hop: int = 512) -> np.ndarray:
    """Hann-windowed STFT magnitudes, shape (n_frames, fft_size//2 + 1)."""
    if fft_size < 2 or (fft_size & (fft_size - 1)) != 0:
        raise ValueError(f"fft_size must be a power of two >= 2, got {fft_size}")
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    x = buffer.samples
    if x.size < fft_size:
        raise ValueError(f"buffer of {x.size} samples is shorter than one {fft_size}-sample frame")
    n_frames = (x.size - fft_size) // hop + 1
    window = np.hanning(fft_size)
    mags = np.empty((n_frames, fft_size // 2 + 1))
    for k in range(n_frames):
        frame = x[k * hop:k * hop + fft_size] * window
        mags[k] = np.abs(np.fft.rfft(frame))
    return mags


def write_spectrogram_csv(mags: np.ndarray, path):
    """One row per frame, one column per frequency bin."""
    with open(path, "w", newline="") as fh:
        for row in mags:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_spectrogram_pgm(mags: np.ndarray, path, floor_db: float = -80.0):
    """8-bit grayscale PGM (P5), log-magnitude, low frequencies at the bottom."""
    peak = float(mags.max())
    if peak <= 0.0:
        img = np.zeros(mags.shape, dtype=np.uint8)
    else:
        db = 20.0 * np.log10(np.maximum(mags, peak * 10.0 ** (floor_db / 20.0)) / peak)
        img = np.round((db - floor_db) / -floor_db * 255.0).astype(np.uint8)
    # image rows run top-down: transpose to bins x frames, highest bin first
    img = img.T[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
