"""Ingestion and reduction of multi-channel time series.

Covers CSV input/output, the sonification downsampling, the 9-segment
averaging used to build Ising schedules, the two schedule renormalizations,
and a seeded synthetic seizure generator so the package is usable without any
clinical recording.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import ParseError

ELECTRODE_GROUPS = ("TT", "AST", "MST", "PST")


@dataclass(frozen=True)
class ChannelSet:
    """Named multi-channel series sharing one sample rate; data is channels x samples."""

    names: list
    sample_rate: float
    data: np.ndarray

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if len(self.names) != data.shape[0]:
            raise ValueError(f"{len(self.names)} names for {data.shape[0]} channels")
        if len(set(self.names)) != len(self.names):
            raise ValueError("channel names must be unique")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "names", list(self.names))
        object.__setattr__(self, "data", data)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.data[self.names.index(name)]
        except ValueError:
            raise KeyError(f"no channel named {name!r}; have {self.names}") from None


def load_csv(path, sample_rate: float | None = None) -> ChannelSet:
    """Parse a channels-as-columns CSV with optional ``# sample_rate=<Hz>`` line.

    An explicit ``sample_rate`` argument wins over the sidecar line; with
    neither, the rate defaults to 1.0.  Malformed rows raise
    :class:`ParseError` naming the 1-based file line and column.
    """
    sidecar_rate = None
    header = None
    rows = []
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                meta = line.lstrip("#").strip()
                if "=" in meta:
                    key, _, value = meta.partition("=")
                    if key.strip() == "sample_rate":
                        try:
                            sidecar_rate = float(value)
                        except ValueError:
                            raise ParseError(f"bad sample_rate value {value!r}", row=lineno)
                continue
            cells = [c.strip() for c in line.split(",")]
            if header is None:
                header = cells
                if len(set(header)) != len(header):
                    raise ParseError("duplicate channel names in header", row=lineno)
                continue
            if len(cells) != len(header):
                raise ParseError(
                    f"expected {len(header)} cells, found {len(cells)}", row=lineno
                )
            parsed = []
            for col, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(f"non-numeric cell {cell!r}", row=lineno, column=col)
            rows.append(parsed)
    if header is None:
        raise ParseError("file has no header row")
    if not rows:
        raise ParseError("file has no data rows")
    rate = sample_rate if sample_rate is not None else (sidecar_rate or 1.0)
    return ChannelSet(names=header, sample_rate=rate, data=np.asarray(rows).T)


def write_channels_csv(channels: ChannelSet, path):
    """Inverse of :func:`load_csv`: sidecar rate line, header, one row per sample."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# sample_rate={channels.sample_rate!r}\n")
        fh.write(",".join(channels.names) + "\n")
        for row in channels.data.T:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def downsample(series, factor: int):
    """Keep samples at indices 0, factor, 2*factor, ..."""
    if factor < 1:
        raise ValueError(f"downsample factor must be >= 1, got {factor}")
    return np.asarray(series)[::factor]


def segment_average(series, n_segments: int) -> np.ndarray:
    """Mean over contiguous spans; the first ``len % n`` spans are one sample longer."""
    x = np.asarray(series, dtype=float).reshape(-1)
    if n_segments < 1:
        raise ValueError(f"n_segments must be >= 1, got {n_segments}")
    if x.size < n_segments:
        raise ValueError(f"series of length {x.size} cannot fill {n_segments} segments")
    base, rem = divmod(x.size, n_segments)
    out = np.empty(n_segments)
    pos = 0
    for i in range(n_segments):
        span = base + (1 if i < rem else 0)
        out[i] = x[pos:pos + span].mean()
        pos += span
    return out


def renormalize_couplings(reduced, n_reference: int | None = None) -> np.ndarray:
    """Scale each channel by its max-abs over the pre-seizure reference span.

    ``reduced`` holds one length-k series per channel.  The reference span
    defaults to the first third of the segments (3 of 9), so baseline segments
    land in [-1, 1] while seizure segments may exceed it.  A channel whose
    reference span is all zero is left unscaled, with a warning.

    Returns the k x n_channels coupling schedule (channel n becomes column n).
    """
    series = np.atleast_2d(np.asarray(reduced, dtype=float))
    n_channels, k = series.shape
    if n_reference is None:
        n_reference = max(1, k // 3)
    if not 1 <= n_reference <= k:
        raise ValueError(f"n_reference must be in [1, {k}], got {n_reference}")
    scaled = np.empty_like(series)
    for c in range(n_channels):
        scale = np.max(np.abs(series[c, :n_reference]))
        if scale == 0.0:
            warnings.warn(
                f"channel {c} has an all-zero reference span; leaving it unscaled",
                stacklevel=2,
            )
            scale = 1.0
        scaled[c] = series[c] / scale
    return scaled.T


def renormalize_field(reduced, transition_step: int) -> np.ndarray:
    """Divide the series by its value at ``transition_step`` (0-based).

    The output is exactly 1.0 at the transition step, placing the engineered
    phase crossing there.
    """
    x = np.asarray(reduced, dtype=float).reshape(-1)
    if not 0 <= transition_step < x.size:
        raise ValueError(f"transition_step {transition_step} outside [0, {x.size - 1}]")
    pivot = x[transition_step]
    if pivot == 0.0 or not np.isfinite(pivot):
        raise ValueError(f"series value at transition step is {pivot}; cannot renormalize")
    return x / pivot


def default_channel_names(n_channels: int) -> list:
    """Electrode-style names (TT1..PST4) for 16 channels, generic CHxx otherwise."""
    if n_channels == 16:
        return [f"{grp}{i}" for grp in ELECTRODE_GROUPS for i in range(1, 5)]
    return [f"CH{i:02d}" for i in range(n_channels)]


def _colored_noise(rng, n, rho=0.98):
    x = lfilter([1.0], [1.0, -rho], rng.standard_normal(n))
    return x / max(np.std(x), 1e-12)


def synth_seizure(n_channels: int = 16, duration: float = 210.0,
                  sample_rate: float = 1000.0, onset: float = 70.0,
                  offset: float = 185.0, seed: int = 0) -> ChannelSet:
    """Deterministic seizure-like test signal.

    Pre-onset each channel carries low-amplitude colored background activity:
    pink-ish noise, a slow drift, and a small periodic slow-wave with a sharp
    recovery and slow decay (the asymmetry keeps the pre-seizure window
    moments well below the ictal ones).
    Between onset and offset, large oscillatory bursts with channel-staggered
    onsets and a per-channel ictal baseline shift dominate; after offset an
    elevated-variance noise tail remains.
    """
    if not 0 < onset < offset < duration:
        raise ValueError(
            f"need 0 < onset < offset < duration, got onset={onset}, "
            f"offset={offset}, duration={duration}"
        )
    if n_channels < 1:
        raise ValueError("need at least one channel")
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate

    noise_amp = 1.0
    saw_amp = 80.0
    drift_amp = 15.0
    burst_amp = 180.0
    tail_amp = 25.0
    rise_frac = 0.08  # fraction of the slow-wave period spent on the sharp recovery

    data = np.empty((n_channels, n))
    for c in range(n_channels):
        noise = noise_amp * _colored_noise(rng, n)

        # electrode bias keeps baseline segment means away from zero, so the
        # coupling renormalization stays well conditioned
        bias = rng.choice([-1.0, 1.0]) * rng.uniform(8.0, 18.0)
        drift = bias + drift_amp * _colored_noise(rng, n, rho=0.9995)

        period = rng.uniform(0.18, 0.26)
        phase = (t / period + rng.uniform(0.0, 1.0)) % 1.0
        slow_wave = saw_amp * (
            np.where(phase < rise_frac, phase / rise_frac, 1.0 - (phase - rise_frac) / (1.0 - rise_frac))
            - 0.5
        )

        burst_on = onset + rng.uniform(0.0, 3.0)
        env = np.clip((t - burst_on) / 2.5, 0.0, 1.0) * np.clip(1.0 - (t - offset) / 2.0, 0.0, 1.0)
        freq = rng.uniform(4.0, 9.0)
        dc_shift = rng.choice([-1.0, 1.0]) * rng.uniform(40.0, 80.0)
        burst = env * (burst_amp * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
                       + dc_shift)

        tail = tail_amp * _colored_noise(rng, n) * (t > offset)

        data[c] = noise + drift + slow_wave + burst + tail

    return ChannelSet(names=default_channel_names(n_channels),
                      sample_rate=sample_rate, data=data)
