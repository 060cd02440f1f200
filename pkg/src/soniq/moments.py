"""Rolling statistical moments of amplitude-encoded signal windows.

Each window of the signal is loaded into the probability amplitudes of a
small quantum register (QPAM encoding) and the expectation value of the
diagonal index-moment observable ``sum_i i^p |i><i|`` is read out.  Because
the encoding normalizes every window, the result depends only on how energy
is distributed across the window, never on its scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateWindowError
from .statevector import DiagonalObservable, Statevector, expectation_diagonal, from_amplitudes

SHIFT_MODES = ("min-shift", "none")


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window parameters: power-of-two length, hop stride, moment order."""

    window_len: int = 16
    hop: int = 10
    moment_order: int = 4

    def __post_init__(self):
        if self.window_len < 2 or (self.window_len & (self.window_len - 1)) != 0:
            raise ValueError(f"window_len must be a power of two >= 2, got {self.window_len}")
        if self.hop < 1:
            raise ValueError(f"hop must be >= 1, got {self.hop}")
        if self.moment_order < 1:
            raise ValueError(f"moment_order must be >= 1, got {self.moment_order}")


@dataclass(frozen=True)
class MomentSeries:
    """Rolling moment values indexed by window start.

    Degenerate (flat) windows cannot be encoded; their slot holds NaN as an
    explicit gap marker rather than a fabricated value.
    """

    starts: np.ndarray
    values: np.ndarray
    spec: WindowSpec = field(default_factory=WindowSpec)

    def __len__(self):
        return self.starts.size

    @property
    def gap_mask(self) -> np.ndarray:
        return np.isnan(self.values)


def _shifted(window: np.ndarray, shift_mode: str) -> np.ndarray:
    if shift_mode not in SHIFT_MODES:
        raise ValueError(f"shift_mode must be one of {SHIFT_MODES}, got {shift_mode!r}")
    if shift_mode == "min-shift":
        return window - window.min()
    return window


def qpam_encode(window, shift_mode: str = "min-shift") -> Statevector:
    """Load one signal window into probability amplitudes.

    With ``min-shift`` the window minimum is subtracted first so all samples
    are non-negative; either way the result is normalized to unit norm.
    Raises :class:`DegenerateWindowError` if the (shifted) window is all zero,
    which under ``min-shift`` means the window was constant.
    """
    w = np.asarray(window, dtype=float).reshape(-1)
    n = w.size
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"window length must be a power of two >= 2, got {n}")
    return from_amplitudes(_shifted(w, shift_mode))


def moment_observable(order: int, dim: int) -> DiagonalObservable:
    """Diagonal observable with eigenvalue i**order on basis state |i>."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    return DiagonalObservable(np.arange(dim, dtype=float) ** order)


def classical_moment_oracle(window, order: int, shift_mode: str = "min-shift") -> float:
    """Same quantity as the encoded route, computed directly on the window.

    Returns ``sum_i i^order * w_i^2 / sum_j w_j^2`` for the (optionally
    shifted) window, with no statevector machinery involved.
    """
    w = np.asarray(window, dtype=float).reshape(-1)
    n = w.size
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"window length must be a power of two >= 2, got {n}")
    w = _shifted(w, shift_mode)
    total = float(np.sum(w * w))
    if total == 0.0:
        raise DegenerateWindowError("window is zero after shifting; moment undefined")
    idx = np.arange(n, dtype=float) ** order
    return float(np.sum(idx * w * w) / total)


def window_starts(n_samples: int, spec: WindowSpec) -> np.ndarray:
    """Start indices 0, hop, 2*hop, ... while a full window still fits."""
    if n_samples < spec.window_len:
        raise ValueError(
            f"signal of length {n_samples} is shorter than the window ({spec.window_len})"
        )
    return np.arange(0, n_samples - spec.window_len + 1, spec.hop)


def rolling_moment(signal, spec: WindowSpec = WindowSpec(),
                   shift_mode: str = "min-shift") -> MomentSeries:
    """Rolling moment expectation over every window of the signal.

    Each window goes through the quantum route: QPAM encoding followed by a
    diagonal-observable expectation.  Flat windows yield NaN gaps.
    """
    x = np.asarray(signal, dtype=float).reshape(-1)
    starts = window_starts(x.size, spec)
    obs = moment_observable(spec.moment_order, spec.window_len)
    values = np.empty(starts.size)
    for k, s in enumerate(starts):
        try:
            state = qpam_encode(x[s:s + spec.window_len], shift_mode)
        except DegenerateWindowError:
            values[k] = np.nan
            continue
        values[k] = expectation_diagonal(state, obs)
    return MomentSeries(starts=starts, values=values, spec=spec)


def write_moment_csv(series: MomentSeries, path):
    """Two-column CSV ``start_index,value`` with round-trip float formatting."""
    with open(path, "w", newline="") as fh:
        fh.write("start_index,value\n")
        for s, v in zip(series.starts, series.values):
            fh.write(f"{int(s)},{float(v)!r}\n")
