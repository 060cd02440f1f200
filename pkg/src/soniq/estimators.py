"""scikit-learn compatible transformers wrapping the pipeline stages.

Every stage of the analysis (windowed moment extraction, reduction,
renormalization, Ising evolution, audio rendering) is exposed as a
``fit``/``transform`` estimator so the whole chain composes with
``sklearn.pipeline.Pipeline`` and hyper-parameter search.  Columns are
channels, rows are samples/steps, matching the library convention.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ising import IsingSchedule, evolve
from .moments import WindowSpec, rolling_moment
from .pipeline import downsample, segment_average
from .sonify import SonifyConfig, lowpass, mix, pitch_map, render_voice


def _as_columns(X, name="X"):
    """Validate to a 2-D float array (samples x channels); 1-D input gains a column."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {X.shape}")
    if X.size == 0:
        raise ValueError(f"{name} is empty")
    return X


class QpamMomentTransformer(BaseEstimator, TransformerMixin):
    """Rolling index-moment of amplitude-encoded windows, column by column.

    Parameters
    ----------
    window_len : int, power of two, length of each encoded window.
    hop : int, stride between window starts.
    order : int, moment order p of the diagonal observable.
    shift_mode : {"min-shift", "none"}, handling of signed samples.
    """

    def __init__(self, window_len=16, hop=10, order=4, shift_mode="min-shift"):
        self.window_len = window_len
        self.hop = hop
        self.order = order
        self.shift_mode = shift_mode

    def _spec(self):
        return WindowSpec(window_len=self.window_len, hop=self.hop, moment_order=self.order)

    def fit(self, X, y=None):
        self._spec()  # validates the parameters
        X = _as_columns(X)
        if X.shape[0] < self.window_len:
            raise ValueError(
                f"{X.shape[0]} samples cannot fill one {self.window_len}-sample window"
            )
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        squeeze = np.ndim(X) == 1
        X = _as_columns(X)
        spec = self._spec()
        cols = [rolling_moment(X[:, c], spec, self.shift_mode).values for c in range(X.shape[1])]
        out = np.column_stack(cols)
        return out[:, 0] if squeeze else out


class Downsampler(BaseEstimator, TransformerMixin):
    """Keep every ``factor``-th row."""

    def __init__(self, factor=500):
        self.factor = factor

    def fit(self, X, y=None):
        if self.factor < 1:
            raise ValueError(f"factor must be >= 1, got {self.factor}")
        self.n_features_in_ = _as_columns(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        squeeze = np.ndim(X) == 1
        out = downsample(_as_columns(X), self.factor)
        return out[:, 0] if squeeze else out


class SegmentAverager(BaseEstimator, TransformerMixin):
    """Reduce each column to ``n_segments`` contiguous span means."""

    def __init__(self, n_segments=9):
        self.n_segments = n_segments

    def fit(self, X, y=None):
        X = _as_columns(X)
        if X.shape[0] < self.n_segments:
            raise ValueError(
                f"{X.shape[0]} rows cannot fill {self.n_segments} segments"
            )
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        squeeze = np.ndim(X) == 1
        X = _as_columns(X)
        out = np.column_stack([segment_average(X[:, c], self.n_segments)
                               for c in range(X.shape[1])])
        return out[:, 0] if squeeze else out


class BaselineCouplingScaler(BaseEstimator, TransformerMixin):
    """Per-column max-abs scaling learned on the leading baseline rows.

    Fitting on the reduced (steps x channels) matrix stores one scale per
    channel from the first ``reference_fraction`` of the rows; transforming
    divides by it.  ``fit_transform`` therefore reproduces the coupling
    renormalization: baseline steps land in [-1, 1], later excursions may not.
    """

    def __init__(self, reference_fraction=1 / 3):
        self.reference_fraction = reference_fraction

    def fit(self, X, y=None):
        X = _as_columns(X)
        if not 0 < self.reference_fraction <= 1:
            raise ValueError(
                f"reference_fraction must be in (0, 1], got {self.reference_fraction}"
            )
        n_ref = max(1, int(X.shape[0] * self.reference_fraction))
        scale = np.max(np.abs(X[:n_ref]), axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        squeeze = np.ndim(X) == 1
        out = _as_columns(X) / self.scale_
        return out[:, 0] if squeeze else out


class TransverseFieldScaler(BaseEstimator, TransformerMixin):
    """Scale each column so its value at ``transition_step`` is exactly 1."""

    def __init__(self, transition_step=3):
        self.transition_step = transition_step

    def fit(self, X, y=None):
        X = _as_columns(X)
        if not 0 <= self.transition_step < X.shape[0]:
            raise ValueError(
                f"transition_step {self.transition_step} outside [0, {X.shape[0] - 1}]"
            )
        pivot = X[self.transition_step].copy()
        if np.any(pivot == 0.0) or not np.all(np.isfinite(pivot)):
            raise ValueError("zero or non-finite value at the transition step")
        self.scale_ = pivot
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        squeeze = np.ndim(X) == 1
        out = _as_columns(X) / self.scale_
        return out[:, 0] if squeeze else out


class IsingEvolver(BaseEstimator, TransformerMixin):
    """Trotterized Ising evolution driven by a coupling schedule.

    ``transform`` takes the (steps x spins) coupling matrix and returns the
    (steps + 1) x spins marginal |1> probabilities, row 0 being the initial
    all-zeros state.  The per-step transverse field is a constructor
    parameter; a scalar is broadcast over all steps.
    """

    def __init__(self, fields=1.0, dt=0.5):
        self.fields = fields
        self.dt = dt

    def _field_vector(self, n_steps):
        h = np.asarray(self.fields, dtype=float).reshape(-1)
        if h.size == 1:
            return np.full(n_steps, h[0])
        if h.size != n_steps:
            raise ValueError(f"{h.size} field values for {n_steps} schedule steps")
        return h

    def fit(self, X, y=None):
        X = _as_columns(X)
        IsingSchedule(couplings=X, fields=self._field_vector(X.shape[0]), dt=self.dt)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = _as_columns(X)
        schedule = IsingSchedule(couplings=X, fields=self._field_vector(X.shape[0]), dt=self.dt)
        return evolve(schedule).marginals


class Sonifier(BaseEstimator, TransformerMixin):
    """Render channels to one mixed, low-passed waveform.

    Each column is pitch-mapped over its own min/max, rendered as a voice of
    fixed-duration sine notes, then the voices are averaged and filtered.
    ``transform`` returns the 1-D sample array.
    """

    def __init__(self, note_duration=0.1, f_min=261.63, f_max=1244.51,
                 audio_rate=44100, lowpass_cutoff=4000.0,
                 amplitude_per_voice=0.8, pitch_scale="linear"):
        self.note_duration = note_duration
        self.f_min = f_min
        self.f_max = f_max
        self.audio_rate = audio_rate
        self.lowpass_cutoff = lowpass_cutoff
        self.amplitude_per_voice = amplitude_per_voice
        self.pitch_scale = pitch_scale

    def _config(self):
        return SonifyConfig(
            note_duration=self.note_duration, f_min=self.f_min, f_max=self.f_max,
            audio_rate=self.audio_rate, lowpass_cutoff=self.lowpass_cutoff,
            amplitude_per_voice=self.amplitude_per_voice, pitch_scale=self.pitch_scale,
        )

    def fit(self, X, y=None):
        self._config()
        self.n_features_in_ = _as_columns(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = _as_columns(X)
        cfg = self._config()
        voices = []
        for c in range(X.shape[1]):
            col = X[:, c]
            lo, hi = float(col.min()), float(col.max())
            if lo == hi:
                lo, hi = lo - 0.5, hi + 0.5
            voices.append(render_voice(pitch_map(col, lo, hi, cfg), cfg))
        return lowpass(mix(voices), cfg.lowpass_cutoff).samples
