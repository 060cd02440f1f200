"""Estimator layer: sklearn conventions and equivalence with the functional core."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from soniq import (
    BaselineCouplingScaler,
    Downsampler,
    IsingEvolver,
    IsingSchedule,
    QpamMomentTransformer,
    SegmentAverager,
    Sonifier,
    TransverseFieldScaler,
    WindowSpec,
    evolve,
    renormalize_couplings,
    rolling_moment,
    segment_average,
)

ALL_ESTIMATORS = [
    QpamMomentTransformer(),
    Downsampler(),
    SegmentAverager(),
    BaselineCouplingScaler(),
    TransverseFieldScaler(),
    IsingEvolver(),
    Sonifier(),
]


@pytest.mark.parametrize("est", ALL_ESTIMATORS, ids=lambda e: type(e).__name__)
def test_get_set_params_round_trip(est):
    params = est.get_params()
    assert params
    cloned = clone(est)
    assert cloned.get_params() == params
    cloned.set_params(**params)
    assert cloned.get_params() == params


@pytest.mark.parametrize("est", [QpamMomentTransformer(), SegmentAverager(n_segments=3),
                                 BaselineCouplingScaler(), TransverseFieldScaler(transition_step=1)],
                         ids=lambda e: type(e).__name__)
def test_transform_before_fit_raises(est):
    with pytest.raises(NotFittedError):
        est.transform(np.random.default_rng(0).standard_normal((30, 2)))


def test_qpam_transformer_matches_rolling_moment():
    rng = np.random.default_rng(50)
    X = rng.standard_normal((120, 3))
    est = QpamMomentTransformer(window_len=16, hop=10, order=4)
    out = est.fit_transform(X)
    assert out.shape == ((120 - 16) // 10 + 1, 3)
    for c in range(3):
        expected = rolling_moment(X[:, c], WindowSpec(16, 10, 4)).values
        np.testing.assert_allclose(out[:, c], expected)


def test_qpam_transformer_one_dimensional_input():
    rng = np.random.default_rng(51)
    x = rng.standard_normal(100)
    out = QpamMomentTransformer().fit_transform(x)
    assert out.ndim == 1
    np.testing.assert_allclose(out, rolling_moment(x, WindowSpec()).values)


def test_downsampler_is_row_slicing():
    X = np.arange(20.0).reshape(10, 2)
    out = Downsampler(factor=3).fit_transform(X)
    np.testing.assert_array_equal(out, X[::3])


def test_segment_averager_per_column():
    rng = np.random.default_rng(52)
    X = rng.standard_normal((50, 2))
    out = SegmentAverager(n_segments=5).fit_transform(X)
    for c in range(2):
        np.testing.assert_allclose(out[:, c], segment_average(X[:, c], 5))


def test_baseline_scaler_learns_reference_scale():
    X = np.array([[2.0], [-1.0], [0.5], [6.0], [3.0], [1.0], [0.0], [2.0], [-2.0]])
    est = BaselineCouplingScaler()
    out = est.fit_transform(X)
    assert est.scale_[0] == 2.0
    np.testing.assert_allclose(out[:, 0], renormalize_couplings(X.T)[:, 0])


def test_baseline_scaler_transform_reuses_fitted_scale():
    est = BaselineCouplingScaler().fit(np.array([[4.0], [1.0], [1.0], [1.0]]))
    np.testing.assert_allclose(est.transform(np.array([[8.0]])), [[2.0]])


def test_field_scaler_pivot_row_is_one():
    rng = np.random.default_rng(53)
    X = rng.uniform(0.5, 3.0, size=(9, 2))
    out = TransverseFieldScaler(transition_step=3).fit_transform(X)
    np.testing.assert_array_equal(out[3], [1.0, 1.0])


def test_ising_evolver_matches_functional_route():
    rng = np.random.default_rng(54)
    J = rng.uniform(-1, 1, size=(4, 3))
    h = rng.uniform(0, 1.5, size=4)
    est = IsingEvolver(fields=h, dt=0.5)
    out = est.fit_transform(J)
    expected = evolve(IsingSchedule(couplings=J, fields=h, dt=0.5)).marginals
    np.testing.assert_allclose(out, expected)
    assert out.shape == (5, 3)


def test_ising_evolver_scalar_field_broadcast():
    J = np.zeros((2, 2))
    out = IsingEvolver(fields=np.pi / 2 / 0.5 / 2, dt=0.5).fit_transform(J)
    np.testing.assert_allclose(out[2], [1.0, 1.0], atol=1e-12)  # two quarter turns


def test_full_reduction_pipeline_composes():
    rng = np.random.default_rng(55)
    X = rng.standard_normal((90, 4)) + 2.0
    pipe = Pipeline([
        ("reduce", SegmentAverager(n_segments=9)),
        ("scale", BaselineCouplingScaler()),
        ("evolve", IsingEvolver(fields=1.0, dt=0.5)),
    ])
    marginals = pipe.fit_transform(X)
    assert marginals.shape == (10, 4)
    reduced = np.stack([segment_average(X[:, c], 9) for c in range(4)])
    expected = evolve(IsingSchedule(couplings=renormalize_couplings(reduced),
                                    fields=np.ones(9), dt=0.5)).marginals
    np.testing.assert_allclose(marginals, expected)


def test_sonifier_renders_waveform():
    rng = np.random.default_rng(56)
    X = rng.standard_normal((12, 2))
    samples = Sonifier(note_duration=0.05, audio_rate=8000, lowpass_cutoff=3000.0).fit_transform(X)
    assert samples.ndim == 1
    assert samples.size == round(12 * 0.05 * 8000)
    assert np.max(np.abs(samples)) <= 1.0
