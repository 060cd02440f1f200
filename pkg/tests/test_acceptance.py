"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  No clinical recording ships with the package, so the suite is
property-based plus exact reproduction of every stated constant, exercised on
the bundled synthetic dataset.
"""

import time
import wave

import numpy as np
import pytest

from soniq import (
    IsingSchedule,
    SonifyConfig,
    WindowSpec,
    apply_cnot,
    apply_rx,
    apply_rz,
    apply_rzz,
    classical_moment_oracle,
    evolve,
    exact_evolve_small,
    expectation_diagonal,
    fm_modulate,
    from_amplitudes,
    moment_observable,
    qpam_encode,
    render_voice,
    renormalize_couplings,
    renormalize_field,
    rolling_moment,
    segment_average,
    synth_seizure,
    zero_state,
)
from soniq.cli import RunConfig, main


def report(criterion, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def synthetic_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("dataset")
    assert main(["synth", "--out", str(out)]) == 0
    return out / "synthetic.csv"


def test_criterion_1_qpam_oracle_equivalence():
    rng = np.random.default_rng(100)
    obs = moment_observable(4, 16)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(1000):
        window = rng.standard_normal(16)
        quantum = expectation_diagonal(qpam_encode(window, "min-shift"), obs)
        classical = classical_moment_oracle(window, 4, "min-shift")
        worst = max(worst, abs(quantum - classical) / max(1.0, abs(classical)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    report(1, ok, f"max rel deviation {worst:.2e} over 1000 windows in {elapsed:.2f}s")


def test_criterion_2_uniform_window_moment():
    expected = sum(i ** 4 for i in range(16)) / 16  # independent enumeration: 11144.5
    series = rolling_moment(np.full(16, 3.0), WindowSpec(), "none")
    value = float(series.values[0])
    ok = expected == 11144.5 and abs(value - expected) <= 1e-9
    report(2, ok, f"flat window moment {value!r} vs brute force {expected!r}")


def test_criterion_3_trotter_convergence():
    rng = np.random.default_rng(101)
    J = rng.uniform(-1, 1, size=4)
    h = rng.uniform(0.5, 1.5)
    t0 = time.perf_counter()
    errors = {}
    for k in (2, 4, 8, 16, 32):
        schedule = IsingSchedule(couplings=np.tile(J, (k, 1)),
                                 fields=np.full(k, h), dt=1.0 / k)
        errors[k] = float(np.max(np.abs(evolve(schedule).marginals[-1]
                                        - exact_evolve_small(schedule).marginals[-1])))
    elapsed = time.perf_counter() - t0
    ks = sorted(errors)
    monotone = all(errors[a] > errors[b] for a, b in zip(ks, ks[1:]))
    asymptotic = errors[16] / errors[8] <= 0.6 and errors[32] / errors[16] <= 0.6
    ok = monotone and asymptotic and elapsed < 10.0
    report(3, ok, "errors " + ", ".join(f"k={k}: {errors[k]:.2e}" for k in ks)
           + f" in {elapsed:.2f}s")


def test_criterion_4_diagonal_limit():
    rng = np.random.default_rng(102)
    schedule = IsingSchedule(couplings=rng.uniform(-3, 3, size=(9, 16)),
                             fields=np.zeros(9), dt=0.5)
    trace = evolve(schedule)
    worst = float(np.max(np.abs(trace.marginals)))
    ok = worst < 1e-12
    report(4, ok, f"max marginal {worst:.2e} over 9 steps of 16 spins at zero field")


def test_criterion_5_phase_transition_shape():
    channels = synth_seizure(seed=0)  # bundled dataset defaults
    series = rolling_moment(channels.channel("MST4"), WindowSpec(16, 10, 4), "min-shift")
    moments = series.values[~series.gap_mask]
    fields = renormalize_field(segment_average(moments, 9), transition_step=3)
    reduced = np.stack([segment_average(row, 9) for row in channels.data])
    schedule = IsingSchedule(couplings=renormalize_couplings(reduced), fields=fields, dt=0.5)
    mean_marginals = evolve(schedule).marginals.mean(axis=1)
    early = mean_marginals[1:4].mean()
    late = mean_marginals[5:10].mean()
    ok = fields[3] == 1.0 and late - early >= 0.1
    report(5, ok, f"h_x[step4]={fields[3]}, mean marginal steps 5-9 {late:.3f} "
                  f"vs steps 1-3 {early:.3f} (diff {late - early:.3f})")


def test_criterion_6_parameter_fidelity():
    cfg = RunConfig()
    snapshot = {
        "downsample": cfg.downsample,
        "note_duration": cfg.note_duration,
        "f_min": cfg.f_min,
        "f_max": cfg.f_max,
        "window_len": cfg.window_len,
        "hop": cfg.hop,
        "order": cfg.order,
        "n_segments": cfg.n_segments,
        "transition_step": cfg.transition_step,
        "dt": cfg.dt,
        "k": cfg.k,
        "n_spins": cfg.channels,
    }
    expected = {
        "downsample": 500,
        "note_duration": 0.1,
        "f_min": 261.63,
        "f_max": 1244.51,
        "window_len": 16,
        "hop": 10,
        "order": 4,
        "n_segments": 9,
        "transition_step": 4,
        "dt": 0.5,
        "k": 9,
        "n_spins": 16,
    }
    spec_defaults = (WindowSpec(), SonifyConfig())
    aligned = (spec_defaults[0].window_len == 16 and spec_defaults[0].hop == 10
               and spec_defaults[0].moment_order == 4
               and spec_defaults[1].note_duration == 0.1
               and spec_defaults[1].f_min == 261.63 and spec_defaults[1].f_max == 1244.51)
    ok = snapshot == expected and aligned
    report(6, ok, f"config snapshot {snapshot}")


def test_criterion_7_fm_correctness():
    # carrier 1000 Hz, ratio 0.3: carrier/sidebands sit on exact 10 Hz bins
    cfg = SonifyConfig(amplitude_per_voice=1.0, fade=0.0)
    buf = fm_modulate([1000.0], np.array([1.0]), 0.3, cfg)
    spec = np.fft.rfft(buf.samples)
    mag = lambda b: 2.0 * abs(spec[b]) / buf.samples.size
    j0, j1 = 0.7651976866, 0.4400505857  # Bessel-series FM identity values
    carrier, lower, upper = mag(100), mag(70), mag(130)
    plain = render_voice([1000.0], cfg)
    silent_fm = fm_modulate([1000.0], np.array([0.0]), 0.3, cfg)
    zero_dev = float(np.max(np.abs(silent_fm.samples - plain.samples)))
    ok = (abs(carrier - j0) / j0 <= 0.05
          and abs(lower - j1) / j1 <= 0.05
          and abs(upper - j1) / j1 <= 0.05
          and zero_dev < 1e-12)
    report(7, ok, f"carrier {carrier:.4f} (J0 {j0:.4f}), sidebands {lower:.4f}/{upper:.4f} "
                  f"(J1 {j1:.4f}), zero-index deviation {zero_dev:.1e}")


def test_criterion_8_determinism_and_format(synthetic_csv, tmp_path):
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    t0 = time.perf_counter()
    rc1 = main(["full", str(synthetic_csv), "--out", str(out1)])
    elapsed = time.perf_counter() - t0
    rc2 = main(["full", str(synthetic_csv), "--out", str(out2)])
    identical = all((out1 / p.name).read_bytes() == (out2 / p.name).read_bytes()
                    for p in sorted(out1.iterdir()))
    wav_ok = True
    for name in ("sonified.wav", "sonified_fm.wav"):
        raw = (out1 / name).read_bytes()
        wav_ok &= raw[:4] == b"RIFF" and raw[8:12] == b"WAVE" and b"fmt " in raw and b"data" in raw
        with wave.open(str(out1 / name)) as fh:
            wav_ok &= (fh.getnchannels() == 1 and fh.getsampwidth() == 2
                       and fh.getcomptype() == "NONE")
    ok = rc1 == 0 and rc2 == 0 and identical and wav_ok and elapsed < 60.0
    report(8, ok, f"full run in {elapsed:.1f}s, {len(list(out1.iterdir()))} artifacts, "
                  f"byte-identical={identical}, wav headers valid={wav_ok}")


def test_criterion_9_statevector_soundness():
    rng = np.random.default_rng(103)
    state = zero_state(16)
    for _ in range(10_000):
        kind = rng.integers(4)
        theta = float(rng.uniform(-np.pi, np.pi))
        if kind == 0:
            state = apply_rx(state, int(rng.integers(16)), theta)
        elif kind == 1:
            state = apply_rz(state, int(rng.integers(16)), theta)
        else:
            q1, q2 = (int(q) for q in rng.choice(16, size=2, replace=False))
            state = apply_cnot(state, q1, q2) if kind == 2 else apply_rzz(state, q1, q2, theta)
    drift = abs(state.norm_squared() - 1.0)

    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        s = from_amplitudes(amps)
        q1, q2 = (int(q) for q in rng.choice(n, size=2, replace=False))
        theta = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        idx = np.arange(s.dim)
        parity = ((idx >> q1) & 1) ^ ((idx >> q2) & 1)
        direct = s.amplitudes * np.exp(-0.5j * theta * (1.0 - 2.0 * parity))
        worst = max(worst, float(np.max(np.abs(apply_rzz(s, q1, q2, theta).amplitudes - direct))))
    ok = drift < 1e-9 and worst < 1e-12
    report(9, ok, f"norm drift {drift:.2e} after 10^4 gates; rzz sandwich vs "
                  f"diagonal oracle {worst:.2e}")
