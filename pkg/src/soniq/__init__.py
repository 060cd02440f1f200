"""soniq: quantum-assisted sonification of multi-channel time series.

Two analysis techniques feed the audio rendering: rolling statistical moments
of amplitude-encoded (QPAM) signal windows, and per-qubit marginals of a
trotterized transverse-field Ising evolution whose schedule is driven by the
data itself.
"""

from .statevector import (
    DiagonalObservable,
    Statevector,
    apply_cnot,
    apply_rx,
    apply_rz,
    apply_rzz,
    expectation_diagonal,
    from_amplitudes,
    marginal_one_probabilities,
    zero_state,
)
from .moments import (
    MomentSeries,
    WindowSpec,
    classical_moment_oracle,
    moment_observable,
    qpam_encode,
    rolling_moment,
    write_moment_csv,
)
from .ising import (
    EvolutionTrace,
    IsingSchedule,
    build_trotter_step,
    evolve,
    exact_evolve_small,
    write_trace_csv,
)
from .pipeline import (
    ChannelSet,
    downsample,
    load_csv,
    renormalize_couplings,
    renormalize_field,
    segment_average,
    synth_seizure,
    write_channels_csv,
)
from .sonify import (
    AudioBuffer,
    SonifyConfig,
    fm_modulate,
    lowpass,
    mix,
    pitch_map,
    render_voice,
    spectrogram,
    write_spectrogram_csv,
    write_spectrogram_pgm,
    write_wav,
)
from .estimators import (
    BaselineCouplingScaler,
    Downsampler,
    IsingEvolver,
    QpamMomentTransformer,
    SegmentAverager,
    Sonifier,
    TransverseFieldScaler,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "BaselineCouplingScaler",
    "ChannelSet",
    "DiagonalObservable",
    "Downsampler",
    "EvolutionTrace",
    "IsingEvolver",
    "IsingSchedule",
    "MomentSeries",
    "QpamMomentTransformer",
    "SegmentAverager",
    "Sonifier",
    "SonifyConfig",
    "Statevector",
    "TransverseFieldScaler",
    "WindowSpec",
    "apply_cnot",
    "apply_rx",
    "apply_rz",
    "apply_rzz",
    "build_trotter_step",
    "classical_moment_oracle",
    "downsample",
    "evolve",
    "exact_evolve_small",
    "expectation_diagonal",
    "fm_modulate",
    "from_amplitudes",
    "load_csv",
    "lowpass",
    "marginal_one_probabilities",
    "mix",
    "moment_observable",
    "pitch_map",
    "qpam_encode",
    "render_voice",
    "renormalize_couplings",
    "renormalize_field",
    "rolling_moment",
    "segment_average",
    "spectrogram",
    "synth_seizure",
    "write_channels_csv",
    "write_moment_csv",
    "write_spectrogram_csv",
    "write_spectrogram_pgm",
    "write_trace_csv",
    "write_wav",
    "zero_state",
]
