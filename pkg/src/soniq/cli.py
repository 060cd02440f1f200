"""Command-line front end: synth | sonify | qpam | ising | full.

Every knob defaults to the reference parameters and can come from a flat
``key=value`` config file, with command-line flags taking precedence.  Exit
codes: 0 success, 1 internal/verification error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path

import numpy as np

from .exceptions import ParseError
from .ising import IsingSchedule, evolve, exact_evolve_small, write_trace_csv, EXACT_MAX_SPINS
from .moments import WindowSpec, classical_moment_oracle, rolling_moment, write_moment_csv
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


@dataclass
class RunConfig:
    """Effective configuration; defaults are the reference parameters."""

    out_dir: str = "soniq_out"
    sample_rate: float = 0.0       # 0 = take from the input file
    downsample: int = 500
    window_len: int = 16
    hop: int = 10
    order: int = 4
    shift_mode: str = "min-shift"
    n_segments: int = 9
    transition_step: int = 4       # 1-indexed step at which h_x == 1
    dt: float = 0.5
    k: int = 9                     # trotter steps; must equal n_segments
    field_channel: str = "MST4"
    note_duration: float = 0.1
    f_min: float = 261.63
    f_max: float = 1244.51
    audio_rate: int = 44100
    lowpass_cutoff: float = 4000.0
    amplitude_per_voice: float = 0.8
    pitch_scale: str = "linear"
    fm_ratio: float = 1.0
    fm_index_max: float = 3.0
    fft_size: int = 1024
    stft_hop: int = 512
    seed: int = 0
    channels: int = 16
    duration: float = 210.0
    synth_rate: float = 1000.0
    onset: float = 70.0
    offset: float = 185.0

    def sonify_config(self) -> SonifyConfig:
        return SonifyConfig(
            note_duration=self.note_duration, f_min=self.f_min, f_max=self.f_max,
            audio_rate=self.audio_rate, lowpass_cutoff=self.lowpass_cutoff,
            amplitude_per_voice=self.amplitude_per_voice, pitch_scale=self.pitch_scale,
        )

    def window_spec(self) -> WindowSpec:
        return WindowSpec(window_len=self.window_len, hop=self.hop, moment_order=self.order)


def read_config_file(path) -> dict:
    """Parse a flat key=value file into typed config entries."""
    types = {f.name: f.type for f in dataclass_fields(RunConfig)}
    casts = {"int": int, "float": float, "str": str}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"expected key=value, got {line!r}", row=lineno)
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in types:
                raise ParseError(f"unknown config key {key!r}", row=lineno)
            try:
                values[key] = casts[types[key]](value)
            except ValueError:
                raise ParseError(f"bad value {value!r} for {key}", row=lineno)
    return values


def format_config(cfg: RunConfig) -> str:
    return "\n".join(f"{f.name}={getattr(cfg, f.name)}" for f in dataclass_fields(RunConfig))


def resolve_config(args) -> RunConfig:
    """defaults < config file < command-line flags; SONIQ_OUT sits below the flag."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in read_config_file(args.config).items():
            setattr(cfg, key, value)
    env_out = os.environ.get("SONIQ_OUT")
    if env_out:
        cfg.out_dir = env_out
    for f in dataclass_fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
    if cfg.k != cfg.n_segments:
        raise ValueError(
            f"k ({cfg.k}) must equal n_segments ({cfg.n_segments}); the schedule "
            "provides one trotter step per segment"
        )
    return cfg


def _load(args, cfg: RunConfig) -> ChannelSet:
    rate = cfg.sample_rate if cfg.sample_rate > 0 else None
    return load_csv(args.input, sample_rate=rate)


def _kept_matrix(channels: ChannelSet, cfg: RunConfig) -> np.ndarray:
    return np.stack([downsample(row, cfg.downsample) for row in channels.data])


def _render_channels(kept: np.ndarray, cfg: RunConfig, index_env=None) -> AudioBuffer:
    scfg = cfg.sonify_config()
    voices = []
    for row in kept:
        lo, hi = float(row.min()), float(row.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        pitches = pitch_map(row, lo, hi, scfg)
        if index_env is None:
            voices.append(render_voice(pitches, scfg))
        else:
            voices.append(fm_modulate(pitches, index_env, cfg.fm_ratio, scfg))
    return lowpass(mix(voices), cfg.lowpass_cutoff)


def _write_audio_artifacts(buffer: AudioBuffer, out: Path, stem: str, cfg: RunConfig) -> list:
    paths = [out / f"{stem}.wav", out / f"{stem}_spectrogram.csv", out / f"{stem}_spectrogram.pgm"]
    write_wav(buffer, paths[0])
    mags = spectrogram(buffer, cfg.fft_size, cfg.stft_hop)
    write_spectrogram_csv(mags, paths[1])
    write_spectrogram_pgm(mags, paths[2])
    return paths


def _moment_series(channels: ChannelSet, cfg: RunConfig):
    return rolling_moment(channels.channel(cfg.field_channel), cfg.window_spec(), cfg.shift_mode)


def _build_schedule(channels: ChannelSet, cfg: RunConfig, hx_override=None):
    reduced = np.stack([segment_average(row, cfg.n_segments) for row in channels.data])
    couplings = renormalize_couplings(reduced)
    if hx_override is not None:
        fields = np.full(cfg.n_segments, float(hx_override))
    else:
        series = _moment_series(channels, cfg)
        values = series.values[~series.gap_mask]
        if values.size < cfg.n_segments:
            raise ValueError(
                f"only {values.size} usable moment values for {cfg.n_segments} segments"
            )
        fields = renormalize_field(segment_average(values, cfg.n_segments),
                                   cfg.transition_step - 1)
    return IsingSchedule(couplings=couplings, fields=fields, dt=cfg.dt)


def _write_schedule_csvs(schedule: IsingSchedule, names, out: Path) -> list:
    jpath, hpath = out / "schedule_couplings.csv", out / "schedule_field.csv"
    with open(jpath, "w", newline="") as fh:
        fh.write("step," + ",".join(names) + "\n")
        for k, row in enumerate(schedule.couplings, start=1):
            fh.write(f"{k}," + ",".join(repr(float(v)) for v in row) + "\n")
    with open(hpath, "w", newline="") as fh:
        fh.write("step,h_x\n")
        for k, v in enumerate(schedule.fields, start=1):
            fh.write(f"{k},{float(v)!r}\n")
    return [jpath, hpath]


def _write_trace_with_oracle(trace, oracle, path):
    n = trace.n_spins
    with open(path, "w", newline="") as fh:
        fh.write("step," + ",".join(f"q{q}" for q in range(n))
                 + "," + ",".join(f"exact_q{q}" for q in range(n)) + "\n")
        for k in range(trace.marginals.shape[0]):
            row = list(trace.marginals[k]) + list(oracle.marginals[k])
            fh.write(f"{k}," + ",".join(repr(float(v)) for v in row) + "\n")


def _fm_envelope(trace, n_notes: int, cfg: RunConfig) -> np.ndarray:
    """Mean-over-qubits marginals, linearly interpolated onto the note timeline."""
    per_step = trace.marginals.mean(axis=1)
    positions = np.linspace(0.0, per_step.size - 1, n_notes)
    return cfg.fm_index_max * np.interp(positions, np.arange(per_step.size), per_step)


def cmd_synth(args, cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    channels = synth_seizure(
        n_channels=cfg.channels, duration=cfg.duration, sample_rate=cfg.synth_rate,
        onset=cfg.onset, offset=cfg.offset, seed=cfg.seed,
    )
    path = out / "synthetic.csv"
    write_channels_csv(channels, path)
    print(path)
    return 0


def cmd_sonify(args, cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    channels = _load(args, cfg)
    buffer = _render_channels(_kept_matrix(channels, cfg), cfg)
    for p in _write_audio_artifacts(buffer, out, "sonified", cfg):
        print(p)
    return 0


def cmd_qpam(args, cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    channels = _load(args, cfg)
    name = args.channel or cfg.field_channel
    series = rolling_moment(channels.channel(name), cfg.window_spec(), cfg.shift_mode)
    path = out / f"moments_{name}.csv"
    write_moment_csv(series, path)
    print(path)
    if args.verify:
        signal = channels.channel(name)
        worst = 0.0
        for s, v in zip(series.starts, series.values):
            if np.isnan(v):
                continue
            ref = classical_moment_oracle(signal[s:s + cfg.window_len], cfg.order, cfg.shift_mode)
            worst = max(worst, abs(v - ref) / max(1.0, abs(ref)))
        print(f"max relative deviation vs classical oracle: {worst:.3e}")
        if worst > 1e-9:
            print("verification FAILED: quantum and classical moments disagree", file=sys.stderr)
            return 1
    if args.sonify:
        values = series.values[~series.gap_mask]
        if values.size == 0:
            raise ValueError("all windows are degenerate; nothing to sonify")
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        scfg = cfg.sonify_config()
        voice = lowpass(mix([render_voice(pitch_map(values, lo, hi, scfg), scfg)]),
                        cfg.lowpass_cutoff)
        wav_path = out / f"moments_{name}.wav"
        write_wav(voice, wav_path)
        print(wav_path)
    return 0


def cmd_ising(args, cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    channels = _load(args, cfg)
    schedule = _build_schedule(channels, cfg, hx_override=args.hx)
    trace = evolve(schedule)
    path = out / "ising_trace.csv"
    if args.exact:
        if schedule.n_spins > EXACT_MAX_SPINS:
            raise ValueError(
                f"--exact supports at most {EXACT_MAX_SPINS} channels, got {schedule.n_spins}"
            )
        oracle = exact_evolve_small(schedule)
        _write_trace_with_oracle(trace, oracle, path)
        dev = float(np.max(np.abs(trace.marginals - oracle.marginals)))
        print(f"max marginal deviation vs exact oracle: {dev:.3e}")
    else:
        write_trace_csv(trace, path)
    print(path)
    return 0


@contextmanager
def _stage(name):
    """Prefix errors escaping a pipeline stage with the stage name."""
    try:
        yield
    except Exception as exc:
        exc.args = (f"stage {name}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def cmd_full(args, cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    with _stage("load"):
        channels = _load(args, cfg)
    artifacts = []

    with _stage("sonify"):
        kept = _kept_matrix(channels, cfg)
        base = _render_channels(kept, cfg)
        artifacts += _write_audio_artifacts(base, out, "sonified", cfg)

    with _stage("qpam"):
        series = _moment_series(channels, cfg)
        moments_path = out / f"moments_{cfg.field_channel}.csv"
        write_moment_csv(series, moments_path)
        artifacts.append(moments_path)

    with _stage("ising"):
        schedule = _build_schedule(channels, cfg)
        artifacts += _write_schedule_csvs(schedule, channels.names, out)
        trace = evolve(schedule)
        trace_path = out / "ising_trace.csv"
        write_trace_csv(trace, trace_path)
        artifacts.append(trace_path)

    if not args.no_fm:
        with _stage("fm"):
            env = _fm_envelope(trace, kept.shape[1], cfg)
            modulated = _render_channels(kept, cfg, index_env=env)
            artifacts += _write_audio_artifacts(modulated, out, "sonified_fm", cfg)

    manifest = out / "manifest.txt"
    with open(manifest, "w", newline="") as fh:
        for p in sorted(artifacts, key=lambda p: p.name):
            digest = hashlib.sha256(Path(p).read_bytes()).hexdigest()
            fh.write(f"{digest}  {Path(p).name}\n")
    artifacts.append(manifest)
    for p in artifacts:
        print(p)
    return 0


def _ensure_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_config_flags(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--print-config", action="store_true",
                     help="print the effective configuration and exit")
    sub.add_argument("--out", dest="out_dir", help="output directory (or env SONIQ_OUT)")
    sub.add_argument("--seed", type=int)
    for name, typ in [
        ("sample_rate", float), ("downsample", int), ("window_len", int), ("hop", int),
        ("order", int), ("shift_mode", str), ("n_segments", int), ("transition_step", int),
        ("dt", float), ("k", int), ("field_channel", str), ("note_duration", float),
        ("f_min", float), ("f_max", float), ("audio_rate", int), ("lowpass_cutoff", float),
        ("amplitude_per_voice", float), ("pitch_scale", str), ("fm_ratio", float),
        ("fm_index_max", float), ("fft_size", int), ("stft_hop", int),
    ]:
        sub.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="soniq",
                                     description="Quantum-assisted sonification pipeline")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("synth", help="write a synthetic seizure-like dataset")
    _add_config_flags(p)
    p.add_argument("--channels", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--synth-rate", dest="synth_rate", type=float)
    p.add_argument("--onset", type=float)
    p.add_argument("--offset", type=float)
    p.set_defaults(func=cmd_synth, needs_input=False)

    p = subs.add_parser("sonify", help="render channels to a polyphonic WAV")
    p.add_argument("input", nargs="?", help="channels-as-columns CSV")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sonify, needs_input=True)

    p = subs.add_parser("qpam", help="rolling moment of one channel")
    p.add_argument("input", nargs="?")
    p.add_argument("--channel", help="channel name (default: field_channel)")
    p.add_argument("--sonify", action="store_true", help="also render the moment series")
    p.add_argument("--verify", action="store_true",
                   help="fail unless the encoded route matches the classical oracle")
    _add_config_flags(p)
    p.set_defaults(func=cmd_qpam, needs_input=True)

    p = subs.add_parser("ising", help="trotterized Ising evolution from the data")
    p.add_argument("input", nargs="?")
    p.add_argument("--hx", type=float, help="override the transverse field with a constant")
    p.add_argument("--exact", action="store_true",
                   help="small chains only: add dense-exponential oracle columns")
    _add_config_flags(p)
    p.set_defaults(func=cmd_ising, needs_input=True)

    p = subs.add_parser("full", help="end-to-end run with all artifacts")
    p.add_argument("input", nargs="?")
    p.add_argument("--no-fm", action="store_true", help="skip the FM-modulated rendering")
    _add_config_flags(p)
    p.set_defaults(func=cmd_full, needs_input=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            print(format_config(cfg))
            return 0
        if args.needs_input and not args.input:
            print("error: missing input CSV", file=sys.stderr)
            return 2
        return args.func(args, cfg)
    except (ParseError, FileNotFoundError, KeyError, ValueError, IndexError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error [{args.command}]: {message}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
