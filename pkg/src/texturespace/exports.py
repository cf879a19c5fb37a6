"""File formats for pipeline artifacts.

Everything here is deterministic: a fixed input produces byte-identical
output, so reruns of a seeded pipeline can be diffed file by file. Floats
are written with repr round-tripping, WAVs as mono 16-bit PCM.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, lfilter, resample_poly

from .grouping import SimilarityMatrix
from .mds import MdsSolution, ScreeCurve
from .synthesis import TextureSet

PREVIEW_RATE_HZ = 44_100
ANTIALIAS_CUTOFF_HZ = 20_000.0
ANTIALIAS_TAPS = 255


def _fmt(x: float) -> str:
    return repr(float(x))


def write_wav(path, samples, fs: float) -> None:
    """Mono 16-bit PCM; samples are clipped to [-1, 1] before quantizing.

    path may be a filesystem path or any writable binary file object.
    """
    clipped = np.clip(np.asarray(samples, dtype=float), -1.0, 1.0)
    pcm = np.round(clipped * 32767.0).astype(np.int16)
    target = str(path) if isinstance(path, (str, Path)) else path
    wavfile.write(target, int(round(fs)), pcm)


def read_wav(path):
    """(fs, float samples in [-1, 1]) for a mono 16-bit PCM file."""
    source = str(path) if isinstance(path, (str, Path)) else path
    fs, pcm = wavfile.read(source)
    if pcm.dtype != np.int16:
        raise ValueError(f"{path}: expected 16-bit PCM, got {pcm.dtype}")
    return float(fs), pcm.astype(float) / 32767.0


def resample_preview(samples, fs_in: float, fs_out: float = PREVIEW_RATE_HZ):
    """Downsample a loopable signal for audio playback.

    Low-passes at 20 kHz before decimating. The input is treated as a
    seamless loop (texture renders are crossfaded), so the filter delay is
    compensated by rotation rather than padding.
    """
    if fs_out >= fs_in:
        raise ValueError("preview rate must be below the native rate")
    taps = firwin(ANTIALIAS_TAPS, ANTIALIAS_CUTOFF_HZ, fs=fs_in)
    guarded = lfilter(taps, [1.0], np.asarray(samples, dtype=float))
    delay = (ANTIALIAS_TAPS - 1) // 2
    guarded = np.roll(guarded, -delay)
    up, down = (np.array([fs_out, fs_in]) / np.gcd(int(fs_out), int(fs_in))).astype(int)
    return resample_poly(guarded, up, down)


def write_texture_csv(path, samples) -> None:
    lines = ["value"] + [_fmt(v) for v in np.asarray(samples, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_current_csv(path, milliamps) -> None:
    lines = ["value_mA"] + [_fmt(v) for v in np.asarray(milliamps, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_spectrum_csv(path, frequencies, magnitudes) -> None:
    lines = ["freq_hz,magnitude"]
    for f, m in zip(frequencies, magnitudes):
        lines.append(f"{_fmt(f)},{_fmt(m)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_bode_csv(path, frequencies, gain_db, phase_deg) -> None:
    lines = ["freq_hz,gain_db,phase_deg"]
    for f, g, p in zip(frequencies, gain_db, phase_deg):
        lines.append(f"{_fmt(f)},{_fmt(g)},{_fmt(p)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(path, texture_set: TextureSet, fs: float, duration: float,
                   files: dict) -> None:
    """Catalog JSON: one entry per texture with parameters, seed, and paths.

    files maps texture_id -> {"wav": ..., "csv": ..., "preview": ...} with
    paths relative to the manifest's directory.
    """
    entries = []
    for tid in texture_set.texture_ids():
        params = texture_set.params_for(tid)
        entry = {
            "id": tid,
            "f0_hz": params.f0_hz,
            "amplitude": params.amplitude,
            "irregularity": params.irregularity,
            "seed": texture_set.seed_for(tid),
        }
        entry.update(files.get(tid, {}))
        entries.append(entry)
    payload = {
        "fs_hz": fs,
        "duration_s": duration,
        "base_seed": texture_set.base_seed,
        "textures": entries,
    }
    write_json(path, payload)


def read_manifest(path) -> dict:
    payload = json.loads(Path(path).read_text())
    for key in ("fs_hz", "duration_s", "textures"):
        if key not in payload:
            raise ValueError(f"{path}: manifest missing {key!r}")
    return payload


def manifest_texture_set(manifest: dict) -> TextureSet:
    """Rebuild the parameter catalog a manifest was generated from."""
    from .synthesis import TextureParams

    entries = tuple(
        (t["id"], TextureParams(t["f0_hz"], t["amplitude"], t["irregularity"]))
        for t in manifest["textures"]
    )
    return TextureSet(entries=entries, base_seed=manifest.get("base_seed", 0))


def write_similarity_csv(path, similarity: SimilarityMatrix) -> None:
    """n x n integer grid with texture ids as header row and column."""
    header = "texture_id," + ",".join(str(tid) for tid in similarity.ids)
    lines = [header]
    for i, tid in enumerate(similarity.ids):
        row = ",".join(str(int(c)) for c in similarity.counts[i])
        lines.append(f"{tid},{row}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_solution_csv(path, solution: MdsSolution, ids) -> None:
    if len(ids) != solution.n:
        raise ValueError(f"{len(ids)} ids for {solution.n} embedded points")
    dims = ",".join(f"dim{j + 1}" for j in range(solution.k))
    lines = [f"texture_id,{dims}"]
    for tid, row in zip(ids, solution.coordinates):
        lines.append(f"{tid}," + ",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_solution_json(path, solution: MdsSolution) -> None:
    write_json(
        path,
        {
            "stress": solution.stress,
            "k": solution.k,
            "iterations": solution.iterations,
            "restarts": solution.restarts_used,
            "degenerate": solution.degenerate,
        },
    )


def write_scree_csv(path, curve: ScreeCurve) -> None:
    lines = ["k,stress"] + [f"{k},{_fmt(s)}" for k, s in curve.points]
    Path(path).write_text("\n".join(lines) + "\n")


def build_report(
    solution: MdsSolution,
    curve: ScreeCurve,
    vectors,
    angles: dict,
    correlations,
    placements=(),
    participants: int | None = None,
) -> dict:
    """Assemble the analysis report: embedding quality, the parameter
    vectors with their pairwise angle table, the parameter-by-dimension
    correlation table with strongest-per-dimension flags, and any group
    label placements."""
    report = {
        "participants": participants,
        "mds": {
            "k": solution.k,
            "stress": solution.stress,
            "iterations": solution.iterations,
            "stress_acceptable": solution.stress <= curve.cutoff,
            "cutoff": curve.cutoff,
        },
        "scree": [{"k": k, "stress": s} for k, s in curve.points],
        "vectors": {
            v.name: {"components": list(v.components), "norm": v.norm}
            for v in vectors
        },
        "angles_deg": [
            {"a": a, "b": b, "degrees": round(angle)}
            for (a, b), angle in angles.items()
        ],
        "correlations": {
            "parameters": list(correlations.parameters),
            "dimensions": [f"dim{j + 1}" for j in range(correlations.r.shape[1])],
            "r": [[round(v, 4) for v in row] for row in correlations.r],
            "strongest": [list(map(bool, row)) for row in correlations.strongest],
        },
        "labels": [
            {
                "label": p.label,
                "position": list(p.position),
                "participant_id": p.participant_id,
                "round": p.round_index,
                "member_ids": list(p.member_ids),
            }
            for p in placements
        ],
    }
    return report


def write_report_json(path, report: dict) -> None:
    write_json(path, report)


def write_json(path, payload) -> None:
    """Deterministic two-space-indented JSON with a trailing newline."""
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
