"""Command-line pipeline: synthesize, simulate, analyze, serve, export.

Every command is reproducible from its config and seeds; rerunning with
the same inputs rewrites byte-identical artifacts. Exit codes: 0 success,
2 validation failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import exports, plots
from .config import PipelineConfig, apply_overrides, default_config, load_config
from .grouping import (
    SimilarityMatrix,
    aggregate,
    session_from_dict,
    session_to_dict,
    simulate_participant,
    to_dissimilarity,
    validate_session,
)
from .mds import nonmetric_mds, scree
from .space import (
    catalog_columns,
    dim_correlations,
    label_positions,
    pairwise_angles,
    parameter_vector,
)
from .synthesis import build_texture_set, synthesize_texture, to_current

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3

SWEEP_START_HZ = 10.0
SWEEP_END_HZ = 1000.0
SWEEP_DURATION_S = 5.0


def cmd_synth(config: PipelineConfig, out_dir) -> Path:
    """Render the full texture catalog: WAV + CSV per texture, one manifest."""
    out = Path(out_dir)
    textures_dir = out / "textures"
    preview_dir = out / "preview"
    textures_dir.mkdir(parents=True, exist_ok=True)
    preview_dir.mkdir(parents=True, exist_ok=True)
    texture_set = build_texture_set(base_seed=config.synthesis.base_seed)
    files = {}
    for tid in texture_set.texture_ids():
        signal = synthesize_texture(
            texture_set.params_for(tid),
            duration=config.synthesis.duration_s,
            fs=config.synthesis.fs_hz,
            seed=texture_set.seed_for(tid),
        )
        wav_rel = f"textures/texture_{tid:02d}.wav"
        csv_rel = f"textures/texture_{tid:02d}.csv"
        preview_rel = f"preview/texture_{tid:02d}.wav"
        exports.write_wav(out / wav_rel, signal.samples, signal.fs)
        exports.write_texture_csv(out / csv_rel, signal.samples)
        preview = exports.resample_preview(signal.samples, signal.fs)
        exports.write_wav(out / preview_rel, preview, exports.PREVIEW_RATE_HZ)
        files[tid] = {"wav": wav_rel, "csv": csv_rel, "preview": preview_rel}
    manifest_path = out / "manifest.json"
    exports.write_manifest(
        manifest_path,
        texture_set,
        fs=config.synthesis.fs_hz,
        duration=config.synthesis.duration_s,
        files=files,
    )
    return manifest_path


def cmd_simulate(config: PipelineConfig, out_dir) -> list:
    """Write one session JSON per simulated participant."""
    out = Path(out_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise OSError(f"missing manifest: {manifest_path} (run synth first)")
    manifest = exports.read_manifest(manifest_path)
    texture_set = exports.manifest_texture_set(manifest)
    sessions_dir = out / "sessions"
    sessions_dir.mkdir(parents=True, exist_ok=True)
    experiment = config.experiment
    paths = []
    for i in range(experiment.participants):
        session = simulate_participant(
            texture_set,
            weights=experiment.weights,
            noise_sd=experiment.noise_sd,
            group_counts=experiment.group_counts,
            seed=experiment.seed + i,
        )
        path = sessions_dir / f"session_{i:02d}.json"
        path.write_text(json.dumps(session_to_dict(session), indent=2) + "\n")
        paths.append(path)
    return paths


def _load_sessions(sessions_dir: Path, texture_ids):
    paths = sorted(sessions_dir.glob("*.json"))
    if not paths:
        raise ValueError(f"no session files in {sessions_dir}")
    sessions = []
    problems = []
    for path in paths:
        try:
            session = session_from_dict(json.loads(path.read_text()))
            validate_session(session, texture_ids=texture_ids)
            sessions.append(session)
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            problems.append(f"{path.name}: {exc}")
    if problems:
        raise ValueError("invalid session files:\n  " + "\n  ".join(problems))
    return sessions


def cmd_analyze(config: PipelineConfig, out_dir) -> Path:
    """Sessions to similarity, embedding, parameter vectors, and figures."""
    out = Path(out_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise OSError(f"missing manifest: {manifest_path} (run synth first)")
    manifest = exports.read_manifest(manifest_path)
    texture_set = exports.manifest_texture_set(manifest)
    sessions = _load_sessions(out / "sessions", texture_set.texture_ids())

    analysis_dir = out / "analysis"
    analysis_dir.mkdir(parents=True, exist_ok=True)

    similarity = aggregate(sessions)
    exports.write_similarity_csv(analysis_dir / "similarity.csv", similarity)
    diss = to_dissimilarity(similarity)

    mds_cfg = config.mds
    curve = scree(
        diss, k_max=mds_cfg.k_max, restarts=mds_cfg.restarts, seed=mds_cfg.seed
    )
    exports.write_scree_csv(analysis_dir / "scree.csv", curve)
    plots.plot_scree(analysis_dir / "scree.svg", curve)

    solution = nonmetric_mds(
        diss, k=mds_cfg.k, restarts=mds_cfg.restarts, seed=mds_cfg.seed
    )
    ids = list(diss.ids)
    exports.write_solution_csv(analysis_dir / "solution.csv", solution, ids)
    exports.write_solution_json(analysis_dir / "solution.json", solution)

    columns = catalog_columns(texture_set, transform=config.analysis.transform)
    vectors = [parameter_vector(column, solution) for column in columns]
    angles = pairwise_angles(vectors)
    correlations = dim_correlations(columns, solution)
    label_round = config.analysis.label_round
    named = [
        s
        for s in sessions
        if any(r.round_index == label_round and r.group_names for r in s.rounds)
    ]
    placements = label_positions(named, label_round, solution) if named else []

    report = exports.build_report(
        solution,
        curve,
        vectors,
        angles,
        correlations,
        placements=placements,
        participants=similarity.participants,
    )
    exports.write_report_json(analysis_dir / "report.json", report)

    plots.plot_projection(
        analysis_dir / "projection_d1_d2.svg", solution, ids,
        dims=(0, 1), vectors=vectors, placements=placements,
    )
    if solution.k >= 3:
        plots.plot_projection(
            analysis_dir / "projection_d2_d3.svg", solution, ids,
            dims=(1, 2), vectors=vectors,
        )
    if solution.k == 3:
        irregularity = next(v for v in vectors if v.name == "irregularity")
        plots.plot_plane_projection(
            analysis_dir / "projection_plane.svg", solution, ids,
            normal=irregularity, vectors=vectors,
        )
    return analysis_dir


def _read_similarity_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    ids = [int(v) for v in header[1:]]
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append([int(v) for v in cells[1:]])
    matrix = np.array(rows, dtype=float)
    if matrix.shape != (len(ids), len(ids)):
        raise ValueError(f"{path}: matrix is not square against its header")
    return tuple(ids), matrix


def cmd_mds(similarity_path, participants, out_dir, k, k_max, restarts, seed):
    """Embed a similarity CSV exported earlier (or by other tooling)."""
    ids, counts = _read_similarity_csv(similarity_path)
    similarity = SimilarityMatrix(
        ids=ids, counts=counts, participants=participants
    )
    diss = to_dissimilarity(similarity)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curve = scree(diss, k_max=k_max, restarts=restarts, seed=seed)
    exports.write_scree_csv(out / "scree.csv", curve)
    plots.plot_scree(out / "scree.svg", curve)
    solution = nonmetric_mds(diss, k=k, restarts=restarts, seed=seed)
    exports.write_solution_csv(out / "solution.csv", solution, list(ids))
    exports.write_solution_json(out / "solution.json", solution)
    return solution


def cmd_export_sweep(config: PipelineConfig, out_dir) -> Path:
    """Calibration chirp for measuring playback hardware response."""
    from .spectral import generate_sweep

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sweep = generate_sweep(
        SWEEP_START_HZ, SWEEP_END_HZ, SWEEP_DURATION_S, config.synthesis.fs_hz
    )
    exports.write_wav(out / "sweep.wav", sweep.samples, sweep.fs)
    exports.write_texture_csv(out / "sweep.csv", sweep.samples)
    current = to_current(sweep)
    exports.write_current_csv(out / "sweep_current.csv", current.samples)
    exports.write_json(
        out / "sweep.json",
        {
            "f_start_hz": SWEEP_START_HZ,
            "f_end_hz": SWEEP_END_HZ,
            "duration_s": SWEEP_DURATION_S,
            "fs_hz": config.synthesis.fs_hz,
            "files": ["sweep.wav", "sweep.csv", "sweep_current.csv"],
        },
    )
    return out / "sweep.json"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texturespace",
        description="friction-texture synthesis and perceptual-space analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, kmax=False):
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int, help="override every stage seed")
        p.add_argument("--out", help="output directory (default from config)")
        if kmax:
            p.add_argument("--kmax", type=int, help="scree dimension limit")
            p.add_argument("--restarts", type=int, help="optimizer restarts")

    add_common(sub.add_parser("synth", help="render the 24-texture catalog"))
    add_common(sub.add_parser("simulate", help="write simulated session files"))
    add_common(
        sub.add_parser("analyze", help="sessions -> embedding and report"),
        kmax=True,
    )

    mds_p = sub.add_parser("mds", help="embed a similarity CSV")
    mds_p.add_argument("--similarity", required=True, help="similarity CSV path")
    mds_p.add_argument(
        "--participants", type=int, required=True,
        help="participant count behind the matrix",
    )
    mds_p.add_argument("--out", required=True)
    mds_p.add_argument("--k", type=int, default=3)
    mds_p.add_argument("--kmax", type=int, default=5)
    mds_p.add_argument("--restarts", type=int, default=20)
    mds_p.add_argument("--seed", type=int, default=0)

    serve_p = sub.add_parser("serve", help="run the live-session service")
    add_common(serve_p)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)

    add_common(sub.add_parser("export-sweep", help="calibration chirp files"))
    return parser


def _resolve_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else default_config()
    return apply_overrides(
        config,
        seed=getattr(args, "seed", None),
        out=getattr(args, "out", None),
        kmax=getattr(args, "kmax", None),
        restarts=getattr(args, "restarts", None),
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "mds":
            cmd_mds(
                args.similarity, args.participants, args.out,
                k=args.k, k_max=args.kmax, restarts=args.restarts,
                seed=args.seed,
            )
            return EXIT_OK
        config = _resolve_config(args)
        out_dir = config.out_dir
        if args.command == "synth":
            manifest = cmd_synth(config, out_dir)
            print(f"wrote {manifest}")
        elif args.command == "simulate":
            paths = cmd_simulate(config, out_dir)
            print(f"wrote {len(paths)} sessions to {Path(out_dir) / 'sessions'}")
        elif args.command == "analyze":
            analysis_dir = cmd_analyze(config, out_dir)
            print(f"wrote analysis to {analysis_dir}")
        elif args.command == "export-sweep":
            sidecar = cmd_export_sweep(config, out_dir)
            print(f"wrote {sidecar}")
        elif args.command == "serve":
            from .service import create_app

            import uvicorn

            app = create_app(out_dir, seed=config.experiment.seed)
            uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
