#
# MIT License
#
# (C) Copyright 2026 Hewlett Packard Enterprise Development LP
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#
"""
bangkit command line: synth, track, eval, stats, toycheck and framestudy.

Every subcommand loads the YAML configuration (--config), applies the flag
overrides and writes JSON reports. Exit codes: 0 success, 1 usage or I/O
error, 2 unconverged result, 3 acceptance failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import NoReturn, Optional, Sequence
from src.lib.bang_constants import (
    DEFAULT_CFG_SCALE,
    DEFAULT_DIFFUSION_STEPS,
    EXIT_ACCEPTANCE,
    EXIT_OK,
    EXIT_UNCONVERGED,
    EXIT_USAGE,
    TRAJECTORY_NAME,
)
from src.lib.bang_logging import configure_logging
from src.lib.config import PipelineConfig, apply_overrides, load_config
from src.lib.errors import BangError, ConfigError
from src.lib.schema import write_json
from src.lib.version import get_version
from src.evaluation.framestudy import frame_count_study, masking_ablation, study_assets
from src.evaluation.metrics import evaluate_tracking
from src.evaluation.stats import dataset_stats, load_dataset, write_histogram_csv
from src.cli.driver import run_synth
from src.synth.annotation import make_client
from src.synth.manifest import load_sequence
from src.toy.checks import run_toycheck
from src.track.tracking import (
    build_frame_grids,
    export_reassembly,
    extract_exploded_parts,
    read_trajectory,
    track_parts,
    write_trajectory,
)

logger = logging.getLogger(__name__)

EVAL_NAME: str = "eval.json"
STATS_NAME: str = "stats.json"
TOYCHECK_NAME: str = "toycheck.json"
FRAMESTUDY_NAME: str = "framestudy.json"


class BangArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _dims(text: str) -> dict[str, str]:
    pairs = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected key=value pairs, got {item!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def build_parser() -> argparse.ArgumentParser:
    """The bangkit argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--seed", type=int, help="global seed (explosion, tracking, sampling)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker pool size")
    common.add_argument("--sdf-res", type=int, dest="sdf_res", help="SDF grid resolution")
    common.add_argument("--log-level", dest="log_level", help="error, info or debug; overrides BANGKIT_LOG")

    parser = BangArgumentParser(prog="bangkit", description="Exploded-dynamics toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=BangArgumentParser)

    synth = sub.add_parser("synth", parents=[common], help="synthesize exploded sequences")
    synth.add_argument("input", help="directory of .obj meshes")

    track = sub.add_parser("track", parents=[common], help="recover part trajectories")
    track.add_argument("sequence", help="sequence directory")
    track.add_argument("--times", type=_float_list, help="frame times for a directory without manifest")
    track.add_argument("--no-mask-overlaps", action="store_true", dest="no_mask_overlaps")
    track.add_argument("--export-path", dest="export_path", help="write reassembled_<index>.obj here")

    evaluate = sub.add_parser("eval", parents=[common], help="evaluate a tracked sequence")
    evaluate.add_argument("sequence", help="sequence directory with manifest and trajectory")
    evaluate.add_argument("--trajectory", help=f"trajectory file (default <sequence>/{TRAJECTORY_NAME})")

    stats = sub.add_parser("stats", parents=[common], help="dataset statistics")
    stats.add_argument("dataset", help="directory of sequence directories")
    stats.add_argument("--csv", help="also write the histograms as CSV")

    toy = sub.add_parser("toycheck", parents=[common], help="toy network invariant suite")
    toy.add_argument("--dims", type=_dims, help="toy dimensions, e.g. channels=24,heads=4")
    toy.add_argument("--steps", type=int, help="diffusion steps")
    toy.add_argument("--cfg-scale", type=float, dest="cfg_scale", help="guidance scale")

    study = sub.add_parser("framestudy", parents=[common], help="frame-count study")
    study.add_argument("--frames", type=_int_list, default=[2, 3, 4, 5])
    study.add_argument("--assets", type=int, default=4)
    study.add_argument("--overlap", action="store_true", help="use interpenetrating assemblies")
    study.add_argument("--ablation", action="store_true", help="also compare tracking without masking")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Configuration file plus flag overrides."""
    config = load_config(args.config)
    overrides: dict[str, object] = {
        "seed": args.seed,
        "explosion.seed": args.seed,
        "track.seed": args.seed,
        "out": args.out,
        "threads": args.threads,
        "sdf_resolution": args.sdf_res,
    }
    if getattr(args, "no_mask_overlaps", False):
        overrides["track.mask_overlaps"] = False
    for key, value in (getattr(args, "dims", None) or {}).items():
        overrides[f"toy.{key}"] = value
    return apply_overrides(config, overrides)


def cmd_synth(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Synthesize every mesh of the input directory."""
    outcomes, summary = run_synth(args.input, cfg, make_client(cfg.annotation))
    print(f"{'asset':<32} {'status':<9} reasons")
    for outcome in outcomes:
        record = outcome.record()
        print(f"{record['asset_id']:<32} {record['status']:<9} {'; '.join(record['reasons'])}")
    print(f"accepted {summary['accepted']}, rejected {summary['rejected']}, failed {summary['failed']}")
    return EXIT_OK


def cmd_track(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Track a sequence directory and write trajectory.json."""
    seq, _ = load_sequence(args.sequence, args.times)
    extracted = extract_exploded_parts(seq, cfg.track.weld_eps)
    grids = build_frame_grids(seq, cfg.sdf_resolution, cfg.threads)
    sol = track_parts(seq, grids, cfg.track, parts=extracted.parts, threads=cfg.threads)
    target = Path(args.out) if args.out else Path(args.sequence)
    target.mkdir(parents=True, exist_ok=True)
    write_trajectory(sol, target / TRAJECTORY_NAME)
    if args.export_path:
        export_reassembly(seq, sol, args.export_path, extracted.parts)
    print(f"{'part':<6} {'objective':>12} converged  v")
    for index, (v, objective, converged) in enumerate(
        zip(sol.translations, sol.part_objectives, sol.part_converged)
    ):
        print(f"{index:<6} {objective:>12.6g} {str(converged):<10} {v.tolist()}")
    if not sol.converged:
        logger.warning("Tracking did not converge; best iterate written")
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Evaluate a tracked sequence against its manifest ground truth."""
    seq, manifest = load_sequence(args.sequence)
    sol = read_trajectory(args.trajectory or Path(args.sequence) / TRAJECTORY_NAME)
    start = time.perf_counter()
    report = evaluate_tracking(
        seq,
        sol,
        asset_id=manifest["asset_id"] if manifest else Path(args.sequence).name,
        resolution=cfg.sdf_resolution,
        seed=cfg.seed,
    )
    document = report.to_document()
    seconds = time.perf_counter() - start
    logger.info("Evaluated %s in %.2fs", report.asset_id, seconds)
    target = Path(args.out) if args.out else Path(args.sequence)
    target.mkdir(parents=True, exist_ok=True)
    write_json(document, target / EVAL_NAME)
    print(f"asset {report.asset_id}: wIoU {report.wiou:.4f}, SDF objective {report.sdf_objective:.6g} ({seconds:.2f}s)")
    for index, iou in enumerate(report.per_part_iou):
        print(f"  part {index}: IoU {iou:.4f} (gt {report.matching[index]})")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Histograms over a dataset directory."""
    _, manifests, parts = load_dataset(args.dataset)
    stats = dataset_stats(manifests, parts)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(stats.to_document(), out / STATS_NAME)
    if args.csv:
        write_histogram_csv(stats, args.csv)
    print(f"{stats.asset_count} asset(s)")
    for name, hist in stats.histograms().items():
        print(f"{name:<20} range [{hist.edges[0]:.4g}, {hist.edges[-1]:.4g}] counts {hist.counts.tolist()}")
    return EXIT_OK


def cmd_toycheck(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Run the toy network invariant suite."""
    report = run_toycheck(
        cfg.toy,
        cfg.seed,
        steps=args.steps if args.steps is not None else DEFAULT_DIFFUSION_STEPS,
        cfg_scale=args.cfg_scale if args.cfg_scale is not None else DEFAULT_CFG_SCALE,
    )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(report.to_document(), out / TOYCHECK_NAME)
    for item in report.checks:
        status = "PASS" if item.passed else "FAIL"
        print(f"{item.name:<30} {status} error {item.error:.3g} <= {item.tolerance:.3g} ({item.seconds:.2f}s)")
    return EXIT_OK if report.passed else EXIT_ACCEPTANCE


def cmd_framestudy(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Frame-count study (and optional masking ablation) over synthetic assemblies."""
    if args.assets < 1 or any(frames < 2 for frames in args.frames):
        raise ConfigError("--assets must be >= 1 and every --frames entry >= 2")
    assets = study_assets(args.assets, cfg.seed, overlap=args.overlap)
    rows = frame_count_study(assets, args.frames, cfg)
    document: dict[str, object] = {"rows": [row.to_document() for row in rows]}
    print(f"{'frames':>6} {'wIoU':>8} {'SDF':>10} {'seconds':>8}")
    for row in rows:
        print(f"{row.frames:>6} {row.mean_wiou:>8.4f} {row.mean_sdf_objective:>10.6f} {row.mean_seconds:>8.2f}")
    if args.ablation:
        ablation = masking_ablation(assets, cfg)
        document["ablation"] = [row.to_document() for row in ablation]
        for entry in ablation:
            print(
                f"{entry.asset_id}: masked wIoU {entry.masked.wiou:.4f} / unmasked {entry.unmasked.wiou:.4f}"
            )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(document, out / FRAMESTUDY_NAME)
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "track": cmd_track,
    "eval": cmd_eval,
    "stats": cmd_stats,
    "toycheck": cmd_toycheck,
    "framestudy": cmd_framestudy,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except BangError as e:
        logger.error("%s failed: %s", args.command, e)
        return e.exit_code
    except OSError as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
