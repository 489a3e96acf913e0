# salient/cli.py
"""
Batch entry point: `python cli.py <subcommand> ...`.

Exit codes: 0 success, 1 data error (JSON `{"error", "message"}` on stderr),
2 usage error (bad flags, missing input files). Every successful run emits a
manifest: at `--manifest`, else `<out>.manifest.json`, else one JSON line on stderr.
"""

import argparse
import asyncio
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from pydantic import BaseModel

from clustering import ClusterParams, consolidate_tracks
from config import APP_VERSION, Settings, load_settings, resolve_threads
from consolidation import assemble_dataset, render_overlays, split_dataset
from datasetio import read_detections, read_groundtruth, unknown_category_ids, write_dataset
from evalmetrics import COCO_IOU_THRESHOLDS, evaluate, report_to_json
from planskeleton import (
    DEFAULT_SKILLS_PATH, PlannerBackendError, build_prompt, build_schema, generate_plan, get_backend,
    load_skills, subsample_frames,
)
from planskeleton.backends import GEMINI_API_URL_BASE
from scenegraph import dump_graph, load_groups, load_observation_stream, replay
from synth import SynthConfig, generate, load_synth_config
from trackmodel import parse_trackset, write_trackset

logger = logging.getLogger("salient.cli")

EXIT_OK, EXIT_DATA_ERROR, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Raised for invocation problems that argparse cannot see (missing files, missing flag combinations)."""


class RunManifest(BaseModel):
    subcommand: str
    parameters: Dict[str, Any]
    inputs: Dict[str, str]
    tool_version: str
    wall_time_seconds: float
    run_sha256: str


# --- Helpers ---

def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _existing(path_text: Optional[str], flag: str) -> Optional[Path]:
    if path_text is None:
        return None
    path = Path(path_text)
    if not path.is_file():
        raise UsageError(f"{flag}: file not found: {path}")
    return path


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {value}")
    return value


def _ratio(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _plural(count: int, noun: str, plural: Optional[str] = None) -> str:
    return f"{count} {noun}" if count == 1 else f"{count} {plural or noun + 's'}"


def run_hash(subcommand: str, parameters: Dict[str, Any], inputs: Dict[str, str]) -> str:
    """Hash of everything that determines a run's output; wall time is not part of it."""
    canonical = json.dumps(
        {"subcommand": subcommand, "parameters": parameters, "inputs": inputs, "tool_version": APP_VERSION},
        sort_keys=True, separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def manifest_target(args: argparse.Namespace, out: Optional[Path]) -> Optional[Path]:
    """`--manifest` wins, then `<out>.manifest.json`; None means the manifest goes to stderr."""
    if args.manifest:
        return Path(args.manifest)
    if out is not None:
        return out.with_name(out.name + ".manifest.json")
    return None


def write_manifest(path: Optional[Path], subcommand: str, parameters: Dict[str, Any], inputs: Dict[str, str],
                   started: float) -> Optional[Path]:
    manifest = RunManifest(
        subcommand=subcommand, parameters=parameters, inputs=inputs, tool_version=APP_VERSION,
        wall_time_seconds=round(time.perf_counter() - started, 6),
        run_sha256=run_hash(subcommand, parameters, inputs),
    )
    if path is None:
        sys.stderr.write(json.dumps(manifest.model_dump()) + "\n")
        return None
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(manifest.model_dump(), indent=2) + "\n")
    logger.debug(f"Manifest written to {path}")
    return path


def _cluster_params(settings: Settings, args: argparse.Namespace) -> ClusterParams:
    values = settings.clustering.model_dump()
    if args.spatial_eps is not None:
        values["spatial_eps"] = args.spatial_eps
    if args.temporal_eps is not None:
        values["temporal_eps"] = args.temporal_eps
    if args.min_size is not None:
        values["spatial_min_size_policy"] = "fixed"
        values["spatial_min_size"] = args.min_size
    if args.metric is not None:
        values["spatial_metric"] = args.metric
    return ClusterParams.model_validate(values)


# --- Subcommands ---

def cmd_consolidate(args: argparse.Namespace, settings: Settings) -> int:
    started = time.perf_counter()
    tracks_path = _existing(args.tracks, "--tracks")
    out = Path(args.out)
    params = _cluster_params(settings, args)
    threads = resolve_threads(args.threads, settings)

    raw = tracks_path.read_bytes()
    source_sha256 = hashlib.sha256(raw).hexdigest()
    ts = parse_trackset(raw.decode("utf-8"), source_name=tracks_path.stem)
    result = consolidate_tracks(ts, params, threads=threads)
    ds = assemble_dataset(ts, result.assignment, params, source_sha256=source_sha256)
    write_dataset(ds, out)

    if args.val_ratio is not None:
        train, val = split_dataset(ds, args.val_ratio)
        write_dataset(train, out.with_name(f"{out.stem}.train{out.suffix}"))
        write_dataset(val, out.with_name(f"{out.stem}.val{out.suffix}"))
    if args.render_overlays:
        written = render_overlays(ds, args.render_overlays)
        logger.info(f"Rendered {len(written)} overlay images into {args.render_overlays}")

    parameters = {"clustering": params.describe(), "val_ratio": args.val_ratio}
    write_manifest(manifest_target(args, out), "consolidate", parameters, {"tracks": source_sha256}, started)
    discarded = len(result.assignment.discarded())
    print(f"{_plural(result.assignment.label_count, 'object')}, {_plural(discarded, 'track')} discarded")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    started = time.perf_counter()
    dets_path = _existing(args.dets, "--dets")
    gt_path = _existing(args.gt, "--gt")
    cutoff = args.score_cutoff if args.score_cutoff is not None else settings.evaluation.score_cutoff

    dets = read_detections(dets_path)
    gts = read_groundtruth(gt_path)
    unknown_category_ids(dets, gts)
    report = evaluate(dets, gts, score_cutoff=cutoff, iou_thresholds=COCO_IOU_THRESHOLDS)
    payload = json.dumps(report_to_json(report), indent=2) + "\n"

    sys.stderr.write(f"# IoU thresholds: {' '.join(f'{t:.2f}' for t in COCO_IOU_THRESHOLDS)}; score cutoff {cutoff}\n")
    out = Path(args.out) if args.out else None
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(payload)
    sys.stdout.write(payload)
    inputs = {"dets": _sha256_file(dets_path), "gt": _sha256_file(gt_path)}
    write_manifest(manifest_target(args, out), "evaluate",
                   {"score_cutoff": cutoff, "iou_thresholds": list(COCO_IOU_THRESHOLDS)}, inputs, started)
    return EXIT_OK


def cmd_scenegraph_replay(args: argparse.Namespace, settings: Settings) -> int:
    started = time.perf_counter()
    stream_path = _existing(args.stream, "--stream")
    groups_path = _existing(args.groups, "--groups")
    out = Path(args.dump)

    items = load_observation_stream(stream_path)
    groups = load_groups(groups_path) if groups_path else []
    graph = replay(items, settings.scenegraph, groups)
    dump_graph(graph, out)

    inputs = {"stream": _sha256_file(stream_path)}
    if groups_path:
        inputs["groups"] = _sha256_file(groups_path)
    write_manifest(manifest_target(args, out), "scenegraph-replay", {"fitness": settings.scenegraph.model_dump()},
                   inputs, started)
    print(f"{_plural(len(graph.nodes), 'node')} after {_plural(len(items), 'stream item')}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    started = time.perf_counter()
    config_path = _existing(args.config, "--config")
    out = Path(args.out)

    cfg = load_synth_config(config_path) if config_path else SynthConfig()
    overrides = {k: v for k, v in (("preset", args.preset), ("seed", args.seed)) if v is not None}
    if overrides:
        cfg = SynthConfig.model_validate({**cfg.model_dump(), **overrides})
    ts, truth = generate(cfg)
    write_trackset(ts, out)
    truth_path = Path(args.truth) if args.truth else out.with_name(f"{out.stem}.truth.json")
    with open(truth_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(truth.model_dump(), indent=2, sort_keys=True) + "\n")

    inputs = {"config": _sha256_file(config_path)} if config_path else {}
    write_manifest(manifest_target(args, out), "synth", {"synth": cfg.model_dump(mode="json")}, inputs, started)
    print(f"{_plural(len(ts.tracks), 'track')}, {_plural(ts.box_count(), 'box', 'boxes')} written to {out}")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace, settings: Settings) -> int:
    started = time.perf_counter()
    skills_path = _existing(args.skills, "--skills") or DEFAULT_SKILLS_PATH
    mock_paths = [_existing(p, "--mock-response") for p in args.mock_response or []]
    skills = load_skills(skills_path)

    if args.emit_prompt or args.emit_schema:
        emitted = "prompt" if args.emit_prompt else "schema"
        if args.emit_prompt:
            sys.stdout.write(build_prompt(skills))
        else:
            sys.stdout.write(json.dumps(build_schema(skills), indent=2) + "\n")
        write_manifest(manifest_target(args, None), "plan", {"emit": emitted},
                       {"skills": _sha256_file(Path(skills_path))}, started)
        return EXIT_OK
    if not args.out:
        raise UsageError("--out is required unless --emit-prompt or --emit-schema is given")

    out = Path(args.out)
    backend_name = args.backend or settings.planner.backend
    planner = settings.planner
    backend = get_backend(
        backend_name, skills,
        api_key=planner.api_key or "", model=planner.model,
        endpoint=planner.endpoint or GEMINI_API_URL_BASE, timeout=planner.timeout,
        mock_responses=[p.read_text(encoding="utf-8") for p in mock_paths],
    )
    frames = subsample_frames(args.frame_count, args.fps, planner.sample_hz) if args.frame_count else []
    result = asyncio.run(generate_plan(skills, backend, frames))

    payload = {
        "semantic_plan": result.semantic.model_dump(),
        "full_plan": result.full.model_dump(),
        "skeleton": result.full.skeleton(),
    }
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(payload, indent=2) + "\n")

    inputs = {"skills": _sha256_file(Path(skills_path))}
    inputs.update({f"mock_response_{i}": _sha256_file(p) for i, p in enumerate(mock_paths)})
    parameters = {"backend": backend_name, "model": planner.model, "frames": frames}
    write_manifest(manifest_target(args, out), "plan", parameters, inputs, started)
    for line in result.full.skeleton():
        print(line)
    return EXIT_OK


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    common.add_argument("--threads", type=int, default=None, help="Worker threads (0 = one per CPU; default from settings)")
    common.add_argument("--settings", default=None, help="Settings YAML (default: config/salient.yaml)")
    common.add_argument("--manifest", default=None, metavar="PATH",
                        help="Run manifest path (default: <out>.manifest.json, or stderr when nothing is written)")
    common.add_argument("--version", action="version", version=f"salient {APP_VERSION}")

    parser = argparse.ArgumentParser(prog="salient", description="Salient-object dataset tooling")
    parser.add_argument("--version", action="version", version=f"salient {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("consolidate", parents=[common], help="Cluster tracks into objects and write a COCO dataset")
    p.add_argument("--tracks", required=True, help="Track JSONL file")
    p.add_argument("--out", required=True, help="Dataset JSON output path")
    p.add_argument("--spatial-eps", type=_unit_interval, default=None)
    p.add_argument("--temporal-eps", type=_unit_interval, default=None)
    p.add_argument("--min-size", type=_positive_int, default=None, help="Fixed per-frame minimum cluster size")
    p.add_argument("--metric", choices=["bbox_iou", "mask_iou"], default=None)
    p.add_argument("--val-ratio", type=_ratio, default=None, help="Also write .train/.val splits by frame")
    p.add_argument("--render-overlays", default=None, metavar="DIR", help="Write one annotated PNG per frame")
    p.set_defaults(handler=cmd_consolidate)

    p = sub.add_parser("evaluate", parents=[common], help="Score detections against ground truth")
    p.add_argument("--dets", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--score-cutoff", type=_ratio, default=None)
    p.add_argument("--out", default=None, help="Also write the report JSON here")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("scenegraph-replay", parents=[common], help="Replay an observation stream into a scene graph")
    p.add_argument("--stream", required=True)
    p.add_argument("--groups", default=None)
    p.add_argument("--dump", required=True)
    p.set_defaults(handler=cmd_scenegraph_replay)

    p = sub.add_parser("synth", parents=[common], help="Generate a synthetic track set with ground truth")
    p.add_argument("--config", default=None, help="Flat YAML synth config")
    p.add_argument("--out", required=True, help="Track JSONL output path")
    p.add_argument("--truth", default=None, help="Ground-truth JSON path (default: <out stem>.truth.json)")
    p.add_argument("--preset", choices=["random", "canonical"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("plan", parents=[common], help="Build the planner prompt and expand a plan skeleton")
    p.add_argument("--skills", default=None, help="Skill definitions JSON (default: built-in Pick/Place/Search)")
    p.add_argument("--backend", choices=["mock", "http"], default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--emit-prompt", action="store_true", help="Print the planner prompt and exit")
    p.add_argument("--emit-schema", action="store_true", help="Print the response JSON schema and exit")
    p.add_argument("--mock-response", action="append", default=None, metavar="FILE",
                   help="Canned planner reply for the mock backend (repeatable)")
    p.add_argument("--frame-count", type=int, default=0, help="Demonstration length in frames")
    p.add_argument("--fps", type=float, default=30.0)
    p.set_defaults(handler=cmd_plan)
    return parser


def _report_data_error(e: BaseException) -> int:
    logger.error(f"{type(e).__name__}: {e}", exc_info=logger.isEnabledFor(logging.DEBUG))
    sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
    return EXIT_DATA_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.threads is not None and args.threads < 0:
        parser.print_usage(sys.stderr)
        sys.stderr.write("salient: error: --threads must be >= 0\n")
        return EXIT_USAGE

    try:
        settings = load_settings(args.settings)
        return args.handler(args, settings)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"salient {args.command}: error: {e}\n")
        return EXIT_USAGE
    except (ValueError, OSError, PlannerBackendError) as e:
        return _report_data_error(e)


if __name__ == "__main__":
    sys.exit(main())
