"""Command-line entry point: cadact build|stats|eval|vqa|validate."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .compiler import CompileConfig
from .errors import CadactError
from .metrics import SUCCESS_CD


def _seed_default() -> int:
    return int(os.environ.get("CADACT_SEED", "0"))


def _add_build(sub) -> None:
    p = sub.add_parser("build", help="compile, simulate, filter, persist episodes")
    p.add_argument("--input", required=True, help=".cadseq file, one sequence per line")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--seed", type=int, default=_seed_default())
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--frame-px", type=int, default=224)
    p.add_argument("--threshold", type=float, default=SUCCESS_CD)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--no-delays", action="store_true")
    p.add_argument("--no-jitter", action="store_true")
    p.add_argument("--no-zoom", action="store_true")
    p.add_argument("--no-visibility", action="store_true")


def _cmd_build(args) -> int:
    from .dataset import BuildConfig, build_from_file

    input_path = Path(args.input)
    if not input_path.is_file():
        print(f"error: input {input_path} not found", file=sys.stderr)
        return 2
    cfg = BuildConfig(
        out_dir=Path(args.out), seed=args.seed, workers=args.workers,
        frame_px=args.frame_px, threshold=args.threshold, n_samples=args.samples,
        compile=CompileConfig(
            delays=not args.no_delays, jitter=not args.no_jitter,
            zoom=not args.no_zoom, visibility_toggles=not args.no_visibility,
        ),
    )
    summary = build_from_file(input_path, cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_validate(args) -> int:
    from .sequences import parse_sequence, sequence_stats, validate

    path = Path(args.input)
    if not path.is_file():
        print(f"error: input {path} not found", file=sys.stderr)
        return 2
    n_bad = 0
    n_parse_fail = 0
    parsed = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            seq = parse_sequence(stripped, source_id=f"{path.stem}:{lineno:05d}")
        except CadactError as exc:
            print(f"line {lineno}: PARSE {type(exc).__name__}: {exc}")
            n_parse_fail += 1
            n_bad += 1
            continue
        parsed.append(seq)
        report = validate(seq)
        for rec, code, msg in report.violations:
            print(f"line {lineno}: record {rec}: {code}: {msg}")
        n_bad += 0 if report.ok else 1
    print(f"{len(parsed) + n_parse_fail} sequences, {n_bad} with violations")
    if args.stats and parsed:
        for row in sequence_stats(parsed).csv_rows():
            print(row)
    return 0


def _cmd_stats(args) -> int:
    from .dataset import cmd_stats, stats_to_csv

    stats = cmd_stats(Path(args.dataset))
    out_dir = Path(args.out) if args.out else None
    csvs = stats_to_csv(stats)
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in csvs.items():
            (out_dir / f"{name}.csv").write_text(text)
        print(f"wrote {len(csvs)} tables to {out_dir}")
    else:
        print(json.dumps(stats, indent=2))
    return 0


def _cmd_eval(args) -> int:
    from .dataset import cmd_eval

    report = cmd_eval(Path(args.pred), Path(args.gt), threshold=args.threshold)
    payload = report.to_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "eval.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        (out_dir / "eval.csv").write_text("\n".join(report.csv_rows()) + "\n")
    return 0


def _cmd_vqa(args) -> int:
    from .vqa import FAMILIES, cmd_vqa

    families = tuple(args.families.split(",")) if args.families else FAMILIES
    unknown = [f for f in families if f not in FAMILIES]
    if unknown:
        print(f"error: unknown families {unknown}", file=sys.stderr)
        return 2
    out = cmd_vqa(Path(args.dataset), Path(args.out), args.n, args.seed, families)
    counts = {fam: len(qs) for fam, qs in out.items()}
    print(json.dumps(counts, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cadact")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_build(sub)

    p = sub.add_parser("validate", help="parse and validate a .cadseq file")
    p.add_argument("--input", required=True)
    p.add_argument("--stats", action="store_true",
                   help="also print sequence-level histogram CSV rows")

    p = sub.add_parser("stats", help="dataset action statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="compare predicted vs ground-truth episodes")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--threshold", type=float, default=SUCCESS_CD)
    p.add_argument("--out", default=None)

    p = sub.add_parser("vqa", help="generate VQA questions from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=_seed_default())
    p.add_argument("--families", default=None,
                   help="comma-separated subset of families")

    args = parser.parse_args(argv)
    try:
        if args.command == "build":
            return _cmd_build(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "vqa":
            return _cmd_vqa(args)
    except CadactError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
