"""Command-line entry point: every pipeline stage as a subcommand.

Exit codes: 0 success, 1 domain error (bad data, upstream failure),
2 usage error. Diagnostics go to stderr; data goes to files or stdout.
An optional JSON config file may supply flag defaults (keys are long flag
names with dashes replaced by underscores); explicit flags win, and
randomized subcommands always require an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import CorpusFormatError, CorpusSplit, load_jsonl, select, split, write_jsonl
from .curation import CurationConfig, curate, write_verdicts
from .evalharness import (
    StudyError,
    load_key,
    load_likert,
    load_responses,
    prepare_study,
    run_auto_eval,
    summarize_likert,
    tally_study,
)
from .generation import GeneratorSpec, RemoteGeneratorError, make_generator
from .service import DEFAULT_BIND, DEFAULT_CORS_ORIGINS, DEFAULT_MAX_BODY_BYTES, ServiceConfig
from . import service


class UsageError(Exception):
    pass


_CONFIG_KEYS = {
    "in",
    "out",
    "report",
    "csv",
    "sheet",
    "key",
    "responses",
    "scores",
    "split_file",
    "split",
    "generator",
    "gen_a",
    "gen_b",
    "endpoint",
    "endpoint_a",
    "endpoint_b",
    "timeout",
    "n_items",
    "bind",
    "cors_origin",
    "max_body_bytes",
    "min_title_words",
    "max_title_words",
    "missing_threshold",
    "extractive_threshold",
}


def _load_config(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    config = json.loads(Path(known.config).read_text(encoding="utf-8"))
    if not isinstance(config, dict):
        raise UsageError("config file must contain a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return config


def _add_generator_flags(parser: argparse.ArgumentParser, config: dict) -> None:
    parser.add_argument(
        "--generator",
        choices=["lead", "keyword", "remote"],
        default=config.get("generator", "lead"),
        help="title generator to run",
    )
    parser.add_argument(
        "--endpoint",
        default=config.get("endpoint"),
        help="remote model server URL (remote generator only)",
    )
    parser.add_argument(
        "--timeout",
        type=float,
        default=config.get("timeout", 10.0),
        help="remote request timeout in seconds",
    )


def _generator_spec(kind: str, endpoint: str | None, timeout: float) -> GeneratorSpec:
    if kind == "remote" and not endpoint:
        raise UsageError("--generator remote requires --endpoint")
    if kind == "remote":
        return GeneratorSpec(kind="remote", endpoint=endpoint, timeout=timeout)
    return GeneratorSpec(kind=kind)


def build_parser(config: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="titlegen",
        description="Issue title suggestion toolkit: curation, evaluation, serving, studies.",
    )
    parser.add_argument("--version", action="version", version=f"titlegen {__version__}")
    parser.add_argument("--config", help="JSON file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("curate", help="apply the three selection rules", formatter_class=fmt)
    p.add_argument("--in", dest="in_path", default=config.get("in"), required="in" not in config,
                   help="input corpus JSONL")
    p.add_argument("--out", default=config.get("out"), required="out" not in config,
                   help="kept-corpus JSONL output")
    p.add_argument("--report", default=config.get("report"), help="verdict report JSONL output")
    p.add_argument("--min-title-words", type=int, default=config.get("min_title_words", 5),
                   help="reject titles with fewer words")
    p.add_argument("--max-title-words", type=int, default=config.get("max_title_words", 15),
                   help="reject titles with more words")
    p.add_argument("--missing-threshold", type=float, default=config.get("missing_threshold", 0.7),
                   help="reject when missing-word ratio exceeds this")
    p.add_argument("--extractive-threshold", type=float,
                   default=config.get("extractive_threshold", 0.7),
                   help="reject when shared-run ratio exceeds this")

    p = sub.add_parser("split", help="deterministic 8:1:1 corpus split", formatter_class=fmt)
    p.add_argument("--in", dest="in_path", default=config.get("in"), required="in" not in config,
                   help="input corpus JSONL")
    p.add_argument("--seed", type=int, required=True, help="shuffle seed (required)")
    p.add_argument("--out", default=config.get("out"), required="out" not in config,
                   help="split JSON output")

    p = sub.add_parser("eval", help="automatic ROUGE evaluation", formatter_class=fmt)
    p.add_argument("--in", dest="in_path", default=config.get("in"), required="in" not in config,
                   help="corpus JSONL with reference titles")
    p.add_argument("--split-file", default=config.get("split_file"),
                   help="split JSON produced by the split subcommand")
    p.add_argument("--split", choices=["train", "valid", "test"], default=config.get("split"),
                   help="evaluate only this part of the split")
    _add_generator_flags(p, config)
    p.add_argument("--csv", default=config.get("csv"), help="per-example scores CSV output")
    p.add_argument("--report", default=config.get("report"), help="report JSON output file")

    p = sub.add_parser("serve", help="run the suggestion REST service", formatter_class=fmt)
    p.add_argument("--bind", default=None,
                   help=f"host:port to bind (default {DEFAULT_BIND}; env TITLEGEN_BIND)")
    p.add_argument("--generator", choices=["lead", "keyword", "remote"], default=None,
                   help="generator kind (env TITLEGEN_GENERATOR)")
    p.add_argument("--endpoint", default=None,
                   help="remote model server URL (env TITLEGEN_ENDPOINT)")
    p.add_argument("--timeout", type=float, default=None,
                   help="remote request timeout in seconds (env TITLEGEN_TIMEOUT)")
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed CORS origin, repeatable (env TITLEGEN_CORS_ORIGINS, comma-separated)")
    p.add_argument("--max-body-bytes", type=int, default=None,
                   help="request body size limit (env TITLEGEN_MAX_BODY_BYTES)")

    p = sub.add_parser("suggest", help="suggest a title for one description", formatter_class=fmt)
    _add_generator_flags(p, config)
    p.add_argument("--in", dest="in_path", default=config.get("in"),
                   help="description file (default: read stdin)")

    p = sub.add_parser("study-prepare", help="build a blinded A/B study sheet", formatter_class=fmt)
    p.add_argument("--in", dest="in_path", default=config.get("in"), required="in" not in config,
                   help="test corpus JSONL")
    p.add_argument("--gen-a", choices=["lead", "keyword", "remote"],
                   default=config.get("gen_a", "lead"), help="generator A")
    p.add_argument("--gen-b", choices=["lead", "keyword", "remote"],
                   default=config.get("gen_b", "keyword"), help="generator B")
    p.add_argument("--endpoint-a", default=config.get("endpoint_a"),
                   help="remote URL for generator A")
    p.add_argument("--endpoint-b", default=config.get("endpoint_b"),
                   help="remote URL for generator B")
    p.add_argument("--timeout", type=float, default=config.get("timeout", 10.0),
                   help="remote request timeout in seconds")
    p.add_argument("--n-items", type=int, default=config.get("n_items", 30),
                   help="issues to sample")
    p.add_argument("--seed", type=int, required=True, help="sampling seed (required)")
    p.add_argument("--sheet", default=config.get("sheet"), required="sheet" not in config,
                   help="blinded sheet JSONL output")
    p.add_argument("--key", default=config.get("key"), required="key" not in config,
                   help="de-blinding key JSON output")

    p = sub.add_parser("study-tally", help="de-blind responses and count preferences",
                       formatter_class=fmt)
    p.add_argument("--responses", default=config.get("responses"),
                   required="responses" not in config, help="responses JSONL")
    p.add_argument("--key", default=config.get("key"), required="key" not in config,
                   help="de-blinding key JSON")

    p = sub.add_parser("likert", help="summarize usability scores", formatter_class=fmt)
    p.add_argument("--scores", default=config.get("scores"), required="scores" not in config,
                   help="likert scores JSONL")

    return parser


def cmd_curate(args: argparse.Namespace) -> int:
    corpus = load_jsonl(args.in_path)
    cfg = CurationConfig(
        min_title_words=args.min_title_words,
        max_title_words=args.max_title_words,
        missing_ratio_threshold=args.missing_threshold,
        extractive_ratio_threshold=args.extractive_threshold,
    )
    kept, verdicts = curate(corpus, cfg)
    write_jsonl(kept, args.out)
    if args.report:
        write_verdicts(verdicts, args.report)
    print(f"kept {len(kept.issues)} of {len(corpus.issues)} issues", file=sys.stderr)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    corpus = load_jsonl(args.in_path)
    result = split(corpus, args.seed)
    Path(args.out).write_text(result.to_json() + "\n", encoding="utf-8")
    print(
        f"split {len(corpus.issues)} issues into "
        f"{len(result.train)}/{len(result.valid)}/{len(result.test)}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    corpus = load_jsonl(args.in_path)
    if args.split:
        if not args.split_file:
            raise UsageError("--split requires --split-file")
        parts = CorpusSplit.from_json(Path(args.split_file).read_text(encoding="utf-8"))
        corpus = select(corpus, getattr(parts, args.split))
    spec = _generator_spec(args.generator, args.endpoint, args.timeout)
    report, _rows = run_auto_eval(corpus, spec, csv_path=args.csv)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.to_json())
    return 0


def _env(name: str) -> str | None:
    value = os.environ.get(name)
    return value if value else None


def resolve_service_config(args: argparse.Namespace, config: dict | None = None) -> ServiceConfig:
    # Precedence per option: flag > environment > config file > built-in default.
    config = config or {}
    bind = args.bind or _env("TITLEGEN_BIND") or config.get("bind") or DEFAULT_BIND
    kind = args.generator or _env("TITLEGEN_GENERATOR") or config.get("generator") or "lead"
    endpoint = args.endpoint or _env("TITLEGEN_ENDPOINT") or config.get("endpoint")
    if args.timeout is not None:
        timeout = args.timeout
    else:
        timeout = float(_env("TITLEGEN_TIMEOUT") or config.get("timeout") or 10.0)
    if args.cors_origin is not None:
        origins = tuple(args.cors_origin)
    elif _env("TITLEGEN_CORS_ORIGINS"):
        origins = tuple(o.strip() for o in _env("TITLEGEN_CORS_ORIGINS").split(",") if o.strip())
    elif config.get("cors_origin"):
        origins = tuple(config["cors_origin"])
    else:
        origins = DEFAULT_CORS_ORIGINS
    if args.max_body_bytes is not None:
        max_body = args.max_body_bytes
    else:
        max_body = int(_env("TITLEGEN_MAX_BODY_BYTES") or config.get("max_body_bytes") or DEFAULT_MAX_BODY_BYTES)
    return ServiceConfig(
        bind_address=bind,
        generator=_generator_spec(kind, endpoint, timeout),
        max_body_bytes=max_body,
        cors_allowed_origins=origins,
    )


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = resolve_service_config(args, getattr(args, "_config", None))
    print(f"serving {cfg.generator.label} generator on {cfg.bind_address}", file=sys.stderr)
    service.run(cfg)
    return 0


def cmd_suggest(args: argparse.Namespace) -> int:
    if args.in_path:
        description = Path(args.in_path).read_text(encoding="utf-8")
    else:
        description = sys.stdin.read()
    spec = _generator_spec(args.generator, args.endpoint, args.timeout)
    suggestion = make_generator(spec)(description)
    print(json.dumps({"title": suggestion.title, "generator": suggestion.generator_name}))
    return 0


def cmd_study_prepare(args: argparse.Namespace) -> int:
    corpus = load_jsonl(args.in_path)
    spec_a = _generator_spec(args.gen_a, args.endpoint_a, args.timeout)
    spec_b = _generator_spec(args.gen_b, args.endpoint_b, args.timeout)
    items, _key = prepare_study(
        corpus,
        spec_a,
        spec_b,
        n_items=args.n_items,
        seed=args.seed,
        sheet_path=args.sheet,
        key_path=args.key,
    )
    print(f"wrote {len(items)} study items to {args.sheet}, key to {args.key}", file=sys.stderr)
    return 0


def cmd_study_tally(args: argparse.Namespace) -> int:
    tally = tally_study(load_responses(args.responses), load_key(args.key))
    print(tally.to_json())
    return 0


def cmd_likert(args: argparse.Namespace) -> int:
    print(summarize_likert(load_likert(args.scores)).to_json())
    return 0


_HANDLERS = {
    "curate": cmd_curate,
    "split": cmd_split,
    "eval": cmd_eval,
    "serve": cmd_serve,
    "suggest": cmd_suggest,
    "study-prepare": cmd_study_prepare,
    "study-tally": cmd_study_tally,
    "likert": cmd_likert,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = _load_config(argv)
        args = build_parser(config).parse_args(argv)
        args._config = config
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"titlegen: {exc}", file=sys.stderr)
        return 2
    except (CorpusFormatError, StudyError, RemoteGeneratorError) as exc:
        print(f"titlegen: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"titlegen: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
