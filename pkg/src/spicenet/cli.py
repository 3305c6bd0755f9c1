"""Command line entry point: ``spicenet <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 lint errors remain,
3 LLM transport failure. Data goes to stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .annotation import (
    Annotation,
    UnboundTerminals,
    annotate,
    annotation_to_netlist,
    boxes_from_json,
    boxes_from_yolo,
    export_annotation,
    segments_from_json,
    segments_to_json,
)
from .ged import GedCostConfig, similarity
from .geometry import DEFAULT_RADIUS, ClusterConfig, cluster_segments, mask_segments
from .graph import GraphMode
from .lint import has_errors, lint, render_report
from .llm.bench import DEFAULT_SAMPLES, DEFAULT_THRESHOLD, DEFAULT_WORKERS, default_suite, load_suite, run_benchmark
from .llm.client import DEFAULT_API_KEY_ENV, HttpClient, ReplayClient, TransportError
from .llm.dataset import STAT_FIELDS, DatasetRecord, export_finetune_records, histogram_csv, histograms
from .llm.prompts import NoNetlistFound
from .llm.repair import DEFAULT_MAX_ITERS, RepairAborted, generate_from_annotation
from .spice import NetlistError, canonicalize, netlist_stats, parse_netlist, serialize_netlist

log = logging.getLogger("spicenet")

EXIT_OK, EXIT_USAGE, EXIT_LINT, EXIT_TRANSPORT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _read_netlist(path: str):
    return parse_netlist(Path(path).read_text(encoding="utf-8"))


def _load_boxes(path: str | None, image_size: str | None):
    if not path:
        return []
    if path.endswith(".txt"):
        if not image_size:
            raise UsageError("--image-size WxH is required for normalized detector .txt files")
        w, h = (int(v) for v in image_size.lower().split("x"))
        return boxes_from_yolo(Path(path).read_text(), w, h)
    return boxes_from_json(_read_json(path))


def _make_client(args):
    if args.client == "replay":
        if not args.fixture:
            raise UsageError("--fixture is required with --client replay")
        return ReplayClient.from_file(args.fixture)
    if not args.base_url or not args.model:
        raise UsageError("--base-url and --model are required with --client http")
    return HttpClient(
        args.base_url, args.model, api_key_env=args.api_key_env,
        timeout=args.timeout, retries=args.retries,
    )


def cmd_parse(args) -> int:
    n = canonicalize(_read_netlist(args.file))
    if args.json:
        sys.stdout.write(_dump({
            "components": [
                {"name": c.name, "kind": c.kind.value, "terminals": [list(t) for t in c.terminals],
                 "value": c.value, "model": c.model}
                for c in n.components
            ],
            "nets": list(n.nets),
            "directives": list(n.directives),
        }))
    else:
        sys.stdout.write(serialize_netlist(n))
    return EXIT_OK


def cmd_stats(args) -> int:
    per_file = []
    for path in args.files:
        s = netlist_stats(_read_netlist(path))
        per_file.append((path, s))
    hist = histograms(s for _, s in per_file)
    if args.hist_dir:
        out = Path(args.hist_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name in STAT_FIELDS:
            (out / f"histogram_{name}.csv").write_text(histogram_csv(hist[name], name))
    if args.json:
        sys.stdout.write(_dump({
            "files": [{"file": p, **s.as_dict()} for p, s in per_file],
            "histograms": {name: {str(k): v for k, v in sorted(hist[name].items())} for name in STAT_FIELDS},
        }))
    else:
        sys.stdout.write("file," + ",".join(STAT_FIELDS) + "\n")
        for p, s in per_file:
            sys.stdout.write(p + "," + ",".join(str(v) for v in s.as_dict().values()) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = GedCostConfig(exact_node_limit=args.exact_limit)
    result = similarity(_read_netlist(args.a), _read_netlist(args.b), args.mode, cfg)
    sys.stdout.write(_dump(result.to_json()))
    return EXIT_OK


def cmd_lint(args) -> int:
    diags = lint(_read_netlist(args.file))
    sys.stdout.write(render_report(diags, "json") + "\n" if args.json else render_report(diags, "text"))
    return EXIT_LINT if has_errors(diags) else EXIT_OK


def _clusters_for(args):
    segments = segments_from_json(_read_json(args.segments))
    boxes = _load_boxes(args.boxes, args.image_size)
    if boxes:
        segments = mask_segments(segments, boxes, args.margin)
    return segments


def cmd_cluster(args) -> int:
    cfg = ClusterConfig(args.radius, args.body_proximity)
    clusters = cluster_segments(_clusters_for(args), cfg)
    sys.stdout.write(_dump({
        "radius": args.radius,
        "clusters": [{"id": c.id, "segments": segments_to_json(c.segments)} for c in clusters],
    }))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    segments = _clusters_for(args)
    radii = sorted(float(r) for r in args.radii.split(","))
    rows = [
        {"radius": r, "clusters": len(cluster_segments(segments, ClusterConfig(r, args.body_proximity)))}
        for r in radii
    ]
    if args.json:
        sys.stdout.write(_dump(rows))
    else:
        sys.stdout.write("radius,clusters\n" + "".join(f"{r['radius']:g},{r['clusters']}\n" for r in rows))
    return EXIT_OK


def cmd_annotate(args) -> int:
    boxes = _load_boxes(args.boxes, args.image_size)
    segments = segments_from_json(_read_json(args.segments))
    a = annotate(args.image or "", boxes, segments, ClusterConfig(args.radius, args.body_proximity),
                 margin=args.margin, max_dist=args.max_dist)
    if args.out:
        Path(f"{args.out}.json").write_bytes(export_annotation(a, "json"))
        Path(f"{args.out}.svg").write_bytes(export_annotation(a, "svg"))
        log.info("wrote %s.json and %s.svg", args.out, args.out)
    else:
        sys.stdout.write(export_annotation(a, "json").decode())
    for box, role in a.unbound():
        log.warning("unbound terminal %s.%s", box, role)
    return EXIT_OK


def cmd_netlist_from_annotation(args) -> int:
    a = Annotation.from_json(_read_json(args.annotation))
    sys.stdout.write(serialize_netlist(annotation_to_netlist(a)))
    return EXIT_OK


def cmd_generate(args) -> int:
    a = Annotation.from_json(_read_json(args.annotation))
    client = _make_client(args)
    try:
        netlist, trace = generate_from_annotation(client, a, args.max_iters)
    except RepairAborted as exc:
        if args.trace:
            Path(args.trace).write_text(exc.trace.dumps())
        raise
    if args.trace:
        Path(args.trace).write_text(trace.dumps())
    log.info("repair status: %s", trace.label)
    sys.stdout.write(serialize_netlist(netlist))
    return EXIT_LINT if has_errors(lint(netlist)) else EXIT_OK


def cmd_export_finetune(args) -> int:
    records = [DatasetRecord.from_json(obj) for obj in _read_json(args.records)]
    skipped: list[tuple[str, str]] = []
    data = export_finetune_records(records, skipped)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for rec_id, reason in skipped:
        log.warning("skipped %s: %s", rec_id, reason)
    return EXIT_OK


def cmd_bench(args) -> int:
    designs = load_suite(args.suite) if args.suite else default_suite()
    table = run_benchmark(designs, _make_client(args), args.n, args.threshold, args.mode, args.workers)
    if args.out_json:
        Path(args.out_json).write_text(table.dumps())
    sys.stdout.write(table.dumps() if args.json else table.render_text())
    return EXIT_OK


def build_parser() -> tuple[_Parser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="spicenet", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults (flags override)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name, func, help, parents=()):
        p = sub.add_parser(name, help=help, parents=list(parents))
        p.set_defaults(func=func)
        subs[name] = p
        return p

    geo = argparse.ArgumentParser(add_help=False)
    geo.add_argument("--radius", type=float, default=DEFAULT_RADIUS, help="clustering radius in pixels")
    geo.add_argument("--margin", type=float, default=0.0, help="box inflation before masking")
    geo.add_argument("--body-proximity", action="store_true", help="also merge T-junctions")
    geo.add_argument("--image-size", help="WxH, needed for normalized detector .txt boxes")

    llm = argparse.ArgumentParser(add_help=False)
    llm.add_argument("--client", choices=("http", "replay"), required=True)
    llm.add_argument("--fixture", help="JSONL of scripted replies (replay client)")
    llm.add_argument("--base-url", help="chat-completion endpoint base URL")
    llm.add_argument("--model")
    llm.add_argument("--api-key-env", default=DEFAULT_API_KEY_ENV)
    llm.add_argument("--timeout", type=float, default=60.0)
    llm.add_argument("--retries", type=int, default=3)

    p = add("parse", cmd_parse, "echo the canonical form of a netlist")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = add("stats", cmd_stats, "per-file statistics and histograms")
    p.add_argument("files", nargs="+")
    p.add_argument("--json", action="store_true")
    p.add_argument("--hist-dir", help="write histogram_<dimension>.csv files here")

    p = add("compare", cmd_compare, "graph similarity of two netlists")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mode", choices=[m.value for m in GraphMode], default=GraphMode.ADJACENCY.value)
    p.add_argument("--exact-limit", type=int, default=GedCostConfig().exact_node_limit)

    p = add("lint", cmd_lint, "structural checks")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = add("cluster", cmd_cluster, "cluster wire segments into nets", [geo])
    p.add_argument("--segments", required=True)
    p.add_argument("--boxes")

    p = add("sensitivity", cmd_sensitivity, "cluster count as a function of radius", [geo])
    p.add_argument("--segments", required=True)
    p.add_argument("--boxes")
    p.add_argument("--radii", default="10,20,30,40,50,60,80")
    p.add_argument("--json", action="store_true")

    p = add("annotate", cmd_annotate, "mask, cluster and bind terminals", [geo])
    p.add_argument("--boxes", required=True)
    p.add_argument("--segments", required=True)
    p.add_argument("--image", help="schematic image reference recorded in the annotation")
    p.add_argument("--max-dist", type=float, default=60.0)
    p.add_argument("--out", help="output prefix for <out>.json and <out>.svg")

    p = add("netlist-from-annotation", cmd_netlist_from_annotation, "deterministic netlist from an annotation")
    p.add_argument("annotation")

    p = add("generate", cmd_generate, "LLM netlist generation with repair loop", [llm])
    p.add_argument("--annotation", required=True)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--trace", help="write the repair trace JSON here")

    p = add("export-finetune", cmd_export_finetune, "chat-format JSONL for fine-tuning")
    p.add_argument("records")
    p.add_argument("--out")

    p = add("bench", cmd_bench, "benchmark success counts", [llm])
    p.add_argument("--suite", help="JSON design list (default: bundled 20-design suite)")
    p.add_argument("-n", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--mode", choices=[m.value for m in GraphMode], default=GraphMode.ADJACENCY.value)
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out-json")
    return parser, subs


def _apply_config(path: str, subs) -> None:
    cfg = _read_json(path)
    shared = {k.replace("-", "_"): v for k, v in cfg.items() if not isinstance(v, dict)}
    for name, p in subs.items():
        known = {a.dest for a in p._actions}
        section = {k.replace("-", "_"): v for k, v in cfg.get(name, {}).items()}
        values = {k: v for k, v in {**shared, **section}.items() if k in known}
        if values:
            p.set_defaults(**values)
            for action in p._actions:
                if action.dest in values:
                    action.required = False


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            _apply_config(known.config, subs)
        except (OSError, ValueError) as exc:
            print(f"spicenet: bad config: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
    )
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (RepairAborted, TransportError) as exc:
        print(f"spicenet: transport failure: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except UnboundTerminals as exc:
        print(f"spicenet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, NetlistError, NoNetlistFound, OSError, ValueError, KeyError) as exc:
        print(f"spicenet: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
