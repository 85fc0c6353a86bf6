"""Command-line entry point: ``layergraph <command> [options] [files]``.

Commands read files (or stdin when none / ``-`` is given) and write to
stdout unless ``--output`` is set. Exit status is 0 on success, 1 when some
input records were rejected (a summary goes to stderr) and 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterator, Optional, Sequence, TextIO

from .config import CONFIG_ENV, Config, ConfigError, load_config
from .encoding import RuleInventory
from .eval import InputMismatch, score_corpus
from .graph import FRAMEWORKS, Graph, GraphValidationError, MRPFormatError, parse_mrp_line, serialize_mrp
from .oracle import (
    AUTO_LIMIT, IsolatedComponent, coverage, extract_script, graph_coverage_row, serialize_script,
)
from .tokenizer import Token, Tokenizer
from .uniform import AnchorMismatch, UniformGraph, serialize_uniform, uniform_from_dict, uniformize

log = logging.getLogger("layergraph")

SHOW_OFFENDERS = 5


class UsageError(Exception):
    pass


class Problems:
    """Rejected input records, reported together at the end of a command."""

    def __init__(self) -> None:
        self.items: list[tuple[str, str]] = []

    def add(self, where: str, message: str) -> None:
        self.items.append((where, message))

    def report(self, stream: TextIO) -> int:
        if not self.items:
            return 0
        kinds: dict[str, int] = defaultdict(int)
        for _, message in self.items:
            kinds[message.split(":", 1)[0]] += 1
        counts = ", ".join(f"{kind} x{n}" for kind, n in sorted(kinds.items()))
        print(f"error: {len(self.items)} record(s) rejected ({counts})", file=stream)
        for where, message in self.items[:SHOW_OFFENDERS]:
            print(f"  {where}: {message}", file=stream)
        if len(self.items) > SHOW_OFFENDERS:
            print(f"  ... and {len(self.items) - SHOW_OFFENDERS} more", file=stream)
        return 1


# -- input / output helpers ------------------------------------------------

@contextmanager
def _open_out(path: Optional[str]) -> Iterator[TextIO]:
    if not path or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            yield handle


def _lines(paths: Sequence[str]) -> Iterator[tuple[str, int, str]]:
    """(file name, line number, text) for every non-empty input line."""
    for path in paths or ["-"]:
        if path == "-":
            handle, name = sys.stdin, "<stdin>"
        else:
            try:
                handle, name = open(path, encoding="utf-8"), path
            except OSError as exc:
                raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        try:
            for number, line in enumerate(handle, 1):
                line = line.rstrip("\n")
                if line.strip():
                    yield name, number, line
        finally:
            if handle is not sys.stdin:
                handle.close()


def _read_graphs(paths: Sequence[str], problems: Problems, framework: Optional[str] = None) -> list[Graph]:
    graphs = []
    for name, number, line in _lines(paths):
        try:
            g = parse_mrp_line(line)
        except MRPFormatError as exc:
            problems.add(f"{name}:{number}", f"MRPFormatError: {exc}")
            continue
        except GraphValidationError as exc:
            codes = ",".join(sorted({v.code for v in exc.violations}))
            problems.add(f"{name}:{number}", f"GraphValidationError: {codes}: {exc}")
            continue
        if framework is None or g.framework == framework:
            graphs.append(g)
    return graphs


def _map(func: Callable, items: Sequence, jobs: int) -> list:
    """``map`` that may fan out to processes; results keep input order."""
    if jobs <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


def _config(args: argparse.Namespace, **fixed) -> Config:
    try:
        values = dict(load_config(args.config))
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    flags = {
        "framework": getattr(args, "framework", None),
        "tokenizer_mode": getattr(args, "tokenizer_mode", None),
        "iterations": getattr(args, "iterations", None),
        "rule2b_word_run": getattr(args, "rule2b_word_run", None),
        "allow_unanchored": getattr(args, "allow_unanchored", None),
        "force_top": getattr(args, "force_top", None),
        "seed": getattr(args, "seed", None),
        "companion": getattr(args, "companion", None),
        "model": getattr(args, "model", None),
        "output": getattr(args, "output", None),
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    values.update(fixed)
    try:
        return Config.from_dict(values)
    except (ConfigError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _graph_config(base: Config, framework: str) -> Config:
    """Per-graph settings: the graph's framework with the user's flags."""
    if framework == base.framework:
        return base
    return Config.for_framework(framework, rule2b_word_run=base.rule2b_word_run,
                                allow_unanchored=base.allow_unanchored)


def _tokens_of(config: Config, text: str) -> list[Token]:
    return Tokenizer(config.tokenizer_mode, config.rule2b_word_run).tokenize(text)


# -- commands ----------------------------------------------------------------

def cmd_tokenize(args: argparse.Namespace) -> int:
    config = _config(args)
    mode = args.mode or config.tokenizer_mode
    tokenizer = Tokenizer(mode, config.rule2b_word_run)
    with _open_out(args.output) as out:
        for _, _, line in _lines(args.files):
            tokens = tokenizer.tokenize(line)
            out.write(json.dumps([{"form": t.form, "start": t.start, "end": t.end} for t in tokens],
                                 ensure_ascii=False, separators=(",", ":")) + "\n")
    return 0


def _uniformize_one(job) -> tuple[Optional[str], Optional[str]]:
    g, config, tokens = job
    if tokens is None:
        tokens = _tokens_of(config, g.input)
    try:
        return serialize_uniform(uniformize(g, tokens, config.allow_unanchored)), None
    except AnchorMismatch as exc:
        return None, f"AnchorMismatch: {exc}"


def cmd_uniformize(args: argparse.Namespace) -> int:
    config = _config(args)
    problems = Problems()
    graphs = _read_graphs(args.files, problems)
    token_lists: list = [None] * len(graphs)
    if args.tokens:
        rows = [json.loads(line) for _, _, line in _lines([args.tokens])]
        if len(rows) != len(graphs):
            raise UsageError(f"--tokens has {len(rows)} lines for {len(graphs)} graphs")
        token_lists = [[Token(i, t["form"], t["start"], t["end"]) for i, t in enumerate(row)] for row in rows]
    jobs = [(g, _graph_config(config, g.framework), toks) for g, toks in zip(graphs, token_lists)]
    results = _map(_uniformize_one, jobs, args.jobs)
    with _open_out(args.output) as out:
        for g, (line, error) in zip(graphs, results):
            if error:
                problems.add(g.id, error)
            else:
                out.write(line + "\n")
    return problems.report(sys.stderr)


def _as_uniform(obj: dict, config: Config) -> UniformGraph:
    """Uniform graphs pass through; MRP graphs are uniformized on the fly."""
    nodes = obj.get("nodes") or []
    if "tokens" in obj or any("kind" in n for n in nodes):
        return uniform_from_dict(obj)
    g = parse_mrp_line(json.dumps(obj))
    gc = _graph_config(config, g.framework)
    return uniformize(g, _tokens_of(gc, g.input), gc.allow_unanchored)


def _read_uniform(paths: Sequence[str], config: Config, problems: Problems) -> list[UniformGraph]:
    out = []
    for name, number, line in _lines(paths):
        try:
            out.append(_as_uniform(json.loads(line), config))
        except json.JSONDecodeError as exc:
            problems.add(f"{name}:{number}", f"MRPFormatError: malformed JSON: {exc.msg}")
        except (MRPFormatError, GraphValidationError, AnchorMismatch, KeyError, TypeError) as exc:
            problems.add(f"{name}:{number}", f"{type(exc).__name__}: {exc}")
    return out


def _script_one(job) -> tuple[Optional[str], Optional[str]]:
    u, limit = job
    try:
        script, covered = extract_script(u, limit)
    except IsolatedComponent as exc:
        return None, f"IsolatedComponent: {exc}"
    return serialize_script(script, covered), None


def cmd_oracle(args: argparse.Namespace) -> int:
    config = _config(args)
    problems = Problems()
    graphs = _read_uniform(args.files, config, problems)
    results = _map(_script_one, [(u, args.max_iterations) for u in graphs], args.jobs)
    with _open_out(args.output) as out:
        for u, (line, error) in zip(graphs, results):
            if error:
                problems.add(u.id, error)
            else:
                out.write(line + "\n")
    return problems.report(sys.stderr)


def _coverage_one(job):
    u, limit = job
    return graph_coverage_row(u, limit)


def cmd_stats(args: argparse.Namespace) -> int:
    from . import reports

    config = _config(args)
    problems = Problems()
    graphs = [u for u in _read_uniform(args.files, config, problems)
              if args.framework is None or u.framework == args.framework]
    rows = _map(_coverage_one, [(u, args.max_iterations) for u in graphs], args.jobs)
    report = coverage(graphs, args.max_iterations, args.exclude_isolated, rows=rows)
    for warning in report.warnings:
        log.warning("%s", warning)
    with _open_out(args.output) as out:
        out.write(reports.coverage_csv(report) if args.csv else reports.coverage_text(report))
    if args.figure:
        from .plotting import coverage_figure
        coverage_figure(report, args.figure)
    return problems.report(sys.stderr)


def cmd_encode_analyze(args: argparse.Namespace) -> int:
    from . import reports
    from .model import analyze_encodings

    config = _config(args)
    problems = Problems()
    graphs = _read_graphs(args.files, problems, args.framework)
    by_framework: dict[str, list[Graph]] = defaultdict(list)
    for g in graphs:
        by_framework[g.framework].append(g)
    inventories: dict[str, dict[str, RuleInventory]] = {}
    for framework in sorted(by_framework, key=FRAMEWORKS.index):
        inventories[framework] = analyze_encodings(by_framework[framework], _graph_config(config, framework))
    with _open_out(args.output) as out:
        out.write(reports.encoding_csv(inventories) if args.csv else reports.encoding_text(inventories))
    if args.figure:
        from .plotting import encoding_figure
        encoding_figure(inventories, args.figure)
    return problems.report(sys.stderr)


def cmd_train(args: argparse.Namespace) -> int:
    from .model import read_companion, save_bundle, train

    config = _config(args)
    paths = args.files or ([config.train] if config.train else [])
    if not paths:
        raise UsageError("no training data: give files or set 'train' in the config")
    if not config.model:
        raise UsageError("no model path: give --model or set 'model' in the config")
    problems = Problems()
    graphs = _read_graphs(paths, problems, config.framework)
    if not graphs:
        raise UsageError(f"no {config.framework} graphs in the training data")
    companion = None
    if config.companion:
        with open(config.companion, encoding="utf-8") as handle:
            companion = read_companion(handle)
    bundle = train(graphs, config, companion)
    with open(config.model, "wb") as handle:
        handle.write(save_bundle(bundle))
    for graph_id, reason in bundle.summary["skipped"]:
        problems.add(graph_id, reason)
    summary = {k: v for k, v in bundle.summary.items() if k != "skipped"}
    summary["skipped"] = len(bundle.summary["skipped"])
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0 if args.lenient else problems.report(sys.stderr)


def _parse_one(job) -> str:
    from .model import load_bundle, parse

    data, graph_id, sentence, analyses = job
    bundle = _BUNDLES.get(data)
    if bundle is None:
        bundle = _BUNDLES.setdefault(data, load_bundle(data))
    return serialize_mrp(parse(sentence, bundle, graph_id, analyses))


_BUNDLES: dict = {}


def cmd_parse(args: argparse.Namespace) -> int:
    from .model import BundleError, load_bundle, read_companion

    config = _config(args)
    if not config.model:
        raise UsageError("no model: give --model or set 'model' in the config")
    try:
        with open(config.model, "rb") as handle:
            data = handle.read()
        bundle = load_bundle(data)
    except OSError as exc:
        raise UsageError(f"cannot read model {config.model}: {exc.strerror}") from None
    except BundleError as exc:
        raise UsageError(f"bad model {config.model}: {type(exc).__name__}: {exc}") from None
    if args.framework and args.framework != bundle.config.framework:
        raise UsageError(f"model is for {bundle.config.framework}, not {args.framework}")
    companion = {}
    if config.companion:
        with open(config.companion, encoding="utf-8") as handle:
            companion = read_companion(handle)

    problems = Problems()
    jobs = []
    for name, number, line in _lines(args.files):
        graph_id, sentence = str(len(jobs) + 1), line
        if line.lstrip().startswith("{"):
            try:
                obj = json.loads(line)
                graph_id, sentence = str(obj["id"]), obj["input"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                problems.add(f"{name}:{number}", f"MRPFormatError: {exc}")
                continue
        jobs.append((data, graph_id, sentence, companion.get(graph_id)))
    results = _map(_parse_one, jobs, args.jobs)
    with _open_out(args.output) as out:
        for line in results:
            out.write(line + "\n")
    return problems.report(sys.stderr)


def cmd_eval(args: argparse.Namespace) -> int:
    from . import reports

    problems = Problems()
    gold = _read_graphs([args.gold], problems)
    pred = {g.id: g for g in _read_graphs([args.pred], problems)}
    pairs = []
    for g in gold:
        p = pred.get(g.id)
        if p is None:
            problems.add(g.id, "MissingPrediction: scored as an empty graph")
            p = Graph(g.id, g.framework, g.input)
        if p.input != g.input:
            problems.add(g.id, f"{InputMismatch.__name__}: prediction and gold inputs differ")
            continue
        pairs.append((p, g))
    report = score_corpus(pairs)
    with _open_out(args.output) as out:
        out.write(reports.score_csv(report) if args.csv else reports.score_text(report))
    if args.figure:
        from .plotting import score_figure
        score_figure(report, args.figure)
    return problems.report(sys.stderr)


# -- argument parsing --------------------------------------------------------

def _iterations(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'auto'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"TOML config file (default: ${CONFIG_ENV})")
    common.add_argument("--framework", choices=FRAMEWORKS)
    common.add_argument("--tokenizer-mode", choices=("default", "ucca"))
    common.add_argument("--rule2b-word-run", action=argparse.BooleanOptionalAction, default=None,
                        help="read rule 2b's leading \\w as a run of word characters")
    common.add_argument("--allow-unanchored", action=argparse.BooleanOptionalAction, default=None,
                        help="attach anchorless components to a virtual root token")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes (output order is kept)")
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="layergraph", description="Layer-wise semantic graph parsing toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", parents=[common], help="split text lines into tokens (JSON arrays)")
    p.add_argument("--mode", choices=("default", "ucca"))
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("uniformize", parents=[common], help="MRP graphs to uniform graphs")
    p.add_argument("--tokens", help="tokenize output, one line per graph")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_uniformize)

    p = sub.add_parser("oracle", parents=[common], help="extract operation scripts")
    p.add_argument("--max-iterations", type=_positive, default=AUTO_LIMIT)
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", parents=[common], help="oracle coverage table")
    p.add_argument("--max-iterations", type=_positive, default=10)
    p.add_argument("--exclude-isolated", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--figure", help="also write a PNG plot here")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("encode-analyze", parents=[common], help="absolute vs relative class counts")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--figure", help="also write a PNG plot here")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_encode_analyze)

    p = sub.add_parser("train", parents=[common], help="train a model bundle")
    p.add_argument("--model", help="bundle to write")
    p.add_argument("--companion", help="CoNLL-U-like analyses keyed by sent_id")
    p.add_argument("--iterations", type=_iterations)
    p.add_argument("--lenient", action="store_true", help="exit 0 even if some graphs were skipped")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", parents=[common], help="parse sentences (or MRP inputs) with a bundle")
    p.add_argument("--model", help="bundle to read")
    p.add_argument("--companion", help="CoNLL-U-like analyses keyed by graph id")
    p.add_argument("--iterations", type=_iterations)
    p.add_argument("--force-top", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="per-component F1 of predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--figure", help="also write a PNG plot here")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
