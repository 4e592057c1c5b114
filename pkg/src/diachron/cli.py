"""Command-line entry point: ``diachron <subcommand> ...``.

Exit status is 0 on success, 1 for validation or diagnostic failures and 2
for usage and I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, aligner, corpus, io, metrics
from .baselines import identity_normalize, memorizer_normalize, train_memorizer
from .reverse import expand_query, historical_variants, invert_ruleset
from .rules import (RulesetError, default_ruleset_text, lint_ruleset,
                    normalize_text, parse_ruleset)

log = logging.getLogger("diachron")

OK, INVALID, USAGE = 0, 1, 2
BUILTIN_SYSTEMS = ("transducers", "identity", "memorizer")


class CliError(Exception):
    def __init__(self, message, status=USAGE):
        super().__init__(message)
        self.status = status


def _read(path):
    try:
        if str(path) == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        io.atomic_write(path, text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _ruleset(args, strict=True):
    if getattr(args, "ruleset", None) is None:
        return parse_ruleset(default_ruleset_text(), strict=strict)
    text = _read(args.ruleset)
    try:
        return parse_ruleset(text, strict=strict)
    except RulesetError as exc:
        raise CliError(f"{args.ruleset}: {exc}", INVALID) from None


def cmd_normalize(args):
    ruleset = _ruleset(args)
    text = _read(args.input)
    out, trace = normalize_text(text, ruleset)
    _write(args.output, out)
    if args.trace:
        _write(args.trace, trace.to_jsonl())
    return OK


def cmd_align(args):
    try:
        src = io.read_paragraph_file(args.src)
        tgt = io.read_paragraph_file(args.tgt)
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}") from None
    result = aligner.align(src, tgt, band=args.band)
    summary = {
        "summary": {
            "beads": len(result.beads),
            "average_score": result.average_score,
            "objective": result.objective(),
            "kept": len(aligner.filter_beads(result, args.bead_threshold)),
            "bead_threshold": args.bead_threshold,
            "band": args.band,
            "scorer": aligner.SCORER_VERSION,
        }
    }
    _write(args.output, io.jsonl([b.to_dict() for b in result.beads] + [summary]))
    return OK


def _build_config(args):
    return corpus.BuildConfig(
        seed=args.seed, bead_threshold=args.bead_threshold,
        edition_threshold=args.edition_threshold, author_threshold=args.author_threshold,
        title_threshold=args.title_threshold, band=args.band,
    )


def cmd_build(args):
    config = _build_config(args)
    try:
        editions = corpus.load_manifest(args.manifest)
    except corpus.ManifestError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return INVALID
    except OSError as exc:
        raise CliError(f"cannot read {args.manifest}: {exc.strerror}") from None

    build = corpus.build_corpus(editions, config)
    out = Path(args.output)
    provenance = {
        "seed": config.seed,
        "bead_threshold": config.bead_threshold,
        "edition_threshold": config.edition_threshold,
        "author_threshold": config.author_threshold,
        "title_threshold": config.title_threshold,
        "band": config.band,
        "scorer": aligner.SCORER_VERSION,
        "diachron": __version__,
    }
    _write(out / "pairs.tsv", io.format_pairs_tsv(build.pairs))
    _write(out / "build_report.json", io.dumps({
        "config": provenance,
        "matches": [list(m) for m in build.matches],
        "match_diagnostics": [vars(d) for d in build.match_diagnostics],
        "drops": build.drops,
        "pairs": len(build.pairs),
    }))
    if not build.pairs:
        print("error: no paragraph pairs survived alignment", file=sys.stderr)
        return INVALID

    rows, failures = [], []
    for separation in (False, True):
        for pruning in (False, True):
            try:
                v = corpus.build_variant(build.pairs, pruning, separation, config.seed,
                                         config.test_fraction, config.novels_per_quartile)
            except corpus.DatasetError as exc:
                failures.append(f"pruning={pruning} separation={separation}: {exc}")
                continue
            _write(out / "variants" / f"{v.id}.json", v.to_json(provenance))
            rows.append((v, corpus.variant_stats(v, build.pairs)))
    _write(out / "stats.txt", corpus.format_stats_table(rows))
    _write(out / "stats.json", io.dumps([
        {"variant": v.id, "pruning": v.pruning, "separation": v.separation, **s._asdict()}
        for v, s in rows]))
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    print(corpus.format_stats_table(rows), end="")
    return INVALID if failures else OK


def _system_outputs(name, pairs, train, ruleset):
    if name == "transducers":
        return [normalize_text(p.src, ruleset)[0] for p in pairs]
    if name == "identity":
        return [identity_normalize(p.src) for p in pairs]
    if name == "memorizer":
        table = train_memorizer(train)
        return [memorizer_normalize(p.src, table) for p in pairs]
    raise CliError(f"unknown system {name!r}")


def cmd_evaluate(args):
    ruleset = _ruleset(args)
    try:
        pairs = io.read_pairs_tsv(args.pairs)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read {args.pairs}: {exc}") from None
    by_id = {p.pair_id: p for p in pairs}
    externals = []
    for item in args.predictions or ():
        name, sep, path = item.partition("=")
        if not sep:
            raise CliError(f"--predictions expects NAME=PATH, got {item!r}")
        externals.append((name, path))
    systems = args.system or ([] if externals else list(BUILTIN_SYSTEMS))

    reports = []
    for vpath in args.variant:
        try:
            variant = corpus.DatasetVariant.from_manifest(json.loads(_read(vpath)))
            test = [by_id[i] for i in variant.test]
            train = [by_id[i] for i in variant.train]
        except (KeyError, ValueError) as exc:
            print(f"error: {vpath}: variant does not match pair file ({exc})", file=sys.stderr)
            return INVALID
        meta = dict(variant=variant.id, pruning=variant.pruning, separation=variant.separation)
        for name in systems:
            hyps = _system_outputs(name, test, train, ruleset)
            version = ruleset.label if name == "transducers" else __version__
            reports.append(metrics.evaluate(test, hyps, system=name, version=version, **meta))
        for name, path in externals:
            try:
                preds = metrics.read_predictions(_read(path).splitlines())
                hyps = metrics.align_predictions(test, preds)
            except ValueError as exc:
                print(f"error: {path}: {exc}", file=sys.stderr)
                return INVALID
            reports.append(metrics.evaluate(test, hyps, system=name, version=path, **meta))

    table = metrics.format_table(reports)
    payload = {"ruleset": ruleset.label, "reports": [r.to_dict() for r in reports]}
    if args.output:
        out = Path(args.output)
        _write(out / "report.json", io.dumps(payload))
        _write(out / "report.txt", table)
    print(table, end="")
    return OK


def cmd_variants(args):
    gen = invert_ruleset(_ruleset(args), max_variants=args.max)
    print(json.dumps({"term": args.word, "variants": historical_variants(args.word, gen)},
                     ensure_ascii=False))
    return OK


def cmd_expand(args):
    gen = invert_ruleset(_ruleset(args), max_variants=args.max)
    expr, terms = expand_query(args.query, gen)
    if args.json:
        print(json.dumps({"query": args.query, "expression": expr, "terms": terms},
                         ensure_ascii=False))
    else:
        print(expr)
    return OK


def cmd_lint(args):
    ruleset = _ruleset(args, strict=False)
    probe = _read(args.probe).splitlines() if args.probe else None
    diags = lint_ruleset(ruleset, probe)
    for d in diags:
        print(d)
    if not diags:
        print(f"{ruleset.label}: {len(ruleset.rules)} rules, no diagnostics")
    return INVALID if diags else OK


def build_parser():
    p = argparse.ArgumentParser(prog="diachron", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def ruleset_opt(sp):
        sp.add_argument("--ruleset", help="ruleset file (default: shipped ruleset)")

    sp = sub.add_parser("normalize", help="normalize historical text")
    sp.add_argument("input", help="input text file, or - for stdin")
    sp.add_argument("-o", "--output", help="output file (default: stdout)")
    sp.add_argument("--trace", help="write a JSONL trace of applied steps")
    ruleset_opt(sp)
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("align", help="align two paragraph-per-line files")
    sp.add_argument("src")
    sp.add_argument("tgt")
    sp.add_argument("-o", "--output")
    sp.add_argument("--bead-threshold", type=float, default=1.0)
    sp.add_argument("--band", type=int, default=None)
    sp.set_defaults(func=cmd_align)

    sp = sub.add_parser("build", help="build paragraph pairs and dataset variants")
    sp.add_argument("manifest", help="JSONL edition manifest")
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--bead-threshold", type=float, default=1.0)
    sp.add_argument("--edition-threshold", type=float, default=0.9)
    sp.add_argument("--author-threshold", type=float, default=0.85)
    sp.add_argument("--title-threshold", type=float, default=0.85)
    sp.add_argument("--band", type=int, default=None)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("evaluate", help="score systems on dataset variants")
    sp.add_argument("--pairs", required=True, help="pair TSV from build")
    sp.add_argument("--variant", required=True, action="append", help="variant manifest (repeatable)")
    sp.add_argument("--system", action="append", choices=BUILTIN_SYSTEMS)
    sp.add_argument("--predictions", action="append", metavar="NAME=PATH",
                    help="external predictions JSONL (repeatable)")
    sp.add_argument("-o", "--output", help="directory for report.json and report.txt")
    ruleset_opt(sp)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("variants", help="historical variants of a word")
    sp.add_argument("word")
    sp.add_argument("--max", type=int, default=16)
    ruleset_opt(sp)
    sp.set_defaults(func=cmd_variants)

    sp = sub.add_parser("expand", help="expand a search query with historical variants")
    sp.add_argument("query")
    sp.add_argument("--max", type=int, default=16)
    sp.add_argument("--json", action="store_true")
    ruleset_opt(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("lint", help="check a ruleset for risky rules")
    sp.add_argument("ruleset", nargs="?", help="ruleset file (default: shipped ruleset)")
    sp.add_argument("--probe", help="word list used to detect rules that never fire")
    sp.set_defaults(func=cmd_lint)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "max", 1) < 1:
        parser.error("--max must be positive")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
