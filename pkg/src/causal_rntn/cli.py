"""Command-line entry point: ``causal-rntn <subcommand> ...``.

stdout carries only payload (trees, tables, reports). Everything else,
including the resolved configuration, goes to stderr.
Exit codes: 0 success, 1 data or model error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import shutil
import sys
import tempfile
import urllib.parse
import urllib.request
import zipfile
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .brat import Branching, CorpusExportError, export_corpus, read_standoff_dir
from .checkpoint import MAGIC, load_checkpoint, save_checkpoint
from .metrics import inter_annotator_agreement, split_stats, treebank_stats
from .trainer import (NonFiniteLoss, SplitSpec, TrainConfig, evaluate, predict, split_dataset,
                      train)
from .treebank import read_treebank, serialize_bracketed, write_treebank

log = logging.getLogger("causal_rntn")

DATA_ENV = "CAUSAL_RNTN_DATA"
DEFAULT_DATA_URL = ("https://github.com/springto/Fine-Grained-Causality-Extraction-From-NL-"
                    "Requirements/archive/refs/heads/main.zip")

# every data, model and I/O error in the package derives from one of these
DATA_ERRORS = (OSError, ValueError, NonFiniteLoss)


class DataError(Exception):
    """Raised by subcommands for failures already explained on stderr."""


def data_dir() -> Path:
    return Path(os.environ.get(DATA_ENV) or Path.home() / ".cache" / "causal_rntn")


def report_config(name: str, config: dict) -> None:
    print(f"[{name}] config: {json.dumps(config, sort_keys=True, default=str)}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_export(args) -> int:
    branching = Branching[args.branching.upper()]
    report_config("export", {"ann_dir": args.ann_dir, "out": args.out, "branching": args.branching})
    if not Path(args.ann_dir).is_dir():
        raise DataError(f"{args.ann_dir}: not a directory")
    docs = read_standoff_dir(args.ann_dir)
    if not docs:
        raise DataError("no annotation pairs found")
    out = Path(args.out)
    try:
        trees = export_corpus(docs, branching)
        write_treebank(trees, out)
    except CorpusExportError as exc:
        for name, err in exc.failures:
            print(f"{name}: {type(err).__name__}: {err}", file=sys.stderr)
        out.unlink(missing_ok=True)
        raise DataError(f"{len(exc.failures)} of {len(docs)} documents failed to export") from None
    except BaseException:
        out.unlink(missing_ok=True)
        raise
    print(f"wrote {len(trees)} trees to {out}", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    trees = read_treebank(args.treebank)
    report_config("stats", {"treebank": args.treebank, "split": args.split, "seed": args.seed})
    if args.split:
        split = split_dataset(trees, SplitSpec(seed=args.seed))
        stats = split_stats({"train": split.train, "val": split.val, "test": split.test,
                             "all": trees})
        if args.json:
            print(json.dumps({k: v.to_dict() for k, v in stats.items()}, indent=2))
        else:
            for name, s in stats.items():
                print(f"== {name} ==")
                print(s.format_table())
        warnings = stats["all"].warnings
    else:
        s = treebank_stats(trees)
        print(json.dumps(s.to_dict(), indent=2) if args.json else s.format_table())
        warnings = s.warnings
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    cfg = TrainConfig(lr=args.lr, mini_batch=args.mb, wvec_dim=args.dim, epochs=args.epochs,
                      seed=args.seed, embedding_mode=args.embedding,
                      branching_data=args.branching, pretrained_path=args.vectors)
    trees = read_treebank(args.treebank)
    if args.val:
        train_trees, val_trees = trees, read_treebank(args.val)
    else:
        split = split_dataset(trees, SplitSpec(seed=args.seed))
        train_trees, val_trees = split.train, split.val
    log_path = Path(args.log) if args.log else Path(str(args.out) + ".log")
    report_config("train", {**asdict(cfg), "treebank": args.treebank, "val": args.val,
                            "out": args.out, "log": str(log_path),
                            "n_train": len(train_trees), "n_val": len(val_trees)})

    def on_epoch(rec):
        if args.verbose:
            print(rec.line(), file=sys.stderr)

    result = train(train_trees, val_trees, cfg, on_epoch=on_epoch)
    save_checkpoint(result.checkpoint, args.out)
    log_path.write_text(result.log_text(), encoding="utf-8")
    meta = result.checkpoint.meta
    print(f"best epoch {meta['epoch']} (val accuracy {meta['val_accuracy']}); "
          f"checkpoint {args.out}, log {log_path}", file=sys.stderr)
    return 0


def _read_sentences(path):
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    with fh:
        for lineno, line in enumerate(fh, 1):
            words = line.split()
            if not words:
                print(f"warning: {path}:{lineno}: empty line skipped", file=sys.stderr)
                continue
            yield words


def cmd_predict(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    report_config("predict", {"checkpoint": args.checkpoint, "sentences": args.sentences,
                              "scoring": args.scoring})
    sentences = list(_read_sentences(args.sentences))
    for tree in predict(ckpt, sentences, args.scoring):
        print(serialize_bracketed(tree))
    return 0


def cmd_eval(args) -> int:
    # the source is either a checkpoint or a treebank of finished predictions
    with open(args.source, "rb") as fh:
        is_checkpoint = fh.read(len(MAGIC)) == MAGIC
    model = load_checkpoint(args.source) if is_checkpoint else read_treebank(args.source)
    gold = read_treebank(args.gold)
    report_config("eval", {"source": args.source, "gold": args.gold, "scoring": args.scoring,
                           "report": args.report})
    report = evaluate(model, gold, args.scoring)
    print(report.format_table())
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n",
                                     encoding="utf-8")
    return 0


def cmd_agreement(args) -> int:
    report_config("agreement", {"raters": args.raters})
    if len(args.raters) < 2:
        raise DataError("agreement needs at least two rater directories")
    docs = {}
    for d in args.raters:
        if not Path(d).is_dir():
            raise DataError(f"{d}: not a directory")
        docs[Path(d).name if Path(d).name not in docs else d] = {
            doc.name: doc for doc in read_standoff_dir(d)}
    report = inter_annotator_agreement(docs)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for (a, b), s in report.pairwise.items():
            print(f"{a} vs {b}: precision {s.precision:.4f} recall {s.recall:.4f} f1 {s.f1:.4f}")
        for lab, f1 in report.per_label_f1.items():
            print(f"{lab.display:<32}{f1:.4f}")
        print(f"averaged f1: {report.averaged_f1:.4f}")
    return 0


def cmd_fetch_data(args) -> int:
    dest = Path(args.dest) if args.dest else data_dir()
    report_config("fetch-data", {"url": args.url, "dest": str(dest), "sha256": args.sha256})
    dest.mkdir(parents=True, exist_ok=True)
    name = Path(urllib.parse.urlparse(args.url).path).name or "download"
    target = dest / name
    digest = hashlib.sha256()
    with tempfile.NamedTemporaryFile(dir=dest, delete=False) as tmp:
        try:
            with urllib.request.urlopen(args.url, timeout=args.timeout) as resp:
                for chunk in iter(lambda: resp.read(1 << 16), b""):
                    digest.update(chunk)
                    tmp.write(chunk)
        except BaseException:
            tmp.close()
            os.unlink(tmp.name)
            raise
    found = digest.hexdigest()
    if args.sha256 and found != args.sha256.lower():
        os.unlink(tmp.name)
        raise DataError(f"checksum mismatch: expected {args.sha256}, got {found}")
    shutil.move(tmp.name, target)
    print(f"sha256 {found}", file=sys.stderr)
    if zipfile.is_zipfile(target):
        with zipfile.ZipFile(target) as zf:
            zf.extractall(dest)
    print(target)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-rntn",
                                     description="Causality treebank tools and tensor network.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="more diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="convert brat .txt/.ann pairs into a bracketed treebank")
    p.add_argument("ann_dir")
    p.add_argument("out")
    p.add_argument("--branching", choices=["left", "right", "both"], default="left")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("stats", help="segment counts per label")
    p.add_argument("treebank")
    p.add_argument("--split", action="store_true", help="also report the default split")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    defaults = TrainConfig()
    p = sub.add_parser("train", help="train a model on a bracketed treebank")
    p.add_argument("treebank")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--log", help="epoch log path (default: <out>.log)")
    p.add_argument("--val", help="validation treebank; default: split the input")
    p.add_argument("--lr", type=float, default=defaults.lr)
    p.add_argument("--mb", type=int, default=defaults.mini_batch)
    p.add_argument("--dim", type=int, default=defaults.wvec_dim)
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--embedding", choices=["random", "pos50", "pos75", "pos100"],
                   default=defaults.embedding_mode)
    p.add_argument("--vectors", help="pre-trained word vectors for pos50/pos75")
    p.add_argument("--branching", choices=["left", "right", "both"],
                   default=defaults.branching_data, help="how the treebank was exported")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="parse sentences, one per line, into bracketed trees")
    p.add_argument("checkpoint")
    p.add_argument("sentences", help="file with one tokenized sentence per line, or -")
    p.add_argument("--scoring", choices=["max_prob", "phrase_mass"], default="max_prob")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score greedy parses against a gold treebank")
    p.add_argument("source", help="checkpoint, or a treebank of predicted trees")
    p.add_argument("gold")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--scoring", choices=["max_prob", "phrase_mass"], default="max_prob")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("agreement", help="pairwise span F1 between rater directories")
    p.add_argument("raters", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("fetch-data", help="download the published treebank (network)")
    p.add_argument("--url", default=DEFAULT_DATA_URL)
    p.add_argument("--sha256", help="expected checksum of the download")
    p.add_argument("--dest", help=f"target directory (default: ${DATA_ENV} or ~/.cache/causal_rntn)")
    p.add_argument("--timeout", type=float, default=60.0)
    p.set_defaults(func=cmd_fetch_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
