"""Command line entry point: convert, train, bag, predict, evaluate, sweep.

Exit status: 0 success, 1 usage/config error, 2 data/parse error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

from .corpus import CorpusError, Label, load_corpus, parse_conll, preprocess, write_simple_format
from .ensemble import Ensemble, MemberTrainingError, is_ensemble_dir, predict_vote_batch
from .features import FeatureMode, Vocabulary, VocabularyError, vectorize_corpus
from .metrics import evaluate
from .network import DimensionError, Network, TrainingDivergedError, predict_labels
from .pipeline import (
    ConfigError,
    RunConfig,
    SweepCellError,
    load_labeled,
    parse_config_text,
    format_sweep,
    run_sweep,
    sweep_rows,
    train_bagged,
    train_model,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

MODEL_NAME = "model.txt"
VOCAB_NAME = "vocab.txt"
REPORT_NAME = "train_report.txt"
RUN_CONFIG_NAME = "run.cfg"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value settings file; flags override it")
    group = parser.add_argument_group("settings (each also accepted as a config-file key)")
    for key in RunConfig.keys():
        group.add_argument(f"--{key}", dest=f"opt_{key}", metavar="VALUE")


def _run_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            raw.update(parse_config_text(Path(args.config).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    for key in RunConfig.keys():
        value = getattr(args, f"opt_{key}")
        if value is not None:
            raw[key] = value
    return RunConfig.from_strings(raw)


def _label_distribution(corpus) -> str:
    counts = Counter(t.label.text if t.label is not None else "-" for t in corpus)
    return ", ".join(f"{k}={counts[k]}" for k in ("negative", "neutral", "positive", "-") if counts[k])


def _write_run_config(cfg: RunConfig, path: Path) -> None:
    lines = [f"{key}={'' if getattr(cfg, key) is None else getattr(cfg, key)}" for key in RunConfig.keys()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_convert(args) -> int:
    with open(args.conll, encoding="utf-8") as f:
        tweets = [preprocess(t) for t in parse_conll(f)]
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        write_simple_format(tweets, out)
    dist = _label_distribution(tweets)
    print(f"converted {len(tweets)} tweets" + (f" ({dist})" if dist else ""))
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _run_config(args)
    cfg.validate_paths("train", "val", "output")
    train_corpus, val_corpus = load_labeled(cfg.train), load_labeled(cfg.val)
    model = train_model(cfg, train_corpus, val_corpus)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    model.network.save(out / MODEL_NAME)
    model.vocab.save(out / VOCAB_NAME)
    (out / REPORT_NAME).write_text(model.report.to_text(), encoding="utf-8")
    _write_run_config(cfg, out / RUN_CONFIG_NAME)
    print(f"vocabulary size {len(model.vocab)}; best epoch {model.report.best_epoch}")
    print(f"validation accuracy {model.val_accuracy:.4f}")
    return EXIT_OK


def cmd_bag(args) -> int:
    cfg = _run_config(args)
    cfg.validate_paths("train", "val", "output")
    train_corpus, val_corpus = load_labeled(cfg.train), load_labeled(cfg.val)
    bagged = train_bagged(cfg, train_corpus, val_corpus)
    out = Path(cfg.output)
    bagged.ensemble.save(out, bagged.vocab)
    _write_run_config(cfg, out / RUN_CONFIG_NAME)
    for i, acc in enumerate(bagged.member_accuracy):
        print(f"member {i} validation accuracy {acc:.4f}")
    print(f"ensemble validation accuracy {bagged.accuracy:.4f}")
    return EXIT_OK


def _saved_mode(directory: Path, override) -> FeatureMode:
    if override:
        return FeatureMode.parse(override)
    cfg_path = directory / RUN_CONFIG_NAME
    if cfg_path.is_file():
        return FeatureMode.parse(parse_config_text(cfg_path.read_text(encoding="utf-8")).get("mode", "binary"))
    return FeatureMode.BINARY


def cmd_predict(args) -> int:
    path = Path(args.model)
    if path.is_dir() and is_ensemble_dir(path):
        ensemble, vocab = Ensemble.load(path)
        if args.vocab:
            vocab = Vocabulary.load(args.vocab)
        mode = _saved_mode(path, args.mode)
        net = None
        input_dim = ensemble.input_dim
    else:
        model_file = path / MODEL_NAME if path.is_dir() else path
        if not model_file.is_file():
            raise ConfigError(f"no model file at {model_file}")
        net = Network.load(model_file)
        vocab = Vocabulary.load(args.vocab or model_file.parent / VOCAB_NAME)
        mode = _saved_mode(model_file.parent, args.mode)
        input_dim = net.input_dim
    if len(vocab) != input_dim:
        raise DimensionError(f"vocabulary has {len(vocab)} entries but the model expects {input_dim} features")

    corpus = load_corpus(args.input)
    labels = []
    if corpus:
        X = vectorize_corpus(corpus, vocab, mode)
        labels = predict_labels(net, X) if net is not None else predict_vote_batch(ensemble, X)[0]
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for tweet, label in zip(corpus, labels):
            f.write(f"{tweet.id}\t{Label(int(label)).text}\n")
    print(f"wrote {len(corpus)} predictions to {args.out}")
    return EXIT_OK


def _read_predictions(path) -> dict[int, Label]:
    preds = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise CorpusError("expected 'id<TAB>label'", lineno, line)
            try:
                tweet_id, label = int(fields[0]), Label.parse(fields[-1])
            except ValueError as exc:
                raise CorpusError(str(exc), lineno, line) from None
            if tweet_id in preds:
                raise CorpusError(f"duplicate prediction for id {tweet_id}", lineno, line)
            preds[tweet_id] = label
    return preds


def _id_list(ids) -> str:
    ids = sorted(ids)
    shown = " ".join(map(str, ids[:20]))
    return shown + (f" ... ({len(ids)} total)" if len(ids) > 20 else "")


def cmd_evaluate(args) -> int:
    gold = {t.id: t.label for t in load_labeled(args.gold)}
    preds = _read_predictions(args.pred)
    missing, extra = gold.keys() - preds.keys(), preds.keys() - gold.keys()
    if missing or extra:
        msg = []
        if missing:
            msg.append(f"ids without a prediction: {_id_list(missing)}")
        if extra:
            msg.append(f"predicted ids not in gold: {_id_list(extra)}")
        raise CorpusError("; ".join(msg))
    ids = sorted(gold)
    rep = evaluate([int(gold[i]) for i in ids], [int(preds[i]) for i in ids])
    print(rep.to_table())
    print(rep.to_key_value(), end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    cfg.validate_paths("train", "val")
    if not cfg.axis or not cfg.values:
        raise ConfigError("sweep needs both 'axis' and 'values' (e.g. --axis K --values 10,15,20)")
    train_corpus, val_corpus = load_labeled(cfg.train), load_labeled(cfg.val)
    cells = run_sweep(cfg, cfg.axis, cfg.values, train_corpus, val_corpus)
    print(format_sweep(cells), end="")
    rows = sweep_rows(cells)
    if cfg.output:
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.tsv").write_text(rows, encoding="utf-8")
        _write_run_config(cfg, out / RUN_CONFIG_NAME)
    else:
        print()
        print(rows, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hinglish-bow", description="Bag-of-ngrams sentiment classifiers for code-mixed tweets.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-epoch progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="CoNLL -> simple TSV (usernames and URLs dropped)")
    p.add_argument("conll")
    p.add_argument("out")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("train", help="build vocabulary and train one network")
    _add_run_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bag", help="train a bagged ensemble with plurality voting")
    _add_run_options(p)
    p.set_defaults(func=cmd_bag)

    p = sub.add_parser("predict", help="label tweets with a saved model or ensemble")
    p.add_argument("model", help="model file, training output directory, or ensemble directory")
    p.add_argument("input", help="CoNLL or simple-format file; labels optional")
    p.add_argument("out")
    p.add_argument("--vocab", help="vocabulary file (defaults to the one saved with the model)")
    p.add_argument("--mode", choices=[m.value for m in FeatureMode], help="feature mode override")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("gold")
    p.add_argument("pred")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="retrain once per value of one hyperparameter")
    _add_run_options(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def _exit_code(exc: BaseException) -> int:
    while isinstance(exc, (MemberTrainingError, SweepCellError)) and exc.__cause__ is not None:
        exc = exc.__cause__
    if isinstance(exc, TrainingDivergedError):
        return EXIT_NUMERIC
    if isinstance(exc, (ConfigError, UsageError, FileNotFoundError)):
        return EXIT_CONFIG
    if isinstance(exc, (CorpusError, VocabularyError, DimensionError, ValueError, OSError)):
        return EXIT_DATA
    return EXIT_CONFIG


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, CorpusError, VocabularyError, DimensionError,
            TrainingDivergedError, MemberTrainingError, SweepCellError, ValueError, OSError) as exc:
        print(f"hinglish-bow {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
