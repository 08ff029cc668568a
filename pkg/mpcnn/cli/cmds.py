#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-


"""Commands and dispatch dict."""

import argparse
from pathlib import Path

from mpcnn.version import __version__
from mpcnn.cli.ablation import format_table, run_study
from mpcnn.config import PipelineConfig
from mpcnn.mp_eval.report import evaluate
from mpcnn.mp_excepts import EmptyInput
from mpcnn.mp_features.feature_file import read_features, write_features
from mpcnn.mp_features.pipeline import preprocess_corpus
from mpcnn.mp_nn.model_file import load_model, save_model, summarize
from mpcnn.mp_nn.trainer import train
from mpcnn.mp_signal import ecg_io
from mpcnn.mp_signal.synthetic import SynthConfig, write_corpus
from mpcnn.mp_types import FeatureSet


def _write_or_print(text: str, path: str | Path | None) -> None:
    """Write text to path, or stdout without one."""
    if path:
        Path(path).write_text(text, encoding="utf8")
    else:
        print(text, end="")


def mpcnn_version(_cfg: PipelineConfig, _args: argparse.Namespace) -> None:
    """Display version."""
    print(f"mpcnn version: {__version__}")


def cmd_preprocess(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Extract features from a record directory and report rejections."""
    corpus = preprocess_corpus(args.data_dir, cfg)
    if not corpus.segments:
        raise EmptyInput(f"No feature segments extracted from {args.data_dir}")
    fset = FeatureSet.from_segments(corpus.segments)
    write_features(args.out, fset, cfg.effective(version=__version__))
    print(f"records = {len(corpus.records)}")
    print(f"windows = {corpus.window_count}")
    print(f"segments = {len(fset)}")
    print(f"channels = {fset.channels.display}")
    for reason, count in corpus.rejection_counts.items():
        print(f"rejected.{reason} = {count}")


def cmd_train(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Train on a feature file, write model and history."""
    fset, _ = read_features(args.features)
    provenance = cfg.effective(version=__version__)
    result = train(fset, cfg.train)
    size = save_model(args.out, result.model, provenance)
    if args.best_out:
        save_model(args.best_out, result.best_model, provenance)
    history = args.history or f"{args.out}.history.txt"
    Path(history).write_text(result.history_table(provenance), encoding="utf8")
    if args.summary:
        print(summarize(result.model).as_text(), end="")
    last = result.history[-1]
    print(
        f"Trained {len(result.history)} epochs: train_acc {last.train_acc:.4f} val_acc {last.val_acc:.4f}, "
        f"best epoch {result.best_epoch}, {size} bytes written to {args.out}"
    )


def cmd_eval(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Evaluate a model, per segment and optionally per recording."""
    fset, _ = read_features(args.features)
    if not len(fset):
        raise EmptyInput(f"{args.features} holds no segments")
    model, _ = load_model(args.model)
    provenance = {
        "mpcnn_version": __version__,
        "config": cfg.effective(),
        "features": Path(args.features).name,
        "model": Path(args.model).name,
    }
    report = evaluate(model, fset, args.per_recording, provenance, cfg.train.batch_size)
    _write_or_print(report.as_text(), args.report)


def cmd_ablate(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Run a study and emit its table."""
    rows = run_study(args.study, args.data_dir, cfg, args.test_dir)
    header = f"study {args.study}\n{cfg.effective(version=__version__)}"
    _write_or_print(format_table(rows, header), args.out)


def cmd_synth(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Write a synthetic corpus."""
    base = SynthConfig(
        duration_minutes=args.minutes,
        base_bpm=cfg.synth.base_bpm,
        modulation_bpm=cfg.synth.modulation_bpm,
        modulation_period_s=cfg.synth.modulation_period_s,
        noise_snr_db=cfg.synth.noise_snr_db,
        seed=cfg.train.seed,
        apnea_fraction=cfg.synth.apnea_fraction,
    ).validate()
    written = write_corpus(args.out, args.records, base)
    print(f"Wrote {len(written)} records to {args.out}: {', '.join(written)}")


def cmd_convert_labels(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    """Binary annotations to the text label fallback."""
    labels = ecg_io.read_annotations(args.apn, cfg.annotation.code_map, args.fs)
    ecg_io.write_text_labels(labels, args.out)
    print(f"Wrote {len(labels)} labels to {args.out}")


MPCNN_CMD_DISPATCH = {
    "version": mpcnn_version,
    "preprocess": cmd_preprocess,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "synth": cmd_synth,
    "convert-labels": cmd_convert_labels,
}
