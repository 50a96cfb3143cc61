"""Command-line surface tying the pipeline together.

Subcommands: gen-data, train, tune, eval-cls, eval-det, infer, stream.
Every subcommand exits 0 on success and nonzero with a diagnostic on
failure.  `--config` points at a flat `key = value` file whose entries act
as defaults for the flags of the same name.
"""
from __future__ import annotations

import argparse
import os
import sys

from .data.store import DatasetDir, read_classes
from .data.synth import SynthConfig, synth_generate
from .detect.evalmap import map_eval
from .detect.sources import FileDetector, FixtureDetector, parse_detections_file
from .imageproc import load_image, write_pnm
from .imageproc.clahe import ClaheConfig
from .imageproc.preprocess import PreprocessVariant
from .nn.optim import NadamConfig
from .oilnet.checkpoint import load_checkpoint, save_checkpoint
from .oilnet.model import OilNet40, OilNet40Spec, dump_activations
from .oilnet.search import SearchSpace, random_search, trials_to_text
from .oilnet.train import TrainConfig, train
from .pipeline.config import ConfigError, PipelineConfig, parse_config_file
from .pipeline.reports import (
    format_confusion_table, render_eval_cls_report, render_run_report,
)
from .pipeline.runner import Pipeline


def _counts(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'normal,anomaly' counts, got {text!r}")
    return int(parts[0]), int(parts[1])


def _write_or_print(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        print(f"wrote {out_path}")
    else:
        sys.stdout.write(text)


def _detector_for(args, dataset: DatasetDir | None):
    source = getattr(args, "detector", None) or "fixture"
    if source == "fixture":
        if dataset is None:
            raise ConfigError("the fixture detector needs a dataset directory with labels/")
        return FixtureDetector({stem: dataset.load(stem).boxes for stem in dataset.stems()})
    if source.startswith("file:"):
        return FileDetector(source[5:])
    raise ConfigError(f"unknown detector source {source!r}")


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        checkpoint_path=args.checkpoint,
        variant=PreprocessVariant.parse(args.variant),
        clahe=ClaheConfig(args.clahe_grid, args.clahe_grid, args.clahe_clip),
        detector=getattr(args, "detector", "fixture") or "fixture",
        crop_margin=args.crop_margin,
        seed=args.seed,
    )


# -- subcommands -------------------------------------------------------------

def cmd_gen_data(args) -> int:
    cfg = SynthConfig(train=args.train, val=args.val, test=args.test,
                      image_size=args.size, seed=args.seed)
    manifest = synth_generate(cfg, args.out)
    print(f"generated {len(manifest.train)} train / {len(manifest.val)} val / "
          f"{len(manifest.test)} test frames in {args.out}")
    return 0


def _load_split_samples(dataset: DatasetDir, split: str):
    return dataset.load_split(split)


def cmd_train(args) -> int:
    dataset = DatasetDir(args.data)
    variant = PreprocessVariant.parse(args.variant)
    spec = OilNet40Spec(input_size=args.size, input_channels=variant.output_channels)
    cfg = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size,
        optimizer=NadamConfig(learning_rate=args.lr),
        augment=None if args.no_augment else TrainConfig().augment,
        variant=variant, crop_margin=args.crop_margin, seed=args.seed,
    )
    model = OilNet40(spec, seed=args.seed)
    ckpt, report = train(model, _load_split_samples(dataset, "train"),
                         _load_split_samples(dataset, "val"), cfg)
    save_checkpoint(ckpt, args.out)
    print(f"best epoch {report.best_epoch} val_acc {report.best_val_accuracy:.4f} -> {args.out}")
    if args.report:
        _write_or_print(report.to_text(), args.report)
    return 0


def cmd_tune(args) -> int:
    dataset = DatasetDir(args.data)
    variant = PreprocessVariant.parse(args.variant)
    space = SearchSpace(
        dense1=tuple(int(v) for v in args.dense1.split(",")),
        dense2=tuple(int(v) for v in args.dense2.split(",")),
        learning_rates=tuple(float(v) for v in args.lr_list.split(",")),
        budget=args.budget, seed=args.seed,
    )
    base_spec = OilNet40Spec(input_size=args.size, input_channels=variant.output_channels)
    base_cfg = TrainConfig(epochs=args.trial_epochs, batch_size=args.batch_size,
                           augment=None, variant=variant, seed=args.seed)
    trials, best = random_search(space, _load_split_samples(dataset, "train"),
                                 _load_split_samples(dataset, "val"), base_spec, base_cfg)
    text = trials_to_text(trials)
    _write_or_print(text, args.out)
    print(f"best: dense1={best.dense1} dense2={best.dense2} lr={best.learning_rate} "
          f"val_acc={best.val_accuracy:.4f}")
    return 0


def cmd_eval_cls(args) -> int:
    from .oilnet.model import predict
    from .oilnet.train import make_example
    from .pipeline.metrics import confusion_and_metrics

    dataset = DatasetDir(args.data)
    samples = _load_split_samples(dataset, args.split)
    if any(s.label is None for s in samples):
        raise ConfigError("eval-cls needs class labels for every sample in the split")
    rows = []
    for pair in args.checkpoint:
        if "=" not in pair:
            raise ConfigError(f"--checkpoint takes variant=path, got {pair!r}")
        vname, path = pair.split("=", 1)
        variant = PreprocessVariant.parse(vname)
        ckpt = load_checkpoint(path)
        if variant.output_channels != ckpt.spec.input_channels:
            raise ConfigError(f"variant {vname!r} is {variant.output_channels}-channel but "
                              f"{path} expects {ckpt.spec.input_channels}")
        model = ckpt.build_model()
        cfg = TrainConfig(augment=None, variant=variant, crop_margin=args.crop_margin)
        preds, labels = [], []
        for s in samples:
            x = make_example(s, model.spec, cfg)
            _, label = predict(model, x)
            preds.append(label)
            labels.append(s.label)
        cm = confusion_and_metrics(preds, labels)
        rows.append((variant.value, path, cm))
        print(f"[{variant.value}]")
        print(format_confusion_table(cm))
    _write_or_print(render_eval_cls_report(rows), args.out)
    return 0


def cmd_eval_det(args) -> int:
    dataset = DatasetDir(args.data)
    stems = dataset.stems(args.split) if args.split else dataset.stems()
    gt = {stem: dataset.load(stem).boxes for stem in stems}
    dets = [d for stem, lst in parse_detections_file(args.detections).items() for d in lst]
    unknown = {d.image_id for d in dets} - set(gt)
    if unknown:
        raise ConfigError(f"detections reference unknown image ids: {sorted(unknown)[:5]}")
    result = map_eval(dets, gt)
    _write_or_print(result.to_text(), args.out)
    print(f"mAP 0.5:0.95 = {result.mean_ap:.4f}")
    return 0


def cmd_infer(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    image = load_image(args.image)
    stem = os.path.splitext(os.path.basename(args.image))[0]
    cfg = _pipeline_config(args)
    if args.detector and args.detector.startswith("file:"):
        detector = FileDetector(args.detector[5:])
    else:
        from .data.labels import read_label_file
        label_path = args.label_file or os.path.join(
            os.path.dirname(os.path.dirname(args.image)), "labels", stem + ".txt")
        boxes = read_label_file(label_path) if os.path.isfile(label_path) else []
        detector = FixtureDetector({stem: boxes})
    pipe = Pipeline(cfg, detector, ckpt)
    result = pipe.run_frame(stem, image)
    if result.status == "Classified":
        name = "Anomaly" if result.label == 1 else "Normal"
        print(f"{stem}: {result.status} probability={result.probability:.6f} label={name}")
    else:
        print(f"{stem}: {result.status}")
    if args.dump_activations:
        model = pipe.model
        from .detect.geometry import crop as crop_box
        from .imageproc.preprocess import normalize, preprocess
        from .imageproc.resize import resize_bilinear
        if result.detection is not None:
            patch = crop_box(image, result.detection.box, cfg.crop_margin)
        else:
            patch = image
        patch = preprocess(patch, cfg.variant, cfg.clahe)
        size = model.spec.input_size
        tensor = normalize(resize_bilinear(patch, size, size))
        os.makedirs(args.dump_activations, exist_ok=True)
        for i, m in enumerate(dump_activations(model, tensor, args.conv_index)):
            write_pnm(os.path.join(args.dump_activations,
                                   f"{stem}_conv{args.conv_index}_{i:02d}.pgm"), m)
        print(f"wrote activation maps to {args.dump_activations}")
    return 0


def cmd_stream(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    cfg = _pipeline_config(args)
    dataset = None
    frames_dir = args.frames
    if os.path.isdir(os.path.join(args.frames, "images")):
        dataset = DatasetDir(args.frames)
        frames_dir = dataset.images
    detector = _detector_for(args, dataset)
    labels = None
    labels_path = args.labels or (os.path.join(args.frames, "classes.csv")
                                  if dataset is not None else None)
    if labels_path and os.path.isfile(labels_path):
        labels = read_classes(labels_path)
    pipe = Pipeline(cfg, detector, ckpt)

    names = sorted(n for n in os.listdir(frames_dir)
                   if os.path.splitext(n)[1] in (".ppm", ".pgm", ".png"))
    if args.split:
        if dataset is None or dataset.manifest is None:
            raise ConfigError("--split needs a dataset directory with split.json")
        wanted = set(getattr(dataset.manifest, args.split))
        names = [n for n in names if os.path.splitext(n)[0] in wanted]

    def frames():
        for name in names:
            stem = os.path.splitext(name)[0]
            yield stem, load_image(os.path.join(frames_dir, name))

    report = pipe.run_stream(frames(), labels)
    _write_or_print(render_run_report(report), args.out)
    print(f"{len(report.frames)} frames, {report.n_no_detection} without detection, "
          f"fps {report.fps:.2f}")
    if report.confusion is not None:
        print(format_confusion_table(report.confusion))
    return 0


# -- parser -------------------------------------------------------------------

def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", default="original",
                   choices=[v.value for v in PreprocessVariant])
    p.add_argument("--detector", default=None,
                   help="'fixture' (default) or 'file:<detections path>'")
    p.add_argument("--crop-margin", type=float, default=0.1)
    p.add_argument("--clahe-grid", type=int, default=8)
    p.add_argument("--clahe-clip", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="oilspot", description=__doc__)
    top.add_argument("--config", default=None, help="flat key=value defaults file")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a deterministic synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--train", type=_counts, default=(300, 300), metavar="N,A")
    p.add_argument("--val", type=_counts, default=(50, 50), metavar="N,A")
    p.add_argument("--test", type=_counts, default=(50, 50), metavar="N,A")
    p.add_argument("--size", type=int, default=160)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a classifier on a dataset directory")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--variant", default="original",
                   choices=[v.value for v in PreprocessVariant])
    p.add_argument("--size", type=int, default=120)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--crop-margin", type=float, default=0.1)
    p.add_argument("--no-augment", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="search dense widths and learning rate")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--variant", default="original",
                   choices=[v.value for v in PreprocessVariant])
    p.add_argument("--size", type=int, default=48)
    p.add_argument("--dense1", default="400,100")
    p.add_argument("--dense2", default="64,16")
    p.add_argument("--lr-list", default="0.001,0.01")
    p.add_argument("--budget", type=int, default=4)
    p.add_argument("--trial-epochs", type=int, default=3)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval-cls", help="confusion matrices per preprocess variant")
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--checkpoint", action="append", required=True,
                   metavar="VARIANT=PATH")
    p.add_argument("--crop-margin", type=float, default=0.1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_cls)

    p = sub.add_parser("eval-det", help="mAP 0.5:0.95 for a detections file")
    p.add_argument("--detections", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_det)

    p = sub.add_parser("infer", help="classify one image end to end")
    p.add_argument("--image", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--label-file", default=None)
    p.add_argument("--dump-activations", default=None, metavar="DIR")
    p.add_argument("--conv-index", type=int, default=3, choices=(1, 2, 3))
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("stream", help="run a frame directory through the pipeline")
    p.add_argument("--frames", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--split", default=None)
    p.add_argument("--out", default=None)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_stream)

    return top


def _apply_config_defaults(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    """Inject values from --config as defaults (explicit flags win; keys the
    active subcommand does not define are ignored)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    cfg = parse_config_file(argv[i + 1])
    sub_actions = next(a for a in parser._actions
                       if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in argv if not a.startswith("-") and a in sub_actions.choices), None)
    if command is None:
        return argv
    sub = sub_actions.choices[command]
    known = {s for action in sub._actions for s in action.option_strings}
    out = list(argv)
    for key, value in cfg.items():
        flag = "--" + key.replace("_", "-")
        if flag in known and flag not in out:
            out += [flag, value]
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_defaults(argv, parser)
        args = parser.parse_args(argv)
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
