"""CLI subcommands end to end at desk scale."""
import os

import pytest

from oilspot.cli import main
from oilspot.data import DatasetDir
from oilspot.detect import Detection, write_detections_file
from oilspot.oilnet import load_checkpoint
from oilspot.pipeline import stable_lines


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("ds")
    rc = main(["gen-data", "--out", str(root), "--train", "6,6", "--val", "3,3",
               "--test", "3,3", "--size", "96", "--seed", "11"])
    assert rc == 0
    return root


@pytest.fixture(scope="module")
def checkpoint(dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt") / "model.onet40"
    rc = main(["train", "--data", str(dataset), "--out", str(out), "--size", "48",
               "--epochs", "4", "--batch-size", "4", "--no-augment", "--seed", "5"])
    assert rc == 0
    return out


def test_gen_data_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for d in (a, b):
        rc = main(["gen-data", "--out", str(d), "--train", "2,2", "--val", "1,1",
                   "--test", "1,1", "--size", "64", "--seed", "7"])
        assert rc == 0
    for rel in ("classes.csv", "split.json", "images/train_n0000.ppm"):
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_train_writes_checkpoint_and_report(dataset, tmp_path):
    out = tmp_path / "m.onet40"
    rep = tmp_path / "train.txt"
    rc = main(["train", "--data", str(dataset), "--out", str(out), "--size", "48",
               "--epochs", "2", "--batch-size", "4", "--no-augment", "--seed", "3",
               "--report", str(rep)])
    assert rc == 0
    ckpt = load_checkpoint(out)
    assert ckpt.spec.input_size == 48
    text = rep.read_text()
    assert text.startswith("report: train-report/v1")
    assert len([l for l in text.splitlines() if l.startswith("epoch ")]) == 2


@pytest.fixture(scope="module")
def gray_checkpoint(dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt") / "gray.onet40"
    rc = main(["train", "--data", str(dataset), "--out", str(out), "--size", "48",
               "--epochs", "2", "--batch-size", "4", "--no-augment", "--seed", "6",
               "--variant", "gray-clahe"])
    assert rc == 0
    return out


def test_eval_cls_emits_four_matrices(dataset, checkpoint, gray_checkpoint, tmp_path):
    out = tmp_path / "eval.txt"
    rc = main(["eval-cls", "--data", str(dataset), "--split", "test",
               "--checkpoint", f"original={checkpoint}",
               "--checkpoint", f"clahe={checkpoint}",
               "--checkpoint", f"gray-clahe={gray_checkpoint}",
               "--checkpoint", f"clahe-gray={gray_checkpoint}",
               "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("report: eval-cls/v1")
    for name in ("original", "clahe", "gray-clahe", "clahe-gray"):
        assert sum(1 for l in text.splitlines()
                   if l.startswith(f"variant {name} tp")) == 1


def test_eval_cls_byte_reproducible(dataset, checkpoint, tmp_path):
    texts = []
    for name in ("e1.txt", "e2.txt"):
        out = tmp_path / name
        rc = main(["eval-cls", "--data", str(dataset), "--split", "val",
                   "--checkpoint", f"original={checkpoint}", "--out", str(out)])
        assert rc == 0
        texts.append(out.read_text())
    assert stable_lines(texts[0]) == stable_lines(texts[1])


def test_eval_cls_rejects_channel_mismatch(dataset, checkpoint):
    rc = main(["eval-cls", "--data", str(dataset),
               "--checkpoint", f"gray-clahe={checkpoint}"])
    assert rc == 1


def test_eval_det_perfect_fixture_map(dataset, tmp_path):
    ds = DatasetDir(dataset)
    dets = []
    for stem in ds.stems("test"):
        for box in ds.load(stem).boxes:
            dets.append(Detection(stem, box, 1.0))
    det_file = tmp_path / "dets.txt"
    write_detections_file(det_file, dets)
    out = tmp_path / "det-eval.txt"
    rc = main(["eval-det", "--detections", str(det_file), "--data", str(dataset),
               "--split", "test", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    # boxes round-tripped at 1e-6 still overlap themselves at IoU ~ 1
    mean_line = next(l for l in text.splitlines() if l.startswith("mean_ap"))
    assert float(mean_line.split()[1]) > 0.999


def test_infer_single_image(dataset, checkpoint, capsys):
    ds = DatasetDir(dataset)
    stem = ds.stems("test")[0]
    rc = main(["infer", "--image", str(ds.image_path(stem)),
               "--checkpoint", str(checkpoint)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "Classified" in out


def test_infer_dump_activations(dataset, checkpoint, tmp_path, capsys):
    ds = DatasetDir(dataset)
    stem = ds.stems("test")[0]
    act_dir = tmp_path / "acts"
    rc = main(["infer", "--image", str(ds.image_path(stem)),
               "--checkpoint", str(checkpoint),
               "--dump-activations", str(act_dir), "--conv-index", "3"])
    assert rc == 0
    maps = sorted(os.listdir(act_dir))
    assert len(maps) == 32
    from oilspot.imageproc import read_pnm
    m = read_pnm(act_dir / maps[0])
    assert m.shape == (6, 6, 1)  # 48-input spec: 48/8


def test_stream_reports_fps_and_confusion(dataset, checkpoint, tmp_path, capsys):
    out = tmp_path / "stream.txt"
    rc = main(["stream", "--frames", str(dataset), "--checkpoint", str(checkpoint),
               "--split", "test", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("report: stream/v1")
    assert "confusion tp" in text
    fps_line = next(l for l in text.splitlines() if l.startswith("fps"))
    assert float(fps_line.split()[1]) > 0
    assert len([l for l in text.splitlines() if l.startswith("frame ")]) == 6


def test_stream_stable_lines_reproducible(dataset, checkpoint, tmp_path):
    outs = []
    for name in ("s1.txt", "s2.txt"):
        out = tmp_path / name
        rc = main(["stream", "--frames", str(dataset), "--checkpoint", str(checkpoint),
                   "--split", "val", "--out", str(out)])
        assert rc == 0
        outs.append(out.read_text())
    assert stable_lines(outs[0]) == stable_lines(outs[1])


def test_config_file_supplies_defaults(dataset, checkpoint, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"checkpoint = {checkpoint}\nvariant = original\n")
    ds = DatasetDir(dataset)
    stem = ds.stems("val")[0]
    rc = main(["--config", str(cfg), "infer", "--image", str(ds.image_path(stem)),
               "--checkpoint", str(checkpoint)])
    assert rc == 0


def test_tune_runs_tiny_budget(dataset, tmp_path, capsys):
    out = tmp_path / "tune.txt"
    rc = main(["tune", "--data", str(dataset), "--size", "48", "--dense1", "16",
               "--dense2", "8", "--lr-list", "0.001,0.01", "--budget", "2",
               "--trial-epochs", "1", "--batch-size", "4", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("report: tune/v1")
    assert len([l for l in text.splitlines() if l.startswith("rank ")]) == 2


def test_unknown_detector_source_fails_cleanly(dataset, checkpoint, capsys):
    rc = main(["stream", "--frames", str(dataset), "--checkpoint", str(checkpoint),
               "--detector", "magic"])
    assert rc == 1
    assert "detector" in capsys.readouterr().err


def test_missing_image_fails_cleanly(checkpoint, capsys):
    rc = main(["infer", "--image", "/nonexistent.ppm", "--checkpoint", str(checkpoint)])
    assert rc == 1
