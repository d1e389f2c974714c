"""Tests for the ucolor command-line verbs and exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from conftest import random_image, uniform_image
from ucolor.cli import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, build_parser, main
from ucolor.config import RunConfig, save_config
from ucolor.io.images import image_read, image_write
from ucolor.io.manifest import DatasetManifest, ManifestEntry, save_manifest
from ucolor.io.weights_file import load_weights, save_weights
from ucolor.models import Image
from ucolor.network import ModelConfig, ModelWeights, parameter_shapes

DATA = Path(__file__).parent / "data"
TINY_MODEL = {"base_width": 4, "attention_reduction": 2, "prior_patch": 3}


@pytest.fixture
def tiny_run_config(tmp_path):
    config = RunConfig.from_mapping(
        {
            "model": TINY_MODEL,
            "train": {"steps": 2, "patch": 16, "batch_size": 1, "learning_rate": 1e-3},
        }
    )
    return save_config(config, tmp_path / "run.json")


@pytest.fixture
def paired_manifest(tmp_path, rng):
    image_write(random_image(rng, 20, 20), tmp_path / "data" / "in" / "a.ppm")
    image_write(random_image(rng, 20, 20), tmp_path / "data" / "gt" / "a.ppm")
    manifest = DatasetManifest([ManifestEntry("in/a.ppm", "gt/a.ppm")], root=tmp_path / "data")
    return save_manifest(manifest, tmp_path / "manifest.json")


def test_parser_lists_every_verb():
    """All seven verbs are registered."""
    parser = build_parser()
    verbs = parser._subparsers._group_actions[0].choices
    assert set(verbs) == {"enhance", "transmission", "restore", "synthesize", "train", "evaluate", "config"}


def test_usage_errors_exit_one(capsys):
    """Missing verbs, bad flags and conflicting options are usage errors."""
    assert main([]) == EXIT_USAGE
    assert main(["enhance", "--out", "x.ppm"]) == EXIT_USAGE
    assert main(["transmission", "--input", "a.ppm", "--out", "b.pgm", "--prior", "ibla"]) == EXIT_USAGE
    assert main(["config", "dump", "--quiet", "--verbose"]) == EXIT_USAGE
    assert "ucolor: error:" in capsys.readouterr().err


def test_bad_thread_environment(monkeypatch, capsys):
    """UCOLOR_THREADS must hold a positive integer."""
    monkeypatch.setenv("UCOLOR_THREADS", "many")
    assert main(["config", "dump"]) == EXIT_USAGE
    assert "UCOLOR_THREADS" in capsys.readouterr().err


# --------------------------------------------------------------------------- enhance


def test_enhance_single_image(tmp_path, image_file, tiny_run_config):
    """A single image is enhanced at its own size."""
    out = tmp_path / "out.ppm"
    code = main(["enhance", "--input", str(image_file), "--config", str(tiny_run_config), "--out", str(out)])
    assert code == EXIT_OK
    assert image_read(out).shape == image_read(image_file).shape


def test_enhance_is_byte_identical(tmp_path, image_file, tiny_run_config):
    """The same inputs and seed write the same bytes."""
    outputs = []
    for name in ("a.ppm", "b.ppm"):
        out = tmp_path / name
        main(["enhance", "--input", str(image_file), "--config", str(tiny_run_config),
              "--seed", "3", "--out", str(out)])
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def _channel_swap_weights() -> ModelWeights:
    """Single-path weights whose output is the input with channels moved to (b, r, g).

    Every parameter is zero except unit centre taps along one path from the
    input to the reconstruction conv, so the result is exact at 8 bits.
    """
    cfg = ModelConfig(
        base_width=4, use_hsv=False, use_lab=False, use_mtgm=False, use_cam=False, prior_patch=3
    )
    params = {name: np.zeros(shape) for name, shape in parameter_shapes(cfg).items()}
    for channel in range(3):
        params["enc.rgb.1.entry.kernel"][channel, channel, 1, 1] = 1.0
        params["dec.1.merge.kernel"][channel, channel, 1, 1] = 1.0
    for out_channel, in_channel in enumerate((2, 0, 1)):
        params["dec.out.kernel"][out_channel, in_channel, 1, 1] = 1.0
    return ModelWeights(cfg, params)


def test_enhance_matches_golden_output(tmp_path):
    """Fixed weights turn the vendored input into the vendored expected bytes."""
    weights = save_weights(_channel_swap_weights(), tmp_path / "swap.bin")
    out = tmp_path / "enhanced.ppm"
    code = main(["enhance", "--input", str(DATA / "enhance_input.ppm"), "--weights", str(weights),
                 "--out", str(out)])
    assert code == EXIT_OK
    assert out.read_bytes() == (DATA / "enhance_expected.ppm").read_bytes()


def test_enhance_with_weights_file(tmp_path, image_file):
    """Trained weights are loaded together with their config."""
    weights = save_weights(
        ModelWeights.initialize(ModelConfig(**TINY_MODEL), seed=1), tmp_path / "w.bin"
    )
    out = tmp_path / "out.png"
    assert main(["enhance", "--input", str(image_file), "--weights", str(weights), "--out", str(out)]) == EXIT_OK
    assert out.is_file()


def test_enhance_reports_incompatible_weights(tmp_path, image_file, tiny_run_config, capsys):
    """Weights for another architecture fail as an IO error naming the parameter."""
    weights = save_weights(
        ModelWeights.initialize(ModelConfig(**TINY_MODEL, use_cam=False)), tmp_path / "w.bin"
    )
    code = main(["enhance", "--input", str(image_file), "--weights", str(weights),
                 "--config", str(tiny_run_config), "--out", str(tmp_path / "o.ppm")])
    assert code == EXIT_IO
    assert "parameter 'dec.3.cam.fc1.weight' missing" in capsys.readouterr().err


def test_enhance_directory(tmp_path, rng, tiny_run_config):
    """Directory mode keeps relative names."""
    image_write(random_image(rng, 8, 8), tmp_path / "in" / "x.ppm")
    image_write(random_image(rng, 8, 12), tmp_path / "in" / "sub" / "y.ppm")
    code = main(["enhance", "--input-dir", str(tmp_path / "in"), "--config", str(tiny_run_config),
                 "--threads", "2", "--out", str(tmp_path / "out")])
    assert code == EXIT_OK
    assert (tmp_path / "out" / "x.ppm").is_file()
    assert image_read(tmp_path / "out" / "sub" / "y.ppm").shape == (8, 12, 3)


def test_missing_input_is_io_error(tmp_path, tiny_run_config):
    """Unreadable inputs exit with the IO code."""
    code = main(["enhance", "--input", str(tmp_path / "none.ppm"), "--config", str(tiny_run_config),
                 "--out", str(tmp_path / "o.ppm")])
    assert code == EXIT_IO


# --------------------------------------------------------------------------- physics verbs


def test_transmission_of_uniform_image(tmp_path, capsys):
    """A uniform image prints its own color as the background light."""
    source = image_write(uniform_image([0.2, 0.4, 0.6]), tmp_path / "u.ppm")
    code = main(["transmission", "--input", str(source), "--patch", "3", "--out", str(tmp_path / "t.pgm")])
    assert code == EXIT_OK
    line = capsys.readouterr().out.strip()
    assert line.startswith("A = ")
    values = [float(v) for v in line[4:].split()]
    np.testing.assert_allclose(values, [0.2, 0.4, 0.6], atol=1e-6)


def test_reverse_transmission_is_complement(tmp_path, image_file):
    """The reverse map is 255 minus the forward map at 8 bits."""
    forward, reverse = tmp_path / "t.pgm", tmp_path / "r.pgm"
    assert main(["transmission", "--input", str(image_file), "--patch", "3", "--out", str(forward)]) == 0
    assert main(["transmission", "--input", str(image_file), "--patch", "3", "--reverse",
                 "--out", str(reverse)]) == 0
    f = np.round(image_read(forward).pixels[..., 0] * 255).astype(int)
    r = np.round(image_read(reverse).pixels[..., 0] * 255).astype(int)
    np.testing.assert_array_equal(r, 255 - f)


def test_transmission_priors_differ(tmp_path):
    """The three priors write different maps for a red-deficient object in clear water."""
    pixels = np.empty((16, 16, 3))
    pixels[...] = [0.2, 0.6, 0.7]
    pixels[4:12, 4:12] = [0.05, 0.5, 0.6]
    source = image_write(Image(pixels), tmp_path / "s.ppm")
    maps = {}
    for prior in ("gdcp", "dcp", "udcp"):
        out = tmp_path / f"{prior}.pgm"
        assert main(["transmission", "--input", str(source), "--prior", prior, "--patch", "3",
                     "--out", str(out)]) == EXIT_OK
        maps[prior] = out.read_bytes()
    assert len(set(maps.values())) == 3


def test_bad_patch_is_usage_error(tmp_path, image_file):
    """Even patch sizes are rejected."""
    assert main(["transmission", "--input", str(image_file), "--patch", "4",
                 "--out", str(tmp_path / "t.pgm")]) == EXIT_USAGE


def test_restore(tmp_path, image_file, capsys):
    """Classical restoration writes an image and prints the light."""
    out = tmp_path / "r.ppm"
    assert main(["restore", "--input", str(image_file), "--patch", "3", "--out", str(out)]) == EXIT_OK
    assert image_read(out).shape == (16, 16, 3)
    assert capsys.readouterr().out.startswith("A = ")


def test_synthesize_extremes(tmp_path, image_file):
    """t = 1 reproduces the input and t = 0 paints the background light."""
    clear, veiled = tmp_path / "clear.ppm", tmp_path / "veiled.ppm"
    assert main(["synthesize", "--clean", str(image_file), "--uniform-t", "1",
                 "--background", "0.2,0.4,0.6", "--out", str(clear)]) == EXIT_OK
    assert clear.read_bytes() == image_file.read_bytes()
    assert main(["synthesize", "--clean", str(image_file), "--uniform-t", "0",
                 "--background", "0.2,0.4,0.6", "--out", str(veiled)]) == EXIT_OK
    np.testing.assert_allclose(image_read(veiled).pixels[3, 5], [51 / 255, 102 / 255, 153 / 255])


def test_synthesize_from_transmission_image(tmp_path, image_file):
    """A grayscale transmission image drives the degradation."""
    t_path = image_write(uniform_image(1.0), tmp_path / "t.ppm")
    out = tmp_path / "o.ppm"
    assert main(["synthesize", "--clean", str(image_file), "--transmission", str(t_path),
                 "--background", "0.5,0.5,0.5", "--out", str(out)]) == EXIT_OK
    assert out.read_bytes() == image_file.read_bytes()


def test_synthesize_rejects_bad_arguments(tmp_path, image_file):
    """Malformed lights and out-of-range transmission are usage errors."""
    base = ["synthesize", "--clean", str(image_file), "--out", str(tmp_path / "o.ppm")]
    assert main(base + ["--uniform-t", "0.5", "--background", "0.5,0.5"]) == EXIT_USAGE
    assert main(base + ["--uniform-t", "0.5", "--background", "red"]) == EXIT_USAGE
    assert main(base + ["--uniform-t", "1.5", "--background", "0.5,0.5,0.5"]) == EXIT_USAGE
    assert not (tmp_path / "o.ppm").exists()


# --------------------------------------------------------------------------- train / evaluate / config


def test_train_writes_weights_and_trace(tmp_path, paired_manifest, tiny_run_config, capsys):
    """Training writes loadable weights, a CSV trace and the final loss."""
    weights, trace = tmp_path / "w.bin", tmp_path / "trace.csv"
    code = main(["train", "--manifest", str(paired_manifest), "--config", str(tiny_run_config),
                 "--out-weights", str(weights), "--trace", str(trace)])
    assert code == EXIT_OK
    assert load_weights(weights).config == ModelConfig(**TINY_MODEL)
    frame = pd.read_csv(trace)
    assert list(frame.columns) == ["step", "recon", "perceptual", "total"]
    assert list(frame["step"]) == [1, 2]
    assert capsys.readouterr().out.startswith("final loss: ")


def test_train_zero_steps_writes_initial_weights(tmp_path, paired_manifest):
    """steps=0 saves the seeded initialization."""
    config = save_config(
        RunConfig.from_mapping({"model": TINY_MODEL, "train": {"steps": 0, "patch": 16}, "seed": 4}),
        tmp_path / "zero.json",
    )
    weights = tmp_path / "w.bin"
    assert main(["train", "--manifest", str(paired_manifest), "--config", str(config),
                 "--out-weights", str(weights)]) == EXIT_OK
    expected = ModelWeights.initialize(ModelConfig(**TINY_MODEL), seed=4).as_float32()
    loaded = load_weights(weights)
    for name in expected:
        np.testing.assert_array_equal(loaded[name], expected[name])


def test_train_without_outputs_is_usage_error(paired_manifest):
    """Weights output must come from a flag or the config."""
    assert main(["train", "--manifest", str(paired_manifest)]) == EXIT_USAGE


def test_train_non_finite_exits_three(tmp_path, paired_manifest):
    """A diverging run exits with the numeric failure code."""
    config = save_config(
        RunConfig.from_mapping(
            {"model": TINY_MODEL, "train": {"steps": 1, "patch": 16, "batch_size": 1,
                                            "perceptual_weight": 1e308, "reduction": "sum"}}
        ),
        tmp_path / "huge.json",
    )
    code = main(["train", "--manifest", str(paired_manifest), "--config", str(config),
                 "--out-weights", str(tmp_path / "w.bin")])
    assert code == EXIT_NUMERIC


def test_evaluate_identical_results(tmp_path, paired_manifest, capsys):
    """Results equal to the references report an infinite PSNR."""
    results = tmp_path / "results"
    reference = image_read(tmp_path / "data" / "gt" / "a.ppm")
    image_write(reference, results / "in" / "a.ppm")
    report = tmp_path / "report.json"
    code = main(["evaluate", "--manifest", str(paired_manifest), "--results", str(results),
                 "--out-report", str(report)])
    assert code == EXIT_OK
    payload = json.loads(report.read_text())
    assert payload["aggregate"]["psnr_db"] == "inf"
    assert payload["aggregate"]["mse_255sq"] == 0.0
    assert "mean" in capsys.readouterr().out


def test_evaluate_missing_results_exit_two(tmp_path, paired_manifest):
    """Missing result files are enumerated and exit with the IO code."""
    report = tmp_path / "report.json"
    code = main(["evaluate", "--manifest", str(paired_manifest), "--results", str(tmp_path / "none"),
                 "--out-report", str(report)])
    assert code == EXIT_IO
    assert json.loads(report.read_text())["missing"] == ["in/a.ppm"]


def test_config_dump_then_validate(tmp_path, capsys):
    """A dumped config validates cleanly."""
    assert main(["config", "dump", "--preset", "no_cam", "--seed", "7"]) == EXIT_OK
    dumped = capsys.readouterr().out
    payload = json.loads(dumped)
    assert payload["model"]["use_cam"] is False and payload["seed"] == 7
    path = tmp_path / "dumped.json"
    path.write_text(dumped)
    assert main(["config", "validate", "--config", str(path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == f"{path}: ok"


def test_config_validate_lists_violations(tmp_path, capsys):
    """Unknown keys and a reduction that does not divide base_width are both reported."""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model": {"base_width": 6, "attention_reduction": 4, "colour": 1}}))
    assert main(["config", "validate", "--config", str(path)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "model: unknown key 'colour'" in err
    assert "must divide" in err
