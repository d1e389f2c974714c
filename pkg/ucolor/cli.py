"""Command-line interface for ucolor."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from ucolor.config import RunConfig, load_config, read_config_document
from ucolor.configbase import PRESET_NAMES
from ucolor.enhancer import enhancer
from ucolor.errors import (
    ColorSpaceError,
    ConfigError,
    ImageFormatError,
    ManifestError,
    NumericError,
    PhysicsError,
    ShapeError,
    WeightsFormatError,
)
from ucolor.io.files import atomic_write_text
from ucolor.io.images import MAXVAL, gray_write_uint8, image_read, image_write, to_uint8
from ucolor.io.manifest import load_manifest
from ucolor.io.weights_file import save_weights
from ucolor.metrics.colorchecker import load_layout
from ucolor.metrics.evaluate import evaluate
from ucolor.models import BackgroundLight, TransmissionMap
from ucolor.network.config import KNOWN_PRIORS
from ucolor.physics import (
    DEFAULT_PATCH,
    DEFAULT_T_FLOOR,
    classical_restore,
    estimate_background_light,
    get_prior,
    synthesize,
)
from ucolor.training.trainer import train, write_trace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

THREADS_ENV = "UCOLOR_THREADS"


class UsageError(Exception):
    """Bad command-line usage; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer; got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer; got {raw!r}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer; got {text}")
    return value


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Seed overriding the configured one.")
    common.add_argument(
        "--threads",
        type=_positive_int,
        help=f"Worker threads for directory/batch work (default: ${THREADS_ENV} or 1).",
    )
    common.add_argument("--preset", choices=PRESET_NAMES, help="Named ablation preset.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")
    verbosity.add_argument("--verbose", action="store_true", help="Log debug detail.")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(
        prog="ucolor",
        description="Underwater image enhancement with transmission-guided color embedding.",
    )
    verbs = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = verbs.add_parser("enhance", parents=[common], help="Enhance images with a trained model.")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", metavar="PATH", help="Single input image.")
    source.add_argument("--input-dir", metavar="DIR", help="Directory of input images.")
    p.add_argument("--weights", metavar="PATH", help="Weights file (untrained weights if omitted).")
    p.add_argument("--config", metavar="PATH", help="Run config JSON.")
    p.add_argument("--prior", choices=KNOWN_PRIORS, help="Override the transmission prior.")
    p.add_argument("--out", required=True, metavar="PATH", help="Output image or directory.")
    p.set_defaults(handler=cmd_enhance)

    p = verbs.add_parser(
        "transmission", parents=[common], help="Estimate a transmission map and background light."
    )
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--prior", choices=KNOWN_PRIORS, default="gdcp")
    p.add_argument("--patch", type=int, default=DEFAULT_PATCH, help="Odd patch size.")
    p.add_argument("--reverse", action="store_true", help="Write the reverse map 1 - T.")
    p.add_argument("--out", required=True, metavar="PATH", help="Grayscale .pgm/.ppm/.png output.")
    p.set_defaults(handler=cmd_transmission)

    p = verbs.add_parser("restore", parents=[common], help="Classical prior-based restoration.")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--prior", choices=KNOWN_PRIORS, default="gdcp")
    p.add_argument("--patch", type=int, default=DEFAULT_PATCH)
    p.add_argument("--t-floor", type=float, default=DEFAULT_T_FLOOR)
    p.add_argument("--out", required=True, metavar="PATH")
    p.set_defaults(handler=cmd_restore)

    p = verbs.add_parser(
        "synthesize", parents=[common], help="Degrade a clean image with the formation model."
    )
    p.add_argument("--clean", required=True, metavar="PATH")
    t_source = p.add_mutually_exclusive_group(required=True)
    t_source.add_argument("--transmission", metavar="PATH", help="Grayscale transmission image.")
    t_source.add_argument("--uniform-t", type=float, metavar="T", help="Constant transmission.")
    p.add_argument("--background", required=True, metavar="R,G,B", help="Background light.")
    p.add_argument("--out", required=True, metavar="PATH")
    p.set_defaults(handler=cmd_synthesize)

    p = verbs.add_parser("train", parents=[common], help="Train the network on a paired manifest.")
    p.add_argument("--manifest", metavar="PATH", help="Dataset manifest (or paths.manifest).")
    p.add_argument("--config", metavar="PATH", help="Run config JSON.")
    p.add_argument("--out-weights", metavar="PATH", help="Weights output (or paths.weights).")
    p.add_argument("--trace", metavar="PATH", help="Loss trace CSV (or paths.trace).")
    p.set_defaults(handler=cmd_train)

    p = verbs.add_parser("evaluate", parents=[common], help="Score results against a manifest.")
    p.add_argument("--manifest", required=True, metavar="PATH")
    p.add_argument("--results", required=True, metavar="DIR")
    p.add_argument("--layout", metavar="PATH", help="Color-checker layout JSON.")
    p.add_argument(
        "--no-reference", action="store_true", help="Skip full-reference metrics (PSNR/MSE)."
    )
    p.add_argument("--out-report", metavar="PATH", help="JSON report output.")
    p.set_defaults(handler=cmd_evaluate)

    p = verbs.add_parser("config", parents=[common], help="Dump or validate a run config.")
    p.add_argument("action", choices=("dump", "validate"))
    p.add_argument("--config", metavar="PATH", help="Config to dump or validate.")
    p.set_defaults(handler=cmd_config)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if args.preset:
        config = config.with_preset(args.preset)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def cmd_enhance(args: argparse.Namespace) -> int:
    explicit = args.config or args.preset
    config = _run_config(args)
    if args.weights is None:
        logger.warning("no --weights given; using untrained weights from seed %d", config.seed)
    tool = enhancer(
        weights_path=args.weights,
        config=config.model if explicit or args.weights is None else None,
        prior=args.prior,
        seed=config.seed,
    )
    if args.input_dir:
        written = tool.enhance_directory(args.input_dir, args.out, threads=args.threads)
        logger.info("wrote %d images to %s", len(written), args.out)
    else:
        tool.enhance_file(args.input, args.out)
        logger.info("wrote %s", args.out)
    return EXIT_OK


def cmd_transmission(args: argparse.Namespace) -> int:
    img = image_read(args.input)
    light = estimate_background_light(img)
    forward = to_uint8(get_prior(args.prior).estimate(img, light, args.patch).values)
    # Reversing the quantized map keeps the two outputs exact complements.
    samples = MAXVAL - forward if args.reverse else forward
    gray_write_uint8(samples, args.out)
    print("A = " + " ".join(f"{value:.6f}" for value in light))
    return EXIT_OK


def cmd_restore(args: argparse.Namespace) -> int:
    result = classical_restore(
        image_read(args.input), args.prior, patch=args.patch, t_floor=args.t_floor
    )
    image_write(result.image, args.out)
    print("A = " + " ".join(f"{value:.6f}" for value in result.light))
    return EXIT_OK


def _parse_background(text: str) -> BackgroundLight:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"--background expects r,g,b floats; got {text!r}") from None
    if len(values) != 3:
        raise UsageError(f"--background expects three components; got {len(values)}")
    return BackgroundLight(*values)


def cmd_synthesize(args: argparse.Namespace) -> int:
    clean = image_read(args.clean)
    light = _parse_background(args.background)
    if args.uniform_t is not None:
        values = np.full((clean.height, clean.width), args.uniform_t)
    else:
        values = image_read(args.transmission).pixels[..., 0]
    degraded = synthesize(clean, TransmissionMap(values), light)
    image_write(degraded, args.out)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    config = _run_config(args)
    manifest_path = args.manifest or config.paths.manifest
    weights_path = args.out_weights or config.paths.weights
    trace_path = args.trace or config.paths.trace
    if manifest_path is None or weights_path is None:
        raise UsageError("train needs --manifest and --out-weights (or paths in --config)")

    manifest = load_manifest(manifest_path)

    def checkpoint(step, weights):
        save_weights(weights, weights_path)
        logger.info("checkpoint at step %d written to %s", step, weights_path)

    result = train(manifest, config.model, config.train, checkpoint=checkpoint)
    save_weights(result.weights, weights_path)
    if trace_path is not None:
        write_trace(result.trace, trace_path)
    final = result.final_loss
    print("final loss: " + ("-" if final is None else f"{final:.6g}"))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest, check_files=False)
    layout = load_layout(args.layout) if args.layout else None
    report = evaluate(
        manifest,
        args.results,
        with_reference=not args.no_reference,
        layout=layout,
        threads=args.threads,
    )
    if args.out_report:
        atomic_write_text(args.out_report, report.to_json())
    sys.stdout.write(report.to_table())
    if report.missing:
        logger.error("%d result(s) missing: %s", len(report.missing), ", ".join(report.missing))
        return EXIT_IO
    return EXIT_OK


def cmd_config(args: argparse.Namespace) -> int:
    if args.action == "dump":
        sys.stdout.write(_run_config(args).to_json())
        return EXIT_OK
    if not args.config:
        raise UsageError("config validate needs --config PATH")
    problems = RunConfig.validate_mapping(read_config_document(args.config))
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return EXIT_USAGE
    print(f"{args.config}: ok")
    return EXIT_OK


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, (ImageFormatError, WeightsFormatError, ManifestError, OSError)):
        return EXIT_IO
    return EXIT_USAGE


HANDLED = (
    UsageError,
    ConfigError,
    ShapeError,
    ColorSpaceError,
    PhysicsError,
    NumericError,
    OSError,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is None:
            args.threads = _default_threads()
        _configure_logging(args)
        handler: Callable[[argparse.Namespace], int] = args.handler
        return handler(args)
    except HANDLED as exc:
        print(f"ucolor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, UsageError) else _exit_code(exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
