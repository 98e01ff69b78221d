"""Command-line interface.

Subcommands: deblur (blind restore one image), synth (generate a degraded
image with known ground truth), eval (batch sweep with CSV/JSON scoring),
cepstrum (debug dump of a cepstrum plane as an image).

Exit codes: 0 success, 2 estimation failure, 3 I/O failure, 4 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .deconv import DEFAULT_EPSILON
from .estimate import EstimationConfig, EstimationError
from .image import Image, load_image, save_image
from .pipeline import (
    DEFAULT_PLATE_SIZE,
    SweepSpec,
    run_deblur,
    run_eval,
    run_synth,
)
from .spectral import cepstrum, fftshift
from .synth import KernelParams, NoiseSpec

EXIT_OK = 0
EXIT_ESTIMATION = 2
EXIT_IO = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract wants 4."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_estimation_flags(parser: argparse.ArgumentParser) -> None:
    defaults = EstimationConfig()
    parser.add_argument("--theta-min", type=float, default=defaults.theta_min,
                        help="lowest candidate kernel angle in degrees")
    parser.add_argument("--theta-max", type=float, default=defaults.theta_max,
                        help="highest candidate kernel angle in degrees")
    parser.add_argument("--theta-step", type=float, default=defaults.theta_step,
                        help="angle sweep step in degrees")
    parser.add_argument("--max-length", type=int, default=defaults.max_length,
                        help="largest kernel length searched, in pixels")
    parser.add_argument("--min-length", type=int, default=defaults.min_length,
                        help="smallest kernel length searched, in pixels")
    parser.add_argument("--edge-threshold", type=float, default=defaults.edge_threshold,
                        help="edge-map threshold as a fraction of the max gradient")
    parser.add_argument("--length-aggregate", choices=("max", "min", "median"),
                        default=defaults.length_aggregate,
                        help="rule combining per-channel length estimates")
    parser.add_argument("--rho-resolution", type=float, default=defaults.rho_resolution,
                        help="Hough rho bin width in pixels")
    parser.add_argument("--cepstrum-floor", type=float, default=defaults.cepstrum_floor,
                        help="lower clamp on spectral magnitudes before the log")


def _config_from_args(args: argparse.Namespace) -> EstimationConfig:
    return EstimationConfig(
        theta_min=args.theta_min,
        theta_max=args.theta_max,
        theta_step=args.theta_step,
        max_length=args.max_length,
        min_length=args.min_length,
        edge_threshold=args.edge_threshold,
        cepstrum_floor=args.cepstrum_floor,
        rho_resolution=args.rho_resolution,
        length_aggregate=args.length_aggregate,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="platedeblur",
                     description="Blind motion deblurring for license plate images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deblur", help="estimate the blur kernel and restore an image")
    p.add_argument("input", help="blurred image (.png or .pgm)")
    p.add_argument("output", help="restored image destination")
    _add_estimation_flags(p)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                   help="relative zero-guard for the inverse filter")

    p = sub.add_parser("synth", help="generate a blurred (and optionally noisy) test image")
    p.add_argument("--out", required=True, help="degraded image destination")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--text", default="KA-01-1234",
                        help="plate text to render as the sharp source")
    source.add_argument("--input", dest="source_path",
                        help="sharp source image path instead of rendered text")
    p.add_argument("--angle", type=float, default=70.0, help="kernel angle in degrees")
    p.add_argument("--length", type=int, default=24, help="kernel length in pixels")
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="Gaussian noise standard deviation in sample units")
    p.add_argument("--seed", type=int, default=0, help="noise RNG seed")
    p.add_argument("--boundary", choices=("wrap", "replicate"), default="wrap")
    p.add_argument("--width", type=int, default=DEFAULT_PLATE_SIZE[0])
    p.add_argument("--height", type=int, default=DEFAULT_PLATE_SIZE[1])
    p.add_argument("--channels", type=int, choices=(1, 3), default=1)

    p = sub.add_parser("eval", help="run a ground-truth evaluation sweep")
    p.add_argument("--sweep", required=True, help="sweep spec JSON file")
    p.add_argument("--out-dir", required=True, help="directory for results.csv and summary.json")
    _add_estimation_flags(p)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)

    p = sub.add_parser("cepstrum", help="dump an image's cepstrum for inspection")
    p.add_argument("input", help="source image")
    p.add_argument("output", help="destination for the rescaled cepstrum image")
    p.add_argument("--cepstrum-floor", type=float,
                   default=EstimationConfig().cepstrum_floor)
    return parser


def _cmd_deblur(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    result = run_deblur(args.input, args.output, cfg, args.epsilon)
    print(
        f"estimated angle {result.estimated.angle:.2f} deg, "
        f"length {result.estimated.length} px -> {args.output}"
    )
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    source = args.source_path if args.source_path else args.text
    sidecar = run_synth(
        source,
        KernelParams(angle=args.angle, length=args.length),
        NoiseSpec(sigma=args.noise_sigma, seed=args.seed),
        args.out,
        boundary=args.boundary,
        plate_size=(args.width, args.height),
        channels=args.channels,
    )
    print(f"wrote {args.out} (ground truth in {sidecar})")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    sweep = SweepSpec.from_json(args.sweep)
    cfg = _config_from_args(args)
    csv_path, summary_path = run_eval(sweep, cfg, args.epsilon, args.out_dir)
    with open(summary_path, "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    print(f"wrote {csv_path} and {summary_path}")
    print(
        f"angle success rate {summary['angle_success_rate']:.3f}, "
        f"length success rates {summary['length_success_rate']}"
    )
    return EXIT_OK


def _cmd_cepstrum(args: argparse.Namespace) -> int:
    img = load_image(args.input)
    plane = img.planes.mean(axis=0)
    ceps = fftshift(cepstrum(plane, args.cepstrum_floor))
    span = np.ptp(ceps)
    scaled = (ceps - ceps.min()) / span if span > 0 else np.zeros_like(ceps)
    save_image(Image.from_plane(scaled), args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


_COMMANDS = {
    "deblur": _cmd_deblur,
    "synth": _cmd_synth,
    "eval": _cmd_eval,
    "cepstrum": _cmd_cepstrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except EstimationError as exc:
        print(f"estimation failed at stage {exc.stage!r}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
