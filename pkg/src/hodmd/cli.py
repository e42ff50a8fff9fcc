"""Command-line interface: ``hodmd {decompose,repair,extend,synth,rrmse}``.

Exit status: 0 success, 2 usage error, 3 file format error, 4 numerical
degeneracy.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .exceptions import (BoundaryError, ConfigurationError, DegenerateInputError, FormatError,
                         HodmdError, InvalidInputError, InvalidShapeError, OverflowGuardError,
                         WindowError)
from .phantom import PhantomSpec, make_phantom
from .pipeline import RunConfig, decompose_volume, extend_volume
from .repair import SCHEMES, repair_slice, rrmse
from .rom import GROWTH_POLICIES

log = logging.getLogger("hodmd")

EXIT_USAGE, EXIT_FORMAT, EXIT_NUMERIC = 2, 3, 4


def _add_run_options(p):
    p.add_argument("--d", type=int, default=2, help="delay index (default: 2)")
    p.add_argument("--eps-svd", type=float, default=5e-4, help="SVD tolerance (default: 5e-4)")
    p.add_argument("--eps-dmd", type=float, default=5e-4,
                   help="DMD amplitude tolerance (default: 5e-4)")
    p.add_argument("--dt", type=float, default=8e-3, help="time step in s (default: 8e-3)")
    p.add_argument("--iterative", action=argparse.BooleanOptionalAction, default=True,
                   help="iterate the multidimensional HODMD until the mode count settles")
    p.add_argument("--max-iter", type=int, default=20)


def _config(args):
    return RunConfig(d=args.d, eps_svd=args.eps_svd, eps_dmd=args.eps_dmd, dt=args.dt,
                     iterative=args.iterative, max_iter=args.max_iter,
                     growth_policy=getattr(args, "growth_policy", "zero-delta"))


def cmd_decompose(args):
    config = _config(args)
    x = io.load_tensor(args.input)
    dec = decompose_volume(x, config)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for i, exp in enumerate(dec.slice_expansions, 1):
        io.write_mode_table(out / f"slice_{i:02d}_modes.csv", exp)
        print(f"slice {i:2d}: leading frequency {exp.leading_frequency() * 60 / (2 * np.pi):.6g}"
              f" BPM, {exp.n_modes} modes, {dec.slice_iterations[i - 1]} iteration(s)")
    io.write_mode_table(out / "joint_modes.csv", dec.joint_expansion)
    io.write_dtf(out / "reconstruction.dtf", dec.reconstruction)
    io.write_dtf(out / "joint_reconstruction.dtf", dec.joint_reconstruction)
    if dec.joint_expansion.n_modes:
        io.write_spatial_modes(out / "joint_modes", dec.joint_expansion)
    bpm = dec.joint_expansion.leading_frequency() * 60 / (2 * np.pi)
    print(f"joint: leading frequency {bpm:.6g} BPM, {dec.joint_expansion.n_modes} modes")
    return 0


def cmd_repair(args):
    if args.list_schemes:
        for name in SCHEMES:
            print(name)
        return 0
    if args.input is None or args.slice is None:
        raise ConfigurationError("repair needs INPUT and --slice (or --list-schemes)")
    x = io.load_tensor(args.input)
    if x.ndim != 4:
        raise InvalidShapeError("repair needs a 4-D (Nx, Ny, slices, frames) tensor")
    reach = 2 if args.scheme == "extended-spline" else 1
    if not reach < args.slice <= x.shape[2] - reach:
        raise BoundaryError(f"slice {args.slice} cannot be rebuilt with scheme {args.scheme!r};"
                            f" valid slices are {reach + 1}..{x.shape[2] - reach}")
    report = repair_slice(x, args.slice - 1, args.scheme)
    if report.rrmse_volume is not None:
        print(f"RRMSE {report.rrmse_volume:.6g}")
        print(f"slice RRMSE {report.rrmse_vs_truth:.6g}")
    if args.output:
        io.write_dtf(args.output, report.volume)
    return 0


def cmd_extend(args):
    config = _config(args)
    x = io.load_tensor(args.input)
    k = x.shape[-1]
    if args.frames <= k:
        raise ConfigurationError(f"--frames must exceed the {k} input frames")
    _, ext = extend_volume(x, args.frames, config)
    if args.per_slice:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for i in range(ext.shape[2]):
            io.write_dtf(out / f"slice_{i + 1:02d}.dtf", ext[:, :, i])
    else:
        io.write_dtf(args.output, ext)
    print(f"extended {k} -> {args.frames} frames")
    return 0


def cmd_synth(args):
    spec = PhantomSpec(nx=args.nx, ny=args.ny, slices=args.slices, frames=args.frames,
                       freq_bpm=args.freq_bpm, harmonics=args.harmonics,
                       noise_sigma=args.noise, seed=args.seed, dt=args.dt)
    io.write_dtf(args.output, make_phantom(spec))
    return 0


def cmd_rrmse(args):
    print(f"{rrmse(io.load_tensor(args.approx), io.load_tensor(args.truth)):.6g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hodmd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="per-slice and joint HODMD of a 3-D/4-D tensor")
    p.add_argument("input", help="DTF file or directory of PGM images")
    p.add_argument("--output", required=True, help="output directory")
    _add_run_options(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser(
        "repair", help="rebuild one slice from its neighbours",
        epilog="Kriging is not available: it needs a variogram model that is not defined here.")
    p.add_argument("input", nargs="?")
    p.add_argument("--slice", type=int, help="1-based index of the slice to rebuild")
    p.add_argument("--scheme", default="spline", choices=SCHEMES)
    p.add_argument("--list-schemes", action="store_true", help="print the scheme names")
    p.add_argument("--output", help="write the repaired volume as DTF")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("extend", help="extrapolate the joint expansion to more frames")
    p.add_argument("input")
    p.add_argument("--frames", type=int, required=True, help="total number of output frames")
    p.add_argument("--growth-policy", default="zero-delta", choices=GROWTH_POLICIES)
    p.add_argument("--per-slice", action="store_true",
                   help="write one DTF per slice into the --output directory")
    p.add_argument("--output", required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("synth", help="write a synthetic beating-ring phantom")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--slices", type=int, default=10)
    p.add_argument("--frames", type=int, default=20)
    p.add_argument("--freq-bpm", type=float, default=360.0)
    p.add_argument("--harmonics", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=8e-3)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rrmse", help="relative RMS error between two tensors")
    p.add_argument("approx")
    p.add_argument("truth")
    p.set_defaults(func=cmd_rrmse)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (DegenerateInputError, OverflowGuardError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BoundaryError as exc:
        print(f"unsupported boundary slice: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, InvalidShapeError, InvalidInputError, WindowError,
            HodmdError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
