"""Command-line front end.

CSV goes to files, human summaries to stdout, diagnostics to stderr.
Relative output paths resolve against ``$MIMOCS_OUTPUT_DIR`` when it is set.
Exit codes: 0 success, 2 usage or configuration error, 3 numeric/domain
error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .bounds import DomainError, isotropy_check, report, uniform_condition_check
from .experiments import (PRESETS, ExperimentConfig, load_config, parse_methods, parse_mn_list,
                          preset, records_to_csv, run)
from .geometry import (INDEPENDENT, MODES, AngleGrid, ArrayConfig, ConfigurationError, Discrete,
                       PointMass, Uniform, canonical_grid, sample_positions)
from .model import (build_matrix, fourier_codes, observe, sigma_from_snr, synthesize_scene,
                    waveform_roundtrip_check)
from .pattern_stats import analytic_stats, array_pattern
from .recovery import RecoveryError, RecoveryProblem, get_method, recover
from .serialize import read_complex_csv, write_complex_csv

OUTPUT_DIR_ENV = "MIMOCS_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("mimocs")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def output_path(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_text(path, text):
    path = output_path(path)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}")


def parse_dist(text: str):
    """``uniform``, ``uniform:LOW,HIGH``, ``point:V`` or ``discrete:V1,V2,...``."""
    kind, _, arg = text.partition(":")
    vals = [float(v) for v in arg.split(",")] if arg else []
    if kind == "uniform":
        return Uniform(*vals) if vals else Uniform()
    if kind == "point":
        return PointMass(vals[0] if vals else 0.0)
    if kind == "discrete" and vals:
        return Discrete(tuple(vals))
    raise UsageError(f"--dist: cannot parse {text!r} (uniform[:lo,hi] | point:v | discrete:v1,...)")


def parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params.update(parse_methods(f"beamform:{item}")[0][1])
    return params


def _array(args):
    return ArrayConfig(args.M, args.N, args.Z, mode=args.mode)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_grid(args):
    grid = canonical_grid(args.Z)
    print(f"G={grid.G} spacing={grid.spacing!r}")
    if args.out:
        _write_text(args.out, "".join(f"{p!r}\n" for p in grid.phi))
    else:
        print(" ".join(f"{p:.6g}" for p in grid.phi))


def cmd_sample(args):
    pos = sample_positions(_array(args), args.seed)
    text = "".join(f"xi,{float(v)!r}\n" for v in pos.xi) + "".join(f"zeta,{float(v)!r}\n" for v in pos.zeta)
    if args.out:
        _write_text(args.out, "array,position\n" + text)
    else:
        sys.stdout.write(text)


def cmd_matrix(args):
    cfg = _array(args)
    A = build_matrix(cfg, sample_positions(cfg, args.seed), canonical_grid(args.Z),
                     normalized=not args.raw)
    write_complex_csv(output_path(args.out), A.entries)
    print(f"wrote {output_path(args.out)} ({A.shape[0]}x{A.shape[1]})")


def cmd_pattern_stats(args):
    dist = Uniform()
    u = np.array([float(v) * np.pi for v in args.u_over_pi.split(",")])
    an = analytic_stats(dist, dist, args.M, args.N, u)
    cfg = ArrayConfig(args.M, args.N, 1.0)
    rng = np.random.default_rng(args.seed)
    vals = np.empty((args.trials, u.size), dtype=complex)
    for t in range(args.trials):
        vals[t] = array_pattern(sample_positions(cfg, rng), u)
    print("u/pi,mean_analytic,mean_mc,var_re_analytic,var_re_mc,var_im_analytic,var_im_mc")
    for k in range(u.size):
        print(f"{u[k] / np.pi:g},{an.mean[k].real:.6g},{vals[:, k].mean().real:.6g},"
              f"{an.var_re[k]:.6g},{vals[:, k].real.var():.6g},"
              f"{an.var_im[k]:.6g},{vals[:, k].imag.var():.6g}")


def cmd_bounds(args):
    text = report(args.K, args.G, args.eps, args.C_const, args.c_const)
    print(text)
    if "mn_bound_uniform=undefined" in text:
        return EXIT_NUMERIC


def cmd_isotropy(args):
    tx, rx = parse_dist(args.dist_tx), parse_dist(args.dist_rx)
    if args.spacing_factor == 1.0:
        grid = canonical_grid(args.Z)
    else:
        step = 2.0 / args.Z * args.spacing_factor
        grid = AngleGrid(np.arange(-1.0, 1.0 + 1e-12, step), Z=args.Z)
    iso = isotropy_check(tx, rx, grid, args.Z, mode=args.mode)
    print(f"isotropy={iso}")
    if args.mode == INDEPENDENT:
        print(f"uniform_condition={uniform_condition_check(tx, rx, grid, args.Z)}")
    if not iso.holds:
        print(f"violation_value={abs(iso.value):.6g}")


def _sweep_config(args):
    if args.preset and args.config:
        raise UsageError("--preset and --config are mutually exclusive")
    over = dict(Z=args.Z, K=args.K, P=args.P, snr_db=args.snr, trials=args.trials,
                inner_trials=getattr(args, "inner_trials", None), base_seed=args.seed,
                mode=args.mode, timing=getattr(args, "timing", None) or None)
    if getattr(args, "protocol", None):
        over["protocol"] = args.protocol
    if args.mn:
        over["mn_list"] = parse_mn_list(args.mn)
    if getattr(args, "methods", None):
        over["methods"] = parse_methods(args.methods)
    if args.Z is not None:
        over["G"] = args.Z + 1
    over = {k: v for k, v in over.items() if v is not None}
    if args.preset:
        return preset(args.preset, **over)
    if args.config:
        return load_config(args.config, over.get("protocol")).with_overrides(**over)
    return ExperimentConfig(**over)


def cmd_ccdf(args):
    args.protocol = "ccdf"
    cfg = _sweep_config(args)
    if cfg.protocol != "ccdf":
        raise UsageError(f"coherence-ccdf needs a ccdf configuration, got {cfg.protocol}")
    res = run(cfg, args.jobs)
    _write_text(args.out or "ccdf.csv", res.to_csv())
    for (M, N), s in res.samples.items():
        print(f"M={M} N={N} mode={cfg.mode} trials={s.size} median_mu={np.median(s):.4f}")


def cmd_sweep(args):
    cfg = _sweep_config(args)
    res = run(cfg, args.jobs)
    if cfg.protocol == "ccdf":
        text = res.to_csv()
    else:
        text = records_to_csv(res)
        for r in res:
            print(f"{r.method:16s} MN={r.MN:4d} error_rate={r.error_rate:.4f}")
    _write_text(args.out or f"{cfg.protocol}.csv", text)


def cmd_recover(args):
    get_method(args.method)
    params = parse_params(args.param)
    if args.A or args.Y:
        if not (args.A and args.Y):
            raise UsageError("--A and --Y must be given together")
        if args.K is None:
            raise UsageError("--K is required with --A/--Y")
        A, Y = read_complex_csv(args.A), read_complex_csv(args.Y)
        sigma = args.sigma if args.sigma is not None else sigma_from_snr(args.snr)
        truth = None
    else:
        K = 3 if args.K is None else args.K
        args.K = K
        cfg = _array(args)
        grid = canonical_grid(args.Z)
        A = build_matrix(cfg, sample_positions(cfg, (args.seed, 0)), grid, normalized=True)
        scene = synthesize_scene(grid, K, args.P, (args.seed, 1))
        sigma = sigma_from_snr(args.snr) if args.sigma is None else args.sigma
        Y = observe(A, scene, sigma, (args.seed, 2))
        truth = scene.support
    res = recover(args.method, RecoveryProblem(A, Y, args.K, sigma), **params)
    print(f"method={res.method}")
    print("support=" + ",".join(str(int(s)) for s in res.support))
    print(f"residual_norm={res.residual_norm:.6g}")
    print(f"converged={res.converged}")
    if truth is not None:
        print("true_support=" + ",".join(str(int(s)) for s in truth))
    if res.info.get("degenerate"):
        log.warning("signal subspace is rank deficient (P <= K)")


def cmd_roundtrip(args):
    cfg = _array(args)
    grid = canonical_grid(args.Z)
    pos = sample_positions(cfg, (args.seed, 0))
    scene = synthesize_scene(grid, args.K, args.P, (args.seed, 1))
    codes = fourier_codes(args.M, normalized=not args.raw_codes)
    rep = waveform_roundtrip_check(pos, args.Z, grid, scene.X, codes)
    print(f"max_deviation={rep.max_deviation:.3e}")
    print(f"gram_deviation={rep.gram_deviation:.3e}")
    print(f"roundtrip={'ok' if rep.ok else 'failed'}")
    if not rep.orthonormal:
        print(f"W=diag({rep.W[0, 0].real:g}, ...) is not the identity")
    return EXIT_OK if rep.ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_array(p, Z=50):
    p.add_argument("--M", type=int, default=4, help="transmitters")
    p.add_argument("--N", type=int, default=4, help="receivers")
    p.add_argument("--Z", type=int, default=Z, help="virtual aperture")
    p.add_argument("--mode", choices=MODES, default=INDEPENDENT)


def _add_sweep(p, protocol=True):
    if protocol:
        p.add_argument("--protocol", choices=("ccdf", "nonuniform", "uniform", "mmv"))
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="INI file with one section per protocol")
    p.add_argument("--Z", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--P", type=int)
    p.add_argument("--snr", type=float, help="SNR in dB")
    p.add_argument("--mn", help="element configs, e.g. '3x3,4x4' or '3,4,5'")
    p.add_argument("--trials", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base random seed")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (results unchanged)")
    common.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")

    parser = argparse.ArgumentParser(prog="mimocs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mimocs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("grid", parents=[common], help="canonical angle grid")
    p.add_argument("--Z", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("sample", parents=[common], help="draw element positions")
    _add_array(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("matrix", parents=[common], help="write the dictionary matrix")
    _add_array(p)
    p.add_argument("--raw", action="store_true", help="keep column norms sqrt(MN)")
    p.add_argument("--out", default="A.csv")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("pattern-stats", parents=[common], help="analytic vs Monte Carlo pattern moments")
    p.add_argument("--M", type=int, default=10)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--u-over-pi", default="0,1,2,3", help="comma list of u/pi values")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_pattern_stats)

    p = sub.add_parser("coherence-ccdf", parents=[common], help="coherence ccdf vs bound (CSV)")
    _add_sweep(p, protocol=False)
    p.set_defaults(func=cmd_ccdf)

    p = sub.add_parser("bounds", parents=[common], help="element-count requirements")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--G", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--C-const", type=float, default=1.0, help="non-uniform constant C")
    p.add_argument("--c-const", type=float, default=1.0, help="non-uniform constant c")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("isotropy-check", parents=[common], help="isotropy verdict for a grid")
    p.add_argument("--dist-tx", default="uniform")
    p.add_argument("--dist-rx", default="uniform")
    p.add_argument("--Z", type=int, default=50)
    p.add_argument("--mode", choices=MODES, default=INDEPENDENT)
    p.add_argument("--spacing-factor", type=float, default=1.0,
                   help="grid spacing as a multiple of 2/Z")
    p.set_defaults(func=cmd_isotropy)

    p = sub.add_parser("recover", parents=[common], help="run one recovery method")
    _add_array(p)
    p.add_argument("--method", required=True)
    p.add_argument("--param", action="append", help="method parameter key=value (repeatable)")
    p.add_argument("--A", help="matrix CSV")
    p.add_argument("--Y", help="snapshot CSV")
    p.add_argument("--K", type=int)
    p.add_argument("--P", type=int, default=1)
    p.add_argument("--snr", type=float, default=20.0)
    p.add_argument("--sigma", type=float)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo error-rate sweep (CSV)")
    _add_sweep(p)
    p.add_argument("--inner-trials", type=int)
    p.add_argument("--methods", help="e.g. 'lasso;mbmp:d=3,3,1'")
    p.add_argument("--timing", action="store_true", help="record mean_runtime_ms (not reproducible)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("roundtrip-check", parents=[common], help="coded-waveform matched-filter check")
    _add_array(p)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--P", type=int, default=1)
    p.add_argument("--raw-codes", action="store_true", help="use unnormalized Fourier codes")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        status = args.func(args)
    except (UsageError, ConfigurationError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mimocs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mimocs {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, RecoveryError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"mimocs {args.command}: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if status is None else int(status)


if __name__ == "__main__":
    sys.exit(main())
