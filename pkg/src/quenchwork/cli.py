"""Command-line entry point: ``quenchwork <subcommand> ...``.

Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from ._errors import ConfigError, NumericalError
from .chains import QuenchXY, charfn_xy_product, loschmidt_factors, loschmidt_xy_product
from .diagnostics import fd_histogram, moment_report, qq_normal, scatter_correlation
from .distribution import CharfnTable, invert_charfn
from .experiments import CONVENTIONS, ExperimentConfig, reproduce_figure, run_experiment
from .sampling import SampleConfig, sample_traces
from .toeplitz import charfn_toeplitz
from .work import ModeCoefficients, work_values

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _out(args, default):
    base = Path(args.out_dir)
    if getattr(args, "out", None):
        out = Path(args.out)
        return out if out.is_absolute() else base / out
    return base / default


def _load_coeffs(path):
    try:
        return ModeCoefficients.from_json(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError("coeffs", f"invalid JSON: {exc}") from exc


def _sidecar(path):
    side = io.sidecar_path(path)
    return json.loads(side.read_text()) if side.exists() else {}


def cmd_sample(args):
    cfg = SampleConfig(args.dim, args.max_power, args.n_samples, seed=args.seed, mode=args.mode)
    t = sample_traces(cfg, threads=args.threads)
    n, m = t.shape
    path = io.write_csv(_out(args, "traces.csv"), {
        "sample_index": np.repeat(np.arange(n), m),
        "r": np.tile(np.arange(1, m + 1), n),
        "re_T": t.real.ravel(), "im_T": t.imag.ravel(),
    }, {"seed": args.seed, "matrix_dim": args.dim, "mode": cfg.mode.value,
        "conventions": CONVENTIONS})
    return path


def _read_traces(path):
    data = io.read_csv(path)
    idx = data["sample_index"].astype(int)
    r = data["r"].astype(int)
    t = np.zeros((idx.max() + 1, r.max()), dtype=complex)
    t[idx, r - 1] = data["re_T"] + 1j * data["im_T"]
    return t


def cmd_work(args):
    coeffs = _load_coeffs(args.coeffs)
    t = _read_traces(args.traces)
    meta = _sidecar(args.traces)
    dim = int(meta.get("matrix_dim", 0))
    shift = dim * coeffs.eps0 - args.e0
    w = work_values(t, coeffs) + shift
    return io.write_csv(_out(args, "work.csv"), {"sample_index": np.arange(len(w)), "w": w},
                        {"seed": meta.get("seed"), "matrix_dim": dim, "shift": shift,
                         "coefficients": coeffs.to_json(), "conventions": CONVENTIONS})


def _write_charfn(path, table, meta):
    return io.write_csv(path, {
        "u": table.u, "re_chi": table.chi.real, "im_chi": table.chi.imag,
        "re_log_chi": table.log_chi.real, "im_log_chi": table.log_chi.imag,
        "method": [table.method] * len(table.u),
    }, dict(meta, e0=table.e0_shift, center=table.center))


def cmd_charfn(args):
    coeffs = _load_coeffs(args.coeffs)
    u = np.linspace(args.u_min, args.u_max, args.u_points)
    table = charfn_toeplitz(coeffs, args.e0, u, args.dim, threads=args.threads)
    return _write_charfn(_out(args, "charfn.csv"), table,
                         {"matrix_dim": args.dim, "coefficients": coeffs.to_json(),
                          "zeros": table.zeros})


def cmd_invert(args):
    data = io.read_csv(args.charfn)
    meta = _sidecar(args.charfn)
    table = CharfnTable(u=data["u"], chi=data["re_chi"] + 1j * data["im_chi"],
                        method=data["method"][0], e0_shift=float(meta.get("e0", 0.0)),
                        log_chi=data["re_log_chi"] + 1j * data["im_log_chi"],
                        center=meta.get("center"))
    dens = invert_charfn(table, w_points=args.w_points, w_span=args.w_span)
    return io.write_csv(_out(args, "density.csv"),
                        {"w": dens.w, "p": dens.p, "method": [dens.method] * len(dens.w)},
                        {"norm_defect": dens.norm_defect, "clipped_mass": dens.clipped_mass,
                         "decay_warning": dens.decay_warning, "w_points": args.w_points,
                         "w_span": args.w_span, "dw": dens.dw, "source": str(args.charfn),
                         "conventions": "P(w) = (1/2pi) int exp(-iuw) chi(u) du, trapezoid"})


def cmd_xy(args):
    q = QuenchXY(args.gi, args.hi, args.gf, args.hf, L=args.sites, branch=args.branch)
    meta = q.metadata()
    out = _out(args, "xy.csv")
    if args.t_grid:
        t = io.parse_grid(args.t_grid)
        g = loschmidt_xy_product(q, t)
        path = io.write_csv(out, {"t": t, "re_G": g.real, "im_G": g.imag}, meta)
        grid = t
    else:
        u = io.parse_grid(args.u_grid)
        path = _write_charfn(out, charfn_xy_product(q, u), meta)
        grid = -u
    if args.debug:
        f = loschmidt_factors(q, grid)
        k = q.momenta
        io.write_csv(out.with_name(out.stem + "_factors.csv"), {
            "t": np.repeat(grid, len(k)), "k": np.tile(k, len(grid)),
            "re_factor": f.real.ravel(), "im_factor": f.imag.ravel(),
        }, meta)
    return path


def cmd_diagnose(args):
    data = io.read_csv(args.input)
    w = data["w"]
    panels = Path(args.panels) if args.panels else Path(args.out_dir) / "panels"
    rep = moment_report(w)
    hist = fd_histogram(w)
    meta = {"source": str(args.input), "conventions": CONVENTIONS}
    io.write_csv(panels / "hist.csv", {"left": hist.edges[:-1], "right": hist.edges[1:],
                                       "count": hist.counts, "density": hist.density},
                 dict(meta, bin_width=hist.bin_width))
    qq = qq_normal(w)
    io.write_csv(panels / "qq.csv", {"theoretical": qq.theoretical_q,
                                     "empirical": qq.empirical_q}, meta)
    io.write_csv(panels / "qq_detrended.csv", {"theoretical": qq.theoretical_q,
                                               "residual": qq.residuals}, meta)
    d = rep.to_dict()
    io.write_csv(panels / "moments.csv", {"statistic": list(d), "value": list(d.values())}, meta)
    report = {"moments": d, "qq_slope": qq.slope(), "bin_width": hist.bin_width}
    if args.traces:
        t = _read_traces(args.traces)
        report["correlations"] = {}
        for pair in args.pairs:
            r, s = (int(v) for v in pair.split(","))
            x, y = t[:, r - 1].real, t[:, s - 1].real
            io.write_csv(panels / f"scatter_{r}_{s}.csv", {"x": x, "y": y}, meta)
            c = scatter_correlation(x, y)
            report["correlations"][f"{r},{s}"] = {"r": c.r, "se": c.se}
    io.write_json(args.report or Path(args.out_dir) / "report.json", report)
    return panels


def cmd_figure(args):
    out = Path(args.out_dir) / args.figure
    return reproduce_figure(args.figure, out, seed=args.seed, threads=args.threads,
                            mode=args.mode).root


def cmd_run(args):
    cfg = ExperimentConfig.load(args.config)
    if args.seed_given:
        from dataclasses import replace

        cfg = replace(cfg, sampling=replace(cfg.sampling, seed=args.seed))
    out = Path(args.out_dir) / cfg.name if cfg.output_dir is None else Path(cfg.output_dir)
    return run_experiment(cfg, out, threads=args.threads).root


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="quenchwork", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="64-bit run seed (default 0)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="sample trace vectors")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--max-power", type=int, required=True)
    s.add_argument("--n-samples", type=int, required=True)
    s.add_argument("--mode", choices=("haar", "surrogate"), default="haar")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("work", parents=[common], help="work values from traces")
    s.add_argument("--coeffs", required=True)
    s.add_argument("--traces", required=True)
    s.add_argument("--e0", type=float, default=0.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_work)

    s = sub.add_parser("charfn", parents=[common], help="Toeplitz characteristic function")
    s.add_argument("--coeffs", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--e0", type=float, default=0.0)
    s.add_argument("--u-min", type=float, required=True)
    s.add_argument("--u-max", type=float, required=True)
    s.add_argument("--u-points", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_charfn)

    s = sub.add_parser("invert", parents=[common], help="invert a charfn table to a density")
    s.add_argument("--charfn", required=True)
    s.add_argument("--w-points", type=int, default=1024)
    s.add_argument("--w-span", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("xy", parents=[common], help="XY-chain Loschmidt amplitude")
    for flag in ("--gi", "--hi", "--gf", "--hf"):
        s.add_argument(flag, type=float, required=True)
    s.add_argument("--sites", type=int, default=200)
    s.add_argument("--branch", choices=("bdg", "signed"), default="bdg")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--t-grid", help="start:stop:points")
    g.add_argument("--u-grid", help="start:stop:points")
    s.add_argument("--debug", action="store_true", help="also write k-resolved factors")
    s.add_argument("--out")
    s.set_defaults(func=cmd_xy)

    s = sub.add_parser("diagnose", parents=[common], help="diagnostic panels for work.csv")
    s.add_argument("--input", required=True)
    s.add_argument("--report")
    s.add_argument("--panels")
    s.add_argument("--traces", help="traces.csv for scatter panels")
    s.add_argument("--pairs", nargs="+", default=["1,2", "1,3"])
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("figure", parents=[common], help="reproduce a figure's panel data")
    s.add_argument("figure", choices=("fig1", "fig2", "fig3", "fig4", "fig5"))
    s.add_argument("--mode", choices=("haar", "surrogate"))
    s.set_defaults(func=cmd_figure)

    s = sub.add_parser("run", parents=[common], help="run a JSON experiment config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        result = args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
