"""Experiment configuration, single-run pipeline and figure-data recipes.

Every CSV is written through :func:`quenchwork.io.write_csv`, so it has a
header row and a ``.meta.json`` sidecar with the seed and conventions.  Sub-runs
inside a figure draw their seeds from ``SeedSequence([seed, crc32(tag)])``,
which keeps panels independent yet reproducible from one user seed.
"""
from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.stats

from . import io
from ._errors import ConfigError
from .chains import QuenchXY, XXChain, effective_dispersion, initial_energy, xx_mode_coefficients
from .diagnostics import (
    ellipse_coverage,
    fd_histogram,
    moment_report,
    qq_normal,
    scatter_correlation,
    theory_ellipse,
)
from .distribution import invert_charfn
from .sampling import SampleConfig, SampleMode, sample_traces
from .toeplitz import charfn_toeplitz
from .work import ModeCoefficients, sample_work, skewness_proxy, theoretical_variance

__all__ = [
    "CONFIG_VERSION",
    "CONVENTIONS",
    "ExperimentConfig",
    "FigureRecipe",
    "RECIPES",
    "Manifest",
    "run_experiment",
    "reproduce_figure",
    "subseed",
]

CONFIG_VERSION = 1
SOURCES = ("coefficients", "xx_chain", "quench_xy")

CONVENTIONS = {
    "work": "W = sum_r (a_r Re Tr U^r + b_r Im Tr U^r); alpha_r = (a_r - i b_r)/2",
    "surrogate": "Tr U^r ~ CN(0, r), independent in r",
    "histogram": "Freedman-Diaconis h = 2 IQR / n^(1/3), edges from sample minimum",
    "qq": "plotting positions (i - 0.5)/n, sample mean and sd",
    "kurtosis": "raw m4/m2^2 - 3, se sqrt(24/n), bias ~ -6/(n+1)",
}


def subseed(seed, tag):
    """Deterministic 64-bit seed for the sub-run labelled ``tag``."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(tag.encode())])
    return int(ss.generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------- config


def _require(data, key, path, kind=None):
    if key not in data:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{path}.{key}" if path else key,
                          f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def _num(data, key, path, default=None):
    where = f"{path}.{key}"
    if key not in data:
        if default is None:
            raise ConfigError(where, "missing required field")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    return value


def _int(data, key, path, default=None):
    value = _num(data, key, path, default)
    if int(value) != value:
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated single-run configuration.

    Exactly one of ``coefficients``, ``xx_chain`` and ``quench_xy`` is set.
    ``u_grid`` is ``(u_min, u_max, points)``; ``w_grid`` is ``(points, span)``
    with ``span=None`` meaning the Nyquist width.
    """

    name: str
    sampling: SampleConfig
    coefficients: ModeCoefficients | None = None
    xx_chain: XXChain | None = None
    quench_xy: QuenchXY | None = None
    e0: float | None = None
    u_grid: tuple | None = None
    w_grid: tuple | None = None
    output_dir: str | None = None
    version: int = CONFIG_VERSION

    def __post_init__(self):
        present = [s for s in SOURCES if getattr(self, s) is not None]
        if len(present) != 1:
            raise ConfigError("source", f"exactly one of {SOURCES} is required, got {present}")
        if self.version != CONFIG_VERSION:
            raise ConfigError("version", f"unsupported version {self.version!r}")

    @property
    def source(self):
        return next(s for s in SOURCES if getattr(self, s) is not None)

    def mode_coefficients(self):
        if self.coefficients is not None:
            return self.coefficients
        if self.xx_chain is not None:
            return xx_mode_coefficients(self.xx_chain)
        return effective_dispersion(self.quench_xy).mode_coefficients()

    def initial_energy(self):
        if self.e0 is not None:
            return float(self.e0)
        if self.quench_xy is not None:
            return initial_energy(self.quench_xy)
        return 0.0

    @classmethod
    def from_dict(cls, data):
        """Validate a decoded JSON document; errors carry the field path."""
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        version = _require(data, "version", "")
        if version != CONFIG_VERSION:
            raise ConfigError("version", f"unsupported version {version!r}")
        name = _require(data, "name", "", str)
        present = [s for s in SOURCES if s in data]
        if len(present) != 1:
            raise ConfigError("source", f"exactly one of {SOURCES} is required, got {present}")
        src = present[0]
        body = data[src]
        if not isinstance(body, dict):
            raise ConfigError(src, "expected an object")
        kwargs = {}
        try:
            if src == "coefficients":
                kwargs["coefficients"] = ModeCoefficients.from_json(body)
            elif src == "xx_chain":
                hop = _require(body, "hoppings", src, list)
                kwargs["xx_chain"] = XXChain(tuple(float(h) for h in hop),
                                             float(_num(body, "mu", src, 0.0)))
            else:
                kwargs["quench_xy"] = QuenchXY(
                    gamma_i=_num(body, "gamma_i", src), h_i=_num(body, "h_i", src),
                    gamma_f=_num(body, "gamma_f", src), h_f=_num(body, "h_f", src),
                    L=_int(body, "L", src, 200), branch=body.get("branch", "bdg"))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(src, str(exc)) from exc

        sampling = _require(data, "sampling", "", dict)
        probe = cls(name=name, sampling=SampleConfig(1, 1, 1), **kwargs)
        coeffs = probe.mode_coefficients()
        default_dim = kwargs["quench_xy"].L // 2 if src == "quench_xy" else None
        try:
            cfg = SampleConfig(
                matrix_dim=_int(sampling, "matrix_dim", "sampling", default_dim),
                max_power=_int(sampling, "max_power", "sampling", max(coeffs.m, 1)),
                n_samples=_int(sampling, "n_samples", "sampling"),
                seed=_int(sampling, "seed", "sampling", 0),
                mode=sampling.get("mode", "haar"),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("sampling", str(exc)) from exc
        if cfg.max_power < coeffs.m:
            raise ConfigError("sampling.max_power", f"must be >= number of modes {coeffs.m}")

        u_grid = w_grid = None
        if "u_grid" in data:
            g = _require(data, "u_grid", "", dict)
            u_grid = (_num(g, "min", "u_grid"), _num(g, "max", "u_grid"),
                      _int(g, "points", "u_grid"))
            if u_grid[2] < 3 or u_grid[0] >= u_grid[1]:
                raise ConfigError("u_grid", "need min < max and points >= 3")
        if "w_grid" in data:
            if u_grid is None:
                raise ConfigError("w_grid", "requires u_grid")
            g = _require(data, "w_grid", "", dict)
            span = g.get("span")
            if span is not None and (isinstance(span, bool) or not isinstance(span, (int, float))):
                raise ConfigError("w_grid.span", "expected a number")
            w_grid = (_int(g, "points", "w_grid"), span)
        e0 = data.get("e0")
        if e0 is not None and (isinstance(e0, bool) or not isinstance(e0, (int, float))):
            raise ConfigError("e0", "expected a number")
        return cls(name=name, sampling=cfg, e0=e0, u_grid=u_grid, w_grid=w_grid,
                   output_dir=data.get("output_dir"), version=version, **kwargs)

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


# ---------------------------------------------------------------- manifest


@dataclass
class Manifest:
    """Files written by a run, each with its SHA-256, plus a summary dict."""

    name: str
    root: Path
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, path):
        self.files.append(Path(path))
        sidecar = io.sidecar_path(path)
        if sidecar.exists():
            self.files.append(sidecar)
        return path

    def hashes(self):
        return {str(p.relative_to(self.root)): io.sha256(p) for p in self.files}

    def write(self):
        path = self.root / "manifest.json"
        io.write_json(path, {"name": self.name, "files": self.hashes()})
        return path

    def names(self):
        return [p.name for p in self.files]


def _meta(seed, **extra):
    out = {"seed": seed, "conventions": CONVENTIONS}
    out.update(extra)
    return out


def _report_dict(values, coeffs):
    report = {"n": len(values), "theory": {}}
    var = theoretical_variance(coeffs)
    report["theory"]["variance"] = var
    if coeffs.m and var > 0:
        s, t, ratio = skewness_proxy(coeffs)
        report["theory"]["skewness_proxy"] = {"S_m": s, "T_m": t, "ratio": ratio}
    try:
        report["moments"] = moment_report(values).to_dict()
    except ValueError as exc:
        report["moments"] = None
        report["moments_error"] = str(exc)
    return report


def run_experiment(config, out_dir=None, threads=1):
    """Sample, summarise and (optionally) tabulate chi and the density.

    Writes ``work.csv`` (``sample_index, w`` with ``w = W + N eps0 - E0``),
    ``report.json``, optionally ``charfn.csv``/``density.csv`` and a
    ``manifest.json`` hashing every file.
    """
    root = Path(out_dir or config.output_dir or config.name)
    root.mkdir(parents=True, exist_ok=True)
    coeffs = config.mode_coefficients()
    e0 = config.initial_energy()
    cfg = config.sampling
    shift = cfg.matrix_dim * coeffs.eps0 - e0
    batch = sample_work(cfg, coeffs, threads=threads)
    meta = _meta(cfg.seed, source=config.source, matrix_dim=cfg.matrix_dim,
                 mode=cfg.mode.value, shift=shift, coefficients=coeffs.to_json())
    if config.quench_xy is not None:
        meta["quench_xy"] = config.quench_xy.metadata()

    man = Manifest(config.name, root)
    man.add(io.write_csv(root / "work.csv",
                         {"sample_index": np.arange(len(batch.values)),
                          "w": batch.values + shift}, meta))
    report = _report_dict(batch.values, coeffs)
    report["mean_shift"] = shift
    if config.u_grid is not None:
        u = np.linspace(*config.u_grid)
        table = charfn_toeplitz(coeffs, e0, u, cfg.matrix_dim, threads=threads)
        man.add(_write_charfn(root / "charfn.csv", table, meta))
        if config.w_grid is not None:
            points, span = config.w_grid
            dens = invert_charfn(table, w_points=points, w_span=span)
            man.add(io.write_csv(root / "density.csv",
                                 {"w": dens.w, "p": dens.p,
                                  "method": [dens.method] * len(dens.w)},
                                 dict(meta, norm_defect=dens.norm_defect,
                                      clipped_mass=dens.clipped_mass)))
            report["density"] = {"norm_defect": dens.norm_defect,
                                 "variance": dens.variance()}
    man.add(io.write_json(root / "report.json", report))
    man.summary = report
    man.write()
    return man


def _write_charfn(path, table, meta):
    log_chi = table.log_chi if table.log_chi is not None else np.log(table.chi)
    return io.write_csv(path, {
        "u": table.u, "re_chi": table.chi.real, "im_chi": table.chi.imag,
        "re_log_chi": log_chi.real, "im_log_chi": log_chi.imag,
        "method": [table.method] * len(table.u),
    }, dict(meta, e0=table.e0_shift, center=table.center))


# ---------------------------------------------------------------- figures


def _three_mode():
    return ModeCoefficients.from_modes([1, 2, 3], [1.0, 0.7, 0.5])


def _five_mode_even():
    m = np.arange(2, 11, 2)
    return ModeCoefficients.from_modes(m, np.exp(-0.4 * m))


def _power_law():
    m = np.arange(1, 11)
    return ModeCoefficients.from_modes(m, m**-2.0)


def _exp_even():
    m = np.arange(2, 11, 2)
    return ModeCoefficients.from_modes(m, np.exp(-0.5 * m))


@dataclass(frozen=True)
class FigureRecipe:
    """Immutable parameter preset for one figure."""

    figure: str
    families: tuple
    dims: tuple
    n_samples: int
    mode: str = "surrogate"
    n_kurtosis: int | None = None
    pairs: tuple = ()


RECIPES = {
    "fig1": FigureRecipe("fig1", (("3mode", _three_mode), ("5mode_even", _five_mode_even)),
                         dims=(80,), n_samples=1000),
    "fig2": FigureRecipe("fig2", (("power_law", _power_law), ("exp_even", _exp_even)),
                         dims=(80,), n_samples=1000),
    "fig3": FigureRecipe("fig3", (("3mode", _three_mode), ("5mode_even", _five_mode_even)),
                         dims=(80,), n_samples=300, mode="both"),
    "fig4": FigureRecipe("fig4", (("3mode", _three_mode),), dims=(20, 40, 80, 160),
                         n_samples=300, mode="haar", n_kurtosis=1000),
    "fig5": FigureRecipe("fig5", (), dims=(80,), n_samples=500, mode="haar",
                         pairs=((1, 2), (1, 3))),
}


def _hist_columns(values, hist, mu, sigma):
    centres = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    return {
        "left": hist.edges[:-1], "right": hist.edges[1:], "count": hist.counts,
        "density": hist.density,
        "gauss_fit": scipy.stats.norm.pdf(centres, loc=mu, scale=sigma),
    }


def _hist_qq_panels(man, root, prefix, values, coeffs, meta):
    rep = moment_report(values)
    sigma = np.sqrt(rep.variance)
    hist = fd_histogram(values)
    cols = _hist_columns(values, hist, 0.0, sigma)
    man.add(io.write_csv(root / f"{prefix}_hist.csv", cols, dict(meta, bin_width=hist.bin_width)))
    qq = qq_normal(values)
    man.add(io.write_csv(root / f"{prefix}_qq.csv",
                         {"theoretical": qq.theoretical_q, "empirical": qq.empirical_q}, meta))
    man.add(io.write_csv(root / f"{prefix}_qq_detrended.csv",
                         {"theoretical": qq.theoretical_q, "residual": qq.residuals}, meta))
    return _family_summary(rep, coeffs, qq.slope())


def _family_summary(rep, coeffs, slope=None):
    var = theoretical_variance(coeffs)
    out = {
        "variance": {"measured": rep.variance, "se": rep.se_variance, "theory": var},
        "excess_kurtosis": {"measured": rep.excess_kurtosis, "se": rep.se_kurtosis,
                            "theory": 0.0, "bias_note": rep.kurtosis_bias_note},
        "mean": {"measured": rep.mean, "se": float(np.sqrt(rep.variance / rep.n)),
                 "theory": 0.0},
        "skewness_proxy": skewness_proxy(coeffs)[2],
    }
    if slope is not None:
        out["qq_slope"] = slope
    return out


def _sample(coeffs, dim, n, seed, mode, threads):
    cfg = SampleConfig(matrix_dim=dim, max_power=coeffs.m, n_samples=n, seed=seed, mode=mode)
    return sample_work(cfg, coeffs, threads=threads).values


def _fig_hist_qq(recipe, man, root, seed, threads, mode):
    summary = {}
    for tag, make in recipe.families:
        coeffs = make()
        s = subseed(seed, f"{recipe.figure}/{tag}")
        values = _sample(coeffs, recipe.dims[0], recipe.n_samples, s, mode, threads)
        meta = _meta(s, figure=recipe.figure, family=tag, matrix_dim=recipe.dims[0],
                     mode=mode, n=recipe.n_samples, coefficients=coeffs.to_json())
        summary[tag] = _hist_qq_panels(man, root, f"{recipe.figure}_{tag}", values, coeffs, meta)
    return summary


def _fig3(recipe, man, root, seed, threads):
    summary = {}
    dim, n = recipe.dims[0], recipe.n_samples
    for tag, make in recipe.families:
        coeffs = make()
        values, seeds = {}, {}
        for mode in ("haar", "surrogate"):
            seeds[mode] = subseed(seed, f"fig3/{tag}/{mode}")
            values[mode] = _sample(coeffs, dim, n, seeds[mode], mode, threads)
        meta = _meta(seeds, figure="fig3", family=tag, matrix_dim=dim, n=n,
                     coefficients=coeffs.to_json())
        pooled = np.concatenate([values["haar"], values["surrogate"]])
        hist = fd_histogram(pooled)
        centres = 0.5 * (hist.edges[:-1] + hist.edges[1:])
        cols = {"left": hist.edges[:-1], "right": hist.edges[1:]}
        for mode in ("haar", "surrogate"):
            counts, _ = np.histogram(values[mode], bins=hist.edges)
            cols[f"density_{mode}"] = counts / (n * hist.bin_width)
        cols["pooled_fit"] = scipy.stats.norm.pdf(centres, loc=pooled.mean(),
                                                  scale=pooled.std(ddof=1))
        man.add(io.write_csv(root / f"fig3_{tag}_hist.csv", cols,
                             dict(meta, bin_width=hist.bin_width, bins="pooled FD")))
        fam = {}
        for mode in ("haar", "surrogate"):
            qq = qq_normal(values[mode])
            man.add(io.write_csv(root / f"fig3_{tag}_qq_{mode}.csv",
                                 {"theoretical": qq.theoretical_q, "empirical": qq.empirical_q},
                                 meta))
            fam[mode] = _family_summary(moment_report(values[mode]), coeffs, qq.slope())
        h, s = fam["haar"], fam["surrogate"]
        fam["mean_diff_over_se"] = (h["mean"]["measured"] - s["mean"]["measured"]) / np.hypot(
            h["mean"]["se"], s["mean"]["se"])
        fam["variance_diff_over_se"] = (
            h["variance"]["measured"] - s["variance"]["measured"]
        ) / np.hypot(h["variance"]["se"], s["variance"]["se"])
        summary[tag] = fam
    return summary


def _fig4(recipe, man, root, seed, threads):
    coeffs = recipe.families[0][1]()
    theory = theoretical_variance(coeffs)
    var_rows, kurt_rows = [], []
    seeds = {}
    for dim in recipe.dims:
        sv = subseed(seed, f"fig4/variance/{dim}")
        sk = subseed(seed, f"fig4/kurtosis/{dim}")
        seeds[dim] = {"variance": sv, "kurtosis": sk}
        rv = moment_report(_sample(coeffs, dim, recipe.n_samples, sv, recipe.mode, threads))
        rk = moment_report(_sample(coeffs, dim, recipe.n_kurtosis, sk, recipe.mode, threads))
        var_rows.append((dim, rv.variance, rv.se_variance, theory))
        kurt_rows.append((dim, rk.excess_kurtosis, rk.se_kurtosis, rk.kurtosis_bias_note))
    meta = _meta(seeds, figure="fig4", mode=recipe.mode, coefficients=coeffs.to_json(),
                 n_variance=recipe.n_samples, n_kurtosis=recipe.n_kurtosis,
                 dims_note="N ladder {20,40,80,160} is a reproduction choice")
    v = np.array(var_rows)
    k = np.array(kurt_rows)
    man.add(io.write_csv(root / "fig4_variance.csv",
                         {"N": v[:, 0].astype(int), "variance": v[:, 1], "se": v[:, 2],
                          "theory": v[:, 3]}, meta))
    man.add(io.write_csv(root / "fig4_kurtosis.csv",
                         {"N": k[:, 0].astype(int), "excess_kurtosis": k[:, 1], "se": k[:, 2],
                          "bias_note": k[:, 3]}, meta))
    return {
        "theory_variance": theory,
        "variance": {int(r[0]): {"measured": r[1], "se": r[2],
                                 "z": (r[1] - theory) / r[2]} for r in var_rows},
        "excess_kurtosis": {int(r[0]): {"measured": r[1], "se": r[2], "z": r[1] / r[2]}
                            for r in kurt_rows},
    }


def _fig5(recipe, man, root, seed, threads):
    dim, n = recipe.dims[0], recipe.n_samples
    s = subseed(seed, "fig5/traces")
    m = max(max(p) for p in recipe.pairs)
    traces = sample_traces(SampleConfig(dim, m, n, seed=s, mode=recipe.mode), threads=threads)
    meta = _meta(s, figure="fig5", matrix_dim=dim, n=n, mode=recipe.mode)
    summary = {}
    for r, q in recipe.pairs:
        x, y = traces[:, r - 1].real, traces[:, q - 1].real
        corr = scatter_correlation(x, y)
        for std in (False, True):
            ell = theory_ellipse(r, q, standardized=std)
            xs, ys = (x / np.sqrt(r / 2), y / np.sqrt(q / 2)) if std else (x, y)
            cov, cov_se = ellipse_coverage(ell, xs, ys)
            name = f"fig5_scatter_{r}_{q}{'_std' if std else ''}"
            path = io.write_csv(root / f"{name}.csv", {"x": xs, "y": ys},
                                dict(meta, r=r, s=q, standardized=std))
            man.add(path)
            man.add(io.write_json(root / f"{name}.ellipse.json", {
                "semi_axes": list(ell.semi_axes), "center": list(ell.center),
                "level": ell.level, "q": -2.0 * np.log1p(-ell.level),
                "correlation": corr.r, "correlation_se": corr.se,
                "coverage": cov, "coverage_se": cov_se,
            }))
            summary[name] = {"correlation": {"measured": corr.r, "se": corr.se, "theory": 0.0},
                             "coverage": {"measured": cov, "se": cov_se, "theory": ell.level}}
    return summary


def reproduce_figure(figure, out_dir, seed=0, threads=1, mode=None):
    """Write every panel CSV for ``figure`` plus ``{figure}_summary.json``.

    ``mode`` overrides the sampling mode of fig1/fig2 (surrogate by default).
    """
    if figure not in RECIPES:
        raise ConfigError("figure", f"unknown figure {figure!r}; choose from {sorted(RECIPES)}")
    recipe = RECIPES[figure]
    if mode is not None and figure in ("fig1", "fig2"):
        recipe = replace(recipe, mode=str(SampleMode(mode).value))
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    man = Manifest(figure, root)
    if figure in ("fig1", "fig2"):
        summary = _fig_hist_qq(recipe, man, root, seed, threads, recipe.mode)
    elif figure == "fig3":
        summary = _fig3(recipe, man, root, seed, threads)
    elif figure == "fig4":
        summary = _fig4(recipe, man, root, seed, threads)
    else:
        summary = _fig5(recipe, man, root, seed, threads)
    summary = {"figure": figure, "seed": seed, "results": summary}
    man.add(io.write_json(root / f"{figure}_summary.json", summary))
    man.summary = summary
    man.write()
    return man
