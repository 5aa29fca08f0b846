"""Monte Carlo study harness and the command-line entry point.

Replication studies, empirical standard deviations, QQ normality data and
the lambda/mu/nu estimator-comparison curves, all emitted as plain CSV —
no rendering, any plotter can consume the output.  Every study result is a
pure function of its :class:`StudyConfig`: replication ``r`` of grid point
``g`` draws its seed from the base seed alone, so tables are bit-identical
across runs, batch sizes, and execution order.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import exact_oracle
from .estimators import estimate_ls, estimate_mom, summarize
from .moment_kernel import ModelDims, deriv, ls_slope_deriv, moment_profile
from .simulator import ObservationSeries, SimConfig, _simulate_batch, simulate

__all__ = [
    "StudyConfig",
    "ReplicationRow",
    "ReplicationTable",
    "SigmaEstimates",
    "QQData",
    "CurvePoint",
    "InsufficientSamplesError",
    "seed_for",
    "run_replications",
    "empirical_sigmas",
    "qq_data",
    "sensitivity_curves",
    "write_replication_csv",
    "read_replication_csv",
    "write_curves_csv",
    "read_curves_csv",
    "write_qq_csv",
    "read_qq_csv",
    "parse_config_file",
    "PRESETS",
    "main",
]

VALID_METHODS = ("mom", "mom-known-mean", "ls")

# Odd 64-bit constant for the per-replication seed derivation (the golden
# ratio in fixed point; any odd constant keeps the map k -> k * c bijective
# mod 2^64).
_SEED_STRIDE = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

# Replications simulated per batch; a speed/memory knob with no effect on
# any result.
_REP_CHUNK = 200

#: Built-in study presets.  "paper-s6" reproduces the published experiment
#: settings: n=7, M=14, T=4000, R=2000, estimation grid {0.25, 0.5, 0.75}
#: and a 9-point curve grid.
PRESETS: dict[str, dict[str, object]] = {
    "paper-s6": {
        "n": 7,
        "m": 14,
        "t": 4000,
        "burn_in": 1000,
        "r": 2000,
        "p": "0.25,0.5,0.75",
        "curve_p": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
        "method": "mom,ls",
    }
}


class InsufficientSamplesError(ValueError):
    """Too few (usable) samples for the requested statistic."""


def seed_for(base_seed: int, index: int) -> int:
    """Seed of one replication: base_seed XOR (index * odd stride), mod 2^64.

    ``index`` is the global 1-based replication index (grid points are laid
    out consecutively), so every replication of a study gets a distinct,
    reproducible stream.
    """
    if index < 1:
        raise ValueError(f"replication index must be >= 1, got {index}")
    if not 0 <= base_seed < 2**64:
        raise ValueError(f"base seed must be an unsigned 64-bit integer, got {base_seed!r}")
    return (base_seed ^ ((index * _SEED_STRIDE) & _MASK)) & _MASK


@dataclass(frozen=True)
class StudyConfig:
    """Definition of one Monte Carlo experiment."""

    dims: ModelDims
    T: int
    burn_in: int
    R: int
    p_grid: tuple[float, ...]
    base_seed: int
    methods: tuple[str, ...] = ("mom", "ls")
    fd_step: float = 1e-5

    def __post_init__(self) -> None:
        if self.T < 2:
            raise ValueError(f"series length must be >= 2, got {self.T}")
        if self.burn_in < 0:
            raise ValueError(f"burn-in must be >= 0, got {self.burn_in}")
        if self.R < 2:
            raise ValueError(f"replication count must be >= 2, got {self.R}")
        if not self.p_grid:
            raise ValueError("p_grid must not be empty")
        for p in self.p_grid:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"grid values must lie in (0, 1], got {p!r}")
        if not self.methods:
            raise ValueError("at least one estimation method is required")
        for method in self.methods:
            if method not in VALID_METHODS:
                raise ValueError(f"unknown method {method!r}; expected one of {VALID_METHODS}")
        if self.fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step!r}")


@dataclass(frozen=True)
class ReplicationRow:
    """One estimator applied to one replication."""

    p_true: float
    method: str
    rep: int
    seed: int
    p_hat: float
    statistic: float
    clamped: str


@dataclass(frozen=True)
class ReplicationTable:
    """All replication results of one study, with the config that made them."""

    cfg: StudyConfig
    rows: tuple[ReplicationRow, ...]

    def select(self, p: float, method: str) -> list[ReplicationRow]:
        return [r for r in self.rows if r.p_true == p and r.method == method]


def _apply_method(stats, method: str) -> tuple[float, float, str]:
    if method == "mom":
        report = estimate_mom(stats, "sample-mean")
    elif method == "mom-known-mean":
        report = estimate_mom(stats, "known-mean")
    elif method == "ls":
        report = estimate_ls(stats)
    else:
        raise ValueError(f"unknown method {method!r}")
    return report.p_hat, report.statistic, report.clamped


def run_replications(cfg: StudyConfig) -> ReplicationTable:
    """Simulate and estimate every (grid point, replication, method) cell.

    Replication ``r`` at grid point ``g`` (0-based) uses
    ``seed_for(base_seed, g * R + r)`` and is simulated independently of
    every other cell; batching exists only for speed.
    """
    dims = cfg.dims
    rows: list[ReplicationRow] = []
    for gi, p in enumerate(cfg.p_grid):
        seeds = [seed_for(cfg.base_seed, gi * cfg.R + r) for r in range(1, cfg.R + 1)]
        for start in range(0, cfg.R, _REP_CHUNK):
            chunk = seeds[start : start + _REP_CHUNK]
            counts = _simulate_batch(dims, p, cfg.T, cfg.burn_in, chunk)
            for k, seed in enumerate(chunk):
                rep = start + k + 1
                stats = summarize(ObservationSeries(dims, counts[k]))
                for method in cfg.methods:
                    try:
                        p_hat, statistic, clamped = _apply_method(stats, method)
                    except ValueError as exc:
                        raise type(exc)(
                            f"at (p={p!r}, rep={rep}, method={method}): {exc}"
                        ) from exc
                    rows.append(
                        ReplicationRow(
                            p_true=p,
                            method=method,
                            rep=rep,
                            seed=seed,
                            p_hat=p_hat,
                            statistic=statistic,
                            clamped=clamped,
                        )
                    )
    return ReplicationTable(cfg=cfg, rows=tuple(rows))


@dataclass(frozen=True)
class SigmaEstimates:
    """Empirical noise scales at one grid point, clamped replications excluded."""

    sigma_c: float  # sd of sqrt(T) * (p_hat - p), times |c'(p)|
    sigma_i: float  # sd of sqrt(T) * (p_bar - p), times |I'(p)|
    sd_mom: float
    sd_ls: float
    n_clamped_mom: int
    n_clamped_ls: int


def _unclamped_estimates(table: ReplicationTable, p: float, method: str) -> tuple[np.ndarray, int]:
    rows = table.select(p, method)
    usable = np.array([r.p_hat for r in rows if r.clamped == "none"])
    return usable, len(rows) - usable.size


def empirical_sigmas(table: ReplicationTable, p: float, T: int) -> SigmaEstimates:
    """Estimate the asymptotic noise scales by inverting the variance law.

    Each estimator's asymptotic variance is (derivative)^-2 sigma^2 / T, so
    sigma is recovered as sd(sqrt(T) (estimate - p)) times the absolute
    derivative of the inverted moment function.  Clamped replications sit
    on a bracket endpoint and would mechanically distort the spread; they
    are excluded and counted.  Requires >= 30 unclamped replications per
    estimator.
    """
    mom_hat, clamped_mom = _unclamped_estimates(table, p, "mom")
    ls_hat, clamped_ls = _unclamped_estimates(table, p, "ls")
    for label, arr in (("mom", mom_hat), ("ls", ls_hat)):
        if arr.size < 30:
            raise InsufficientSamplesError(
                f"only {arr.size} unclamped '{label}' replications at p={p!r}; need >= 30"
            )
    cfg = table.cfg
    c_prime = deriv("c", cfg.dims, p, cfg.fd_step)
    i_prime = ls_slope_deriv(cfg.dims.n, p)
    sd_mom = float(mom_hat.std(ddof=1))
    sd_ls = float(ls_hat.std(ddof=1))
    root_t = float(np.sqrt(T))
    return SigmaEstimates(
        sigma_c=root_t * sd_mom * abs(c_prime),
        sigma_i=root_t * sd_ls * abs(i_prime),
        sd_mom=sd_mom,
        sd_ls=sd_ls,
        n_clamped_mom=clamped_mom,
        n_clamped_ls=clamped_ls,
    )


@dataclass(frozen=True, eq=False)
class QQData:
    """Standard-normal QQ pairs for one estimator sample, plus their correlation."""

    theoretical: np.ndarray
    empirical: np.ndarray
    correlation: float


def qq_data(samples: Sequence[float]) -> QQData:
    """Quantile pairs of a sample against the standard normal.

    The sample is standardized by its own mean and sd (ddof=1); empirical
    quantiles are the sorted standardized values, theoretical quantiles use
    plotting positions (k - 0.5) / R.  Needs >= 50 samples with nonzero
    spread.
    """
    arr = np.sort(np.asarray(samples, dtype=float))
    r = arr.size
    if r < 50:
        raise InsufficientSamplesError(f"need >= 50 samples for QQ data, got {r}")
    sd = arr.std(ddof=1)
    if sd == 0.0:
        raise ValueError("samples are constant (zero standard deviation)")
    empirical = (arr - arr.mean()) / sd
    norm = NormalDist()
    theoretical = np.array([norm.inv_cdf((k - 0.5) / r) for k in range(1, r + 1)])
    correlation = float(np.corrcoef(theoretical, empirical)[0, 1])
    return QQData(theoretical=theoretical, empirical=empirical, correlation=correlation)


@dataclass(frozen=True)
class CurvePoint:
    """Estimator-comparison ratios at one grid point.

    ``lam`` is the moment-sensitivity ratio c'(p)/I'(p) (written to the
    "lambda" CSV column), ``mu`` the empirical noise ratio sigma_I/sigma_c,
    and ``nu = lam * mu`` the implied asymptotic sd ratio of the
    least-squares to the moment estimator.
    """

    p: float
    lam: float
    mu: float
    nu: float
    sd_mom: float
    sd_ls: float
    n_clamped_mom: int
    n_clamped_ls: int


def sensitivity_curves(cfg: StudyConfig) -> list[CurvePoint]:
    """The lambda/mu/nu comparison curves over cfg.p_grid.

    lambda comes from the closed-form derivatives, mu from
    :func:`empirical_sigmas` on a fresh replication table, nu is their
    product.  Requires R >= 100 and both "mom" and "ls" among the methods.
    """
    if cfg.R < 100:
        raise ValueError(f"sensitivity curves need R >= 100, got {cfg.R}")
    for needed in ("mom", "ls"):
        if needed not in cfg.methods:
            raise ValueError(f"sensitivity curves need method {needed!r} in the config")
    table = run_replications(cfg)
    points = []
    for p in cfg.p_grid:
        sig = empirical_sigmas(table, p, cfg.T)
        lam = deriv("c", cfg.dims, p, cfg.fd_step) / ls_slope_deriv(cfg.dims.n, p)
        mu = sig.sigma_i / sig.sigma_c
        points.append(
            CurvePoint(
                p=p,
                lam=lam,
                mu=mu,
                nu=lam * mu,
                sd_mom=sig.sd_mom,
                sd_ls=sig.sd_ls,
                n_clamped_mom=sig.n_clamped_mom,
                n_clamped_ls=sig.n_clamped_ls,
            )
        )
    return points


# ---------------------------------------------------------------------------
# CSV wire formats (floats carry 17 significant digits and round-trip exactly)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@contextmanager
def _out_stream(dest: str | TextIO | None):
    if dest is None:
        yield sys.stdout
    elif hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", newline="") as fh:
            yield fh


def write_replication_csv(table: ReplicationTable, dest: str | TextIO | None = None) -> None:
    with _out_stream(dest) as fh:
        fh.write("p_true,method,rep,seed,p_hat,statistic,clamped\n")
        for r in table.rows:
            fh.write(
                f"{_fmt(r.p_true)},{r.method},{r.rep},{r.seed},"
                f"{_fmt(r.p_hat)},{_fmt(r.statistic)},{r.clamped}\n"
            )


def read_replication_csv(path: str) -> tuple[ReplicationRow, ...]:
    rows = []
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != "p_true,method,rep,seed,p_hat,statistic,clamped":
            raise ValueError(f"unexpected replication header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            p_true, method, rep, seed, p_hat, statistic, clamped = line.split(",")
            rows.append(
                ReplicationRow(
                    p_true=float(p_true),
                    method=method,
                    rep=int(rep),
                    seed=int(seed),
                    p_hat=float(p_hat),
                    statistic=float(statistic),
                    clamped=clamped,
                )
            )
    return tuple(rows)


def write_curves_csv(points: Iterable[CurvePoint], dest: str | TextIO | None = None) -> None:
    with _out_stream(dest) as fh:
        fh.write("p,lambda,mu,nu,sd_mom,sd_ls,n_clamped_mom,n_clamped_ls\n")
        for c in points:
            fh.write(
                f"{_fmt(c.p)},{_fmt(c.lam)},{_fmt(c.mu)},{_fmt(c.nu)},"
                f"{_fmt(c.sd_mom)},{_fmt(c.sd_ls)},{c.n_clamped_mom},{c.n_clamped_ls}\n"
            )


def read_curves_csv(path: str) -> list[CurvePoint]:
    points = []
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != "p,lambda,mu,nu,sd_mom,sd_ls,n_clamped_mom,n_clamped_ls":
            raise ValueError(f"unexpected curves header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            p, lam, mu, nu, sd_mom, sd_ls, cm, cl = line.split(",")
            points.append(
                CurvePoint(
                    p=float(p),
                    lam=float(lam),
                    mu=float(mu),
                    nu=float(nu),
                    sd_mom=float(sd_mom),
                    sd_ls=float(sd_ls),
                    n_clamped_mom=int(cm),
                    n_clamped_ls=int(cl),
                )
            )
    return points


def write_qq_csv(qq: QQData, dest: str | TextIO | None = None) -> None:
    with _out_stream(dest) as fh:
        fh.write("theoretical_q,empirical_q\n")
        for t, e in zip(qq.theoretical, qq.empirical):
            fh.write(f"{_fmt(t)},{_fmt(e)}\n")


def read_qq_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    theo, emp = [], []
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != "theoretical_q,empirical_q":
            raise ValueError(f"unexpected QQ header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, e = line.split(",")
            theo.append(float(t))
            emp.append(float(e))
    return np.asarray(theo), np.asarray(emp)


# ---------------------------------------------------------------------------
# Configuration file + CLI


def parse_config_file(path: str) -> dict[str, str]:
    """Read a flat key=value file mirroring the CLI flags.

    Blank lines and '#' comments are skipped; keys are case-insensitive and
    '-' normalizes to '_'.  Values stay strings and are converted exactly
    like the corresponding flag.  Flags given on the command line override
    file values.
    """
    out: dict[str, str] = {}
    with open(path, "r") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            out[key.strip().lower().replace("-", "_")] = value.strip()
    return out


_REQUIRED = object()

_CONVERT = {
    "n": int,
    "m": int,
    "p": str,
    "t": int,
    "burn_in": int,
    "r": int,
    "seed": int,
    "method": str,
    "out": str,
    "tol": float,
}


def _context(args: argparse.Namespace) -> tuple[dict[str, str], dict[str, object]]:
    cfgmap = parse_config_file(args.config) if getattr(args, "config", None) else {}
    preset_name = getattr(args, "preset", None) or cfgmap.get("preset")
    if preset_name is not None and preset_name not in PRESETS:
        raise ValueError(f"unknown preset {preset_name!r}; available: {sorted(PRESETS)}")
    preset = PRESETS[preset_name] if preset_name else {}
    return cfgmap, preset


def _get(args, cfgmap, preset, key, default=_REQUIRED):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in cfgmap:
        return _CONVERT.get(key, str)(cfgmap[key])
    if key in preset:
        return preset[key]
    if default is _REQUIRED:
        raise ValueError(f"missing required option --{key.replace('_', '-')}")
    return default


def _parse_p_list(spec: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in str(spec).split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"could not parse p value(s) from {spec!r}") from None
    if not values:
        raise ValueError(f"no p values in {spec!r}")
    return values


def _parse_methods(spec: str) -> tuple[str, ...]:
    methods = tuple(tok.strip() for tok in str(spec).split(",") if tok.strip())
    for method in methods:
        if method not in VALID_METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {VALID_METHODS}")
    return methods


def _single_p(spec) -> float:
    values = _parse_p_list(spec)
    if len(values) != 1:
        raise ValueError(f"expected a single p value, got {values!r}")
    return values[0]


def cmd_moments(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    dims = ModelDims(_get(args, cfgmap, preset, "n"), _get(args, cfgmap, preset, "m"))
    p = _single_p(_get(args, cfgmap, preset, "p"))
    profile = moment_profile(dims, p)
    print(json.dumps(asdict(profile), indent=2))
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    n = _get(args, cfgmap, preset, "n")
    m = _get(args, cfgmap, preset, "m")
    p = _single_p(_get(args, cfgmap, preset, "p"))
    pi1, pi2, pi3, pi4 = exact_oracle.exact_scenarios(n, p)
    chain = exact_oracle.build_pair_chain(n, p)
    payload = {
        "pi1": pi1,
        "pi2": pi2,
        "pi3": pi3,
        "pi4": pi4,
        "kappa_implied": chain.kappa_implied(),
        "pi_eq": chain.pi_eq(),
        "pi_neq": chain.pi_neq(),
        "c_exact": exact_oracle.exact_lag1_cov(n, m, p),
    }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    cfg = SimConfig(
        dims=ModelDims(_get(args, cfgmap, preset, "n"), _get(args, cfgmap, preset, "m")),
        p=_single_p(_get(args, cfgmap, preset, "p")),
        T=_get(args, cfgmap, preset, "t"),
        burn_in=_get(args, cfgmap, preset, "burn_in", 1000),
        seed=_get(args, cfgmap, preset, "seed", 0),
    )
    series = simulate(cfg)
    out = _get(args, cfgmap, preset, "out", None)
    if out is None:
        n = cfg.dims.n
        sys.stdout.write("t," + ",".join(f"v{i + 1}" for i in range(n)) + "\n")
        for t, row in enumerate(series.counts, start=1):
            sys.stdout.write(f"{t}," + ",".join(str(int(v)) for v in row) + "\n")
    else:
        series.to_csv(out)
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    series = ObservationSeries.from_csv(args.series_csv)
    n = _get(args, cfgmap, preset, "n", None)
    m = _get(args, cfgmap, preset, "m", None)
    if n is not None and n != series.dims.n:
        raise ValueError(f"--n {n} does not match the {series.dims.n} vertices in the file")
    if m is not None and m != series.dims.m:
        raise ValueError(f"--m {m} does not match the {series.dims.m} walkers in the file")
    method = _get(args, cfgmap, preset, "method", "mom")
    if method not in VALID_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {VALID_METHODS}")
    tol = _get(args, cfgmap, preset, "tol", 1e-10)
    stats = summarize(series)
    if method == "mom":
        report = estimate_mom(stats, "sample-mean", tol=tol)
    elif method == "mom-known-mean":
        report = estimate_mom(stats, "known-mean", tol=tol)
    else:
        report = estimate_ls(stats, tol=tol)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0


def _study_config(args, cfgmap, preset, grid_key: str = "p") -> StudyConfig:
    if grid_key == "curve_p":
        p_spec = getattr(args, "p", None) or cfgmap.get("p") or preset.get("curve_p")
        if p_spec is None:
            raise ValueError("missing required option --p")
    else:
        p_spec = _get(args, cfgmap, preset, "p")
    return StudyConfig(
        dims=ModelDims(_get(args, cfgmap, preset, "n"), _get(args, cfgmap, preset, "m")),
        T=_get(args, cfgmap, preset, "t"),
        burn_in=_get(args, cfgmap, preset, "burn_in", 1000),
        R=_get(args, cfgmap, preset, "r"),
        p_grid=_parse_p_list(p_spec),
        base_seed=_get(args, cfgmap, preset, "seed", 0),
        methods=_parse_methods(_get(args, cfgmap, preset, "method", "mom,ls")),
    )


def cmd_replicate(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    cfg = _study_config(args, cfgmap, preset)
    table = run_replications(cfg)
    write_replication_csv(table, _get(args, cfgmap, preset, "out", None))
    return 0


def cmd_qq(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    method_spec = _get(args, cfgmap, preset, "method", "mom")
    methods = _parse_methods(method_spec)
    if len(methods) != 1:
        raise ValueError(f"qq needs exactly one method, got {methods!r}")
    p = _single_p(_get(args, cfgmap, preset, "p"))
    cfg = StudyConfig(
        dims=ModelDims(_get(args, cfgmap, preset, "n"), _get(args, cfgmap, preset, "m")),
        T=_get(args, cfgmap, preset, "t"),
        burn_in=_get(args, cfgmap, preset, "burn_in", 1000),
        R=_get(args, cfgmap, preset, "r"),
        p_grid=(p,),
        base_seed=_get(args, cfgmap, preset, "seed", 0),
        methods=methods,
    )
    table = run_replications(cfg)
    usable, clamped = _unclamped_estimates(table, p, methods[0])
    qq = qq_data(usable)
    write_qq_csv(qq, _get(args, cfgmap, preset, "out", None))
    print(
        f"correlation={qq.correlation:.6f} ({clamped} clamped replications excluded)",
        file=sys.stderr,
    )
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    cfgmap, preset = _context(args)
    cfg = _study_config(args, cfgmap, preset, grid_key="curve_p")
    points = sensitivity_curves(cfg)
    write_curves_csv(points, _get(args, cfgmap, preset, "out", None))
    return 0


def _add_options(sp: argparse.ArgumentParser, *keys: str) -> None:
    spec = {
        "n": dict(type=int, help="vertex count"),
        "m": dict(type=int, help="walker count"),
        "p": dict(type=str, help="edge probability (comma-separated list where a grid is accepted)"),
        "t": dict(type=int, help="recorded series length"),
        "burn_in": dict(type=int, flag="--burn-in", help="unrecorded steps before the window (default 1000)"),
        "r": dict(type=int, help="replication count"),
        "seed": dict(type=int, help="base RNG seed (default 0)"),
        "method": dict(type=str, help=f"estimation method(s), comma-separated from {VALID_METHODS}"),
        "tol": dict(type=float, help="inversion tolerance (default 1e-10)"),
        "out": dict(type=str, help="output path (default: stdout)"),
        "preset": dict(type=str, help=f"named preset: {sorted(PRESETS)}"),
        "config": dict(type=str, help="flat key=value file mirroring the flags (flags win)"),
    }
    for key in keys:
        opts = dict(spec[key])
        flag = opts.pop("flag", f"--{key}")
        sp.add_argument(flag, dest=key, default=None, **opts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgewalk",
        description=(
            "Simulation and estimation for walkers on a per-step-resampled "
            "random graph, observed through vertex occupancy counts."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("moments", help="print the closed-form moment profile as JSON")
    _add_options(sp, "n", "m", "p", "config")
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("oracle", help="print exact small-instance values as JSON (n <= 4)")
    _add_options(sp, "n", "m", "p", "config")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("simulate", help="write one observation series as CSV")
    _add_options(sp, "n", "m", "p", "t", "burn_in", "seed", "out", "preset", "config")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("estimate", help="estimate p from a series CSV, print a JSON report")
    sp.add_argument("series_csv", help="path to a series CSV (header t,v1,...,vn)")
    _add_options(sp, "n", "m", "method", "tol", "config")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("replicate", help="run a replication study, write the table as CSV")
    _add_options(sp, "n", "m", "p", "t", "burn_in", "r", "seed", "method", "out", "preset", "config")
    sp.set_defaults(func=cmd_replicate)

    sp = sub.add_parser("qq", help="QQ pairs of one estimator against the standard normal")
    _add_options(sp, "n", "m", "p", "t", "burn_in", "r", "seed", "method", "out", "preset", "config")
    sp.set_defaults(func=cmd_qq)

    sp = sub.add_parser("curves", help="lambda/mu/nu comparison curves over a p grid")
    _add_options(sp, "n", "m", "p", "t", "burn_in", "r", "seed", "out", "preset", "config")
    sp.set_defaults(func=cmd_curves)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
