"""Command-line scenario runner.

    entrodyn run --scenario ou --gamma 1 --diffusion 1 --t-end 5 --output ou.csv
    entrodyn check --suite inequalities

Exit codes: 0 success, 1 failed check, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import checks
from . import fokker_planck as fp
from .densities import GaussianParams, Grid, gaussian_on_grid
from .errors import (
    AliasingDetected,
    DomainError,
    EntrodynError,
    GridTooCoarse,
    GridTooNarrow,
    Instability,
    NotNormalizable,
    ResolutionTooFine,
    ZeroMass,
)
from .functionals import coarse_grained_entropy, differential_entropy
from .gaussian_analytics import planck_closed_form, planck_coarse_graining
from .quantum_packets import (
    coherent_state,
    free_packet,
    hermite_functions,
    hj_residual,
    quantum_balance,
    squeezed_state,
    stationary_state,
)
from .spectral import WaveFunction, gaussian_wavefunction, uncertainty_report

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMON = {"grid_n", "grid_span", "t_end", "dt", "report_every", "output", "plot", "plot_columns", "format"}

# every scenario's parameters with their defaults
SCENARIOS: dict[str, dict[str, float]] = {
    "heat-kernel": dict(diffusion=1.0, t0=0.1, t_end=2.0, dt=1e-3, report_every=20, grid_n=4096, grid_span=40.0),
    "ou": dict(gamma=1.0, diffusion=1.0, alpha0=1.0, sigma0sq=2.0, t_end=5.0, dt=1e-3, report_every=10,
               grid_n=2048, grid_span=20.0),
    "free-packet": dict(alpha=1.0, diffusion=1.0, t_end=5.0, dt=0.01, report_every=1, grid_n=8192, grid_span=128.0),
    "coherent": dict(omega=1.0, q0=1.0, p0=0.0, mass=1.0, diffusion=0.5, t_end=6.28, dt=0.02, report_every=1,
                     grid_n=2048, grid_span=20.0),
    "squeezed": dict(gamma=2.0, t_end=6.28, dt=0.02, report_every=1, grid_n=2048, grid_span=24.0),
    "stationary": dict(n=3, grid_n=4096, grid_span=20.0),
    "uncertainty": dict(n=0, gamma=1.0, t=0.0, grid_n=4096, grid_span=40.0),
    "coarse-grain": dict(sigma=0.5e-3, r=1e-6, grid_n=0, grid_span=0.0),
    "planck": dict(r=0.01),
    "shannon-table": dict(),
}

INTEGER_KEYS = {"grid_n", "report_every", "n"}
TEXT_KEYS = {"output", "plot", "plot_columns", "format"}


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    """Nine significant digits, empty for absent values."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return "%.9g" % value


def read_config(path: str) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve_config(scenario: str, file_values: dict, flag_values: dict) -> dict:
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: unknown scenario {scenario!r}")
    allowed = set(SCENARIOS[scenario]) | TEXT_KEYS
    if scenario in ("heat-kernel", "ou", "free-packet", "coherent", "squeezed"):
        allowed |= COMMON
    merged = dict(file_values)
    merged.pop("scenario", None)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    for key in merged:
        if key not in allowed:
            raise ConfigError(f"{key}: not a parameter of scenario {scenario!r}")
    cfg: dict = dict(SCENARIOS[scenario])
    cfg.update(output=None, plot=None, plot_columns="S", format="csv")
    for key, value in merged.items():
        if key in TEXT_KEYS:
            cfg[key] = str(value)
            continue
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {value!r}") from None
        if not math.isfinite(number):
            raise ConfigError(f"{key}: must be finite")
        if key in INTEGER_KEYS:
            if number != int(number):
                raise ConfigError(f"{key}: expected an integer, got {value!r}")
            number = int(number)
        cfg[key] = number
    if cfg["format"] not in ("csv", "jsonl"):
        raise ConfigError(f"format: expected csv or jsonl, got {cfg['format']!r}")
    for key in ("dt", "t_end"):
        if key in cfg and not cfg[key] > 0:
            raise ConfigError(f"{key}: must be positive")
    if "report_every" in cfg and cfg["report_every"] < 1:
        raise ConfigError("report_every: must be at least 1")
    if "grid_n" in cfg and cfg["grid_n"] and cfg["grid_n"] < 8:
        raise ConfigError("grid_n: must be at least 8")
    return cfg


# ---------------------------------------------------------------------------
# Scenarios.  Time-series scenarios return rows keyed by CSV column; table
# scenarios return (title, [(quantity, value), ...]).


def _grid(cfg) -> Grid:
    return Grid.centered(cfg["grid_span"], cfg["grid_n"])


def _times(cfg, t0: float = 0.0) -> np.ndarray:
    n = int(round((cfg["t_end"] - t0) / cfg["dt"]))
    idx = list(range(0, n + 1, cfg["report_every"]))
    if idx[-1] != n:
        idx.append(n)
    return t0 + cfg["dt"] * np.array(idx, dtype=float)


def _smoluchowski_rows(traj: fp.Trajectory) -> list[dict]:
    return [r.as_row() for r in traj.reports]


def scenario_heat(cfg):
    D = cfg["diffusion"]
    rho0 = fp.heat_kernel_density(D, cfg["t0"], _grid(cfg))
    traj = fp.evolve(rho0, fp.SmoluchowskiModel.free(D), cfg["t_end"], cfg["dt"], cfg["report_every"], t0=cfg["t0"])
    return _smoluchowski_rows(traj)


def scenario_ou(cfg):
    model = fp.SmoluchowskiModel.ornstein_uhlenbeck(cfg["gamma"], cfg["diffusion"])
    if not cfg["sigma0sq"] > 0:
        raise ConfigError("sigma0sq: must be positive")
    rho0 = gaussian_on_grid(GaussianParams(cfg["alpha0"], math.sqrt(cfg["sigma0sq"])), _grid(cfg))
    traj = fp.evolve(rho0, model, cfg["t_end"], cfg["dt"], cfg["report_every"])
    return _smoluchowski_rows(traj)


def _quantum_rows(states) -> list[dict]:
    rows = []
    for st in states:
        q = quantum_balance(st)
        D2 = st.D * st.D
        mean = st.rho.expect(st.rho.x)
        var = st.rho.expect((st.rho.x - mean) ** 2)
        rows.append(dict(
            t=q.t, S=q.S, S_dot=q.S_dot, S_dot_in=q.S_dot_in, Q_dot=q.Q_dot,
            F_raw=q.F_scaled / D2, F_dot=q.F_dot / D2, H_c=None, helmholtz=None,
            mean=mean, variance=var, v2_mean=q.v2_mean, u2_mean=q.u2_mean,
            omega_mean=q.omega_mean, energy_H=0.5 * (q.v2_mean + q.u2_mean) + q.omega_mean,
        ))
    return rows


def scenario_free_packet(cfg):
    g = _grid(cfg)
    return _quantum_rows(free_packet(cfg["alpha"], cfg["diffusion"], t, g) for t in _times(cfg))


def scenario_coherent(cfg):
    g = _grid(cfg)
    args = (cfg["omega"], cfg["q0"], cfg["p0"], cfg["mass"], cfg["diffusion"])
    return _quantum_rows(coherent_state(*args, t, g) for t in _times(cfg))


def scenario_squeezed(cfg):
    g = _grid(cfg)
    return _quantum_rows(squeezed_state(cfg["gamma"], t, g) for t in _times(cfg))


def scenario_stationary(cfg):
    g = _grid(cfg)
    rows = []
    for n in range(int(cfg["n"]) + 1):
        res = np.abs(hj_residual(n, g))
        rows.append((f"level {n} max residual", float(res.max())))
        rows.append((f"level {n} points", res.size))
    q = quantum_balance(stationary_state(int(cfg["n"]), g))
    rows += [("S", q.S), ("S_dot", q.S_dot), ("F_scaled", q.F_scaled), ("E", q.E)]
    return "n + 1/2 = Omega - Q residuals (hbar = m = omega = 1)", rows


def scenario_uncertainty(cfg):
    g = _grid(cfg)
    n, gamma = int(cfg["n"]), cfg["gamma"]
    if n and gamma != 1.0:
        raise ConfigError("n: choose either a Hermite level or a squeezing gamma, not both")
    if n:
        psi = WaveFunction(g, hermite_functions(n, g.x)[n])
    elif gamma != 1.0:
        psi = WaveFunction(g, squeezed_state(gamma, cfg["t"], g).wavefunction())
    else:
        psi = gaussian_wavefunction(g)
    rep = uncertainty_report(psi)
    rows = [(k, getattr(rep, k)) for k in (
        "s_x", "s_p", "sum", "bound", "sigma_x", "sigma_p", "entropy_power_product", "fisher_x",
        "fisher_momentum_bound",
    )]
    rows.append(("sigma_x*sigma_p", rep.sigma_x * rep.sigma_p))
    return "entropic uncertainty", rows


def scenario_coarse_grain(cfg):
    sigma, r = cfg["sigma"], cfg["r"]
    if not (sigma > 0 and r > 0):
        raise ConfigError("sigma, r: must be positive")
    span = cfg["grid_span"] or 12.0 * sigma
    n = cfg["grid_n"] or int(round(span / (r / 4.0))) + 1
    g = Grid.centered(span, n)
    rho = gaussian_on_grid(GaussianParams(0.0, sigma), g)
    S = differential_entropy(rho).value
    SB = coarse_grained_entropy(rho, r).value
    return "coarse graining", [
        ("S", S), ("S_B", SB), ("S - ln r", S - math.log(r)), ("S_B - (S - ln r)", SB - (S - math.log(r))),
    ]


def scenario_planck(cfg):
    r = cfg["r"]
    pc = planck_coarse_graining(r)
    n_closed, s_closed = planck_closed_form(r)
    return "geometric bins of the exponential density", [
        ("r", r), ("n_mean", pc.n_mean), ("n_mean closed form", n_closed), ("S_B", pc.entropy),
        ("S_B closed form", s_closed), ("1 - ln r", 1.0 - math.log(r)),
    ]


def scenario_shannon(cfg):
    rows = []
    for p, h, tab in checks.shannon_table():
        rows.append((f"{{{p:g}, {1 - p:g}}}", h))
    return "two-outcome entropies in bits", rows


RUNNERS = {
    "heat-kernel": scenario_heat,
    "ou": scenario_ou,
    "free-packet": scenario_free_packet,
    "coherent": scenario_coherent,
    "squeezed": scenario_squeezed,
    "stationary": scenario_stationary,
    "uncertainty": scenario_uncertainty,
    "coarse-grain": scenario_coarse_grain,
    "planck": scenario_planck,
    "shannon-table": scenario_shannon,
}


# ---------------------------------------------------------------------------
# Output


def write_series(rows: list[dict], path, fmt: str = "csv") -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        if fmt == "jsonl":
            for row in rows:
                obj = {k: (None if _fmt(row.get(k)) == "" else float(_fmt(row.get(k)))) for k in fp.CSV_COLUMNS}
                fh.write(json.dumps(obj, sort_keys=False) + "\n")
            return
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(fp.CSV_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row.get(k)) for k in fp.CSV_COLUMNS])


def write_table(rows, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(("quantity", "value"))
        for k, v in rows:
            w.writerow((k, _fmt(v)))


def svg_chart(t, y, column: str, width: int = 640, height: int = 360) -> str:
    """Minimal self-contained SVG polyline chart with axis labels."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    t, y = t[ok], y[ok]
    pad = 50
    lo, hi = (float(y.min()), float(y.max())) if y.size else (0.0, 1.0)
    if hi - lo < 1e-300:
        lo, hi = lo - 0.5, hi + 0.5
    t0, t1 = (float(t.min()), float(t.max())) if t.size else (0.0, 1.0)
    if t1 - t0 < 1e-300:
        t1 = t0 + 1.0
    sx = lambda v: pad + (v - t0) / (t1 - t0) * (width - 2 * pad)
    sy = lambda v: height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y))
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="12">t</text>',
        f'<text x="14" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 14 {height / 2:.0f})" '
        f'text-anchor="middle">{column}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{_fmt(t0)}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" text-anchor="end">{_fmt(t1)}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{_fmt(lo)}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="10" text-anchor="end">{_fmt(hi)}</text>',
        "</svg>",
        "",
    ])


def write_plots(rows: list[dict], plot_path: str, columns: str) -> list[Path]:
    """One SVG per column plus a ``.dat``/``.gp`` pair for gnuplot."""
    cols = [c.strip() for c in columns.split(",") if c.strip()]
    for c in cols:
        if c not in fp.CSV_COLUMNS or c == "t":
            raise ConfigError(f"plot_columns: unknown column {c!r}")
    base = Path(plot_path)
    stem = base.with_suffix("")
    t = [r["t"] for r in rows]
    written = []
    for c in cols:
        target = base if len(cols) == 1 else Path(f"{stem}_{c}.svg")
        y = [np.nan if r.get(c) is None else r[c] for r in rows]
        target.write_text(svg_chart(t, y, c), encoding="ascii")
        written.append(target)
    dat, gp = Path(f"{stem}.dat"), Path(f"{stem}.gp")
    with open(dat, "w", encoding="ascii") as fh:
        fh.write("# t " + " ".join(cols) + "\n")
        for r in rows:
            fh.write(" ".join(_fmt(r.get(k)) or "nan" for k in ["t", *cols]) + "\n")
    plots = ", ".join(f"'{dat.name}' using 1:{i + 2} with lines title '{c}'" for i, c in enumerate(cols))
    gp.write_text(f"set xlabel 't'\nplot {plots}\n", encoding="ascii")
    written += [dat, gp]
    return written


# ---------------------------------------------------------------------------
# Entry points


PARAM_FLAGS = sorted({k for d in SCENARIOS.values() for k in d} | COMMON - {"output", "plot", "plot_columns", "format"})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrodyn", description="Entropy and Fisher-information dynamics scenarios")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("--scenario", help="one of: " + ", ".join(SCENARIOS))
    run.add_argument("--config", help="key = value file; flags override it")
    for key in PARAM_FLAGS:
        run.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    run.add_argument("--output", default=None, help="CSV/JSONL path")
    run.add_argument("--format", default=None, help="csv (default) or jsonl")
    run.add_argument("--plot", default=None, help="SVG path for a line chart")
    run.add_argument("--plot-columns", dest="plot_columns", default=None, help="comma separated columns")
    check = sub.add_parser("check", help="run invariant suites")
    check.add_argument("--suite", default="all", choices=["inequalities", "balance", "oracles", "all"])
    return parser


def _print_series(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fp.CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(k)) for k in fp.CSV_COLUMNS])


def cmd_run(args, out=None) -> int:
    out = out or sys.stdout
    flags = {k: getattr(args, k) for k in PARAM_FLAGS + ["output", "format", "plot", "plot_columns"]}
    file_values = read_config(args.config) if args.config else {}
    scenario = args.scenario or file_values.get("scenario")
    if not scenario:
        raise ConfigError("scenario: required")
    cfg = resolve_config(scenario, file_values, flags)
    result = RUNNERS[scenario](cfg)
    if isinstance(result, list):
        if cfg["output"]:
            write_series(result, cfg["output"], cfg["format"])
        else:
            _print_series(result, out)
        if cfg["plot"]:
            write_plots(result, cfg["plot"], cfg["plot_columns"])
    else:
        title, rows = result
        out.write(f"# {title}\n")
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            out.write(f"{k:<{width}}  {_fmt(v)}\n")
        if cfg["output"]:
            write_table(rows, cfg["output"])
    return EXIT_OK


def cmd_check(args, out=None) -> int:
    out = out or sys.stdout
    rows = checks.run_suite(args.suite)
    out.write("name\tmeasured\tbound\tresult\n")
    for row in rows:
        out.write(row.line() + "\n")
    failed = sum(not r.passed for r in rows)
    out.write(f"# {len(rows) - failed}/{len(rows)} passed\n")
    return EXIT_CHECK if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "check":
                return cmd_check(args)
            return cmd_run(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Instability, ZeroMass, AliasingDetected, NotNormalizable, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, GridTooNarrow, GridTooCoarse, ResolutionTooFine, EntrodynError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
