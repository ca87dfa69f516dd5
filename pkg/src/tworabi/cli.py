"""Command-line entry point: single-point solves, sweeps, figure data, g estimation.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .detection import (
    PointReport,
    SweepResult,
    estimate_g,
    evaluate_point,
    nb_slope,
    run_sweep,
)
from .errors import InvalidParameters, TwoRabiError
from .exact import TruncationConfig
from .hamiltonian import ModelParams
from .trwa import CONVENTIONS, DEFAULT_TOL, solve_self_consistent

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

FLOAT_FORMAT = ".12g"

# figure id -> (J bound by the figure, columns after g)
FIGURES = {
    "fig2a": (0.05, ["E_exact", "E_trwa", "E_rwa"]),
    "fig2b": (0.2, ["E_exact", "E_trwa", "E_rwa"]),
    "fig3a": (0.05, ["F_T", "F_R"]),
    "fig3b": (0.2, ["F_T", "F_R"]),
    "fig4a": (0.2, ["nb_trwa", "nb_exact"]),
    "fig4b": (0.2, ["slope_trwa", "slope_exact_fd"]),
}
FIGURE_OMEGA, FIGURE_BIG_OMEGA = 1.0, 0.1

SWEEP_COLUMNS = [
    "g", "E_exact", "E_trwa", "E_rwa", "F_T", "F_R", "nb_trwa", "nb_exact", "slope_trwa",
]


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunConfig:
    command: str
    Omega: float | None = None
    omega: float | None = None
    J: float | None = None
    g: float = 0.0
    g_min: float = 0.0
    g_max: float = 1.0
    g_count: int = 101
    n_start: int = 12
    n_cap: int = 96
    tol: float = 1e-10
    out: str | None = None
    format: str = "csv"
    figure: str | None = None
    nb: float | None = None
    delta_nb: float | None = None
    convention: str = "published"
    jobs: int = 1

    def params(self, g: float | None = None, J_default: float = 0.2) -> ModelParams:
        return ModelParams(
            omega=FIGURE_OMEGA if self.omega is None else self.omega,
            Omega=FIGURE_BIG_OMEGA if self.Omega is None else self.Omega,
            g=self.g if g is None else g,
            J=J_default if self.J is None else self.J,
        )

    def truncation(self) -> TruncationConfig:
        return TruncationConfig(n_start=self.n_start, n_cap=self.n_cap, energy_tol=self.tol)

    def grid(self) -> np.ndarray:
        if self.g_count < 2:
            raise InvalidParameters(f"--g-count must be >= 2, got {self.g_count}")
        if not self.g_max > self.g_min:
            raise InvalidParameters("--g-max must exceed --g-min")
        return np.linspace(self.g_min, self.g_max, self.g_count)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        x = 0.0  # no "-0"
    return format(x, FLOAT_FORMAT)


def provenance(cfg: RunConfig, p: ModelParams, extra: dict | None = None) -> dict:
    prov = {
        "command": cfg.command,
        "figure": cfg.figure,
        "Omega": p.Omega,
        "omega": p.omega,
        "J": p.J,
        "g_min": cfg.g_min,
        "g_max": cfg.g_max,
        "g_count": cfg.g_count,
        "n_start": cfg.n_start,
        "n_cap": cfg.n_cap,
        "energy_tol": cfg.tol,
        "trwa_tol": DEFAULT_TOL,
        "convention": cfg.convention,
        "version": _version(),
    }
    prov.update(extra or {})
    return {k: v for k, v in prov.items() if v is not None}


def _prov_value(v) -> str:
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_prov_value(x) for x in v)
    return str(v)


def render_table(prov: dict, columns: list[str], rows: list[list], out_format: str) -> str:
    """CSV (provenance comment, header, rows) or the same content as JSON."""
    if out_format == "json":
        records = [dict(zip(columns, (float(v) for v in row))) for row in rows]
        return json.dumps({"provenance": prov, "columns": columns, "records": records}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={_prov_value(v)}" for k, v in prov.items()) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def figure_table(cfg: RunConfig) -> tuple[dict, list[str], list[list]]:
    if cfg.figure not in FIGURES:
        raise InvalidParameters(f"unknown figure {cfg.figure!r}; choose from {', '.join(FIGURES)}")
    J_bound, columns = FIGURES[cfg.figure]
    p = cfg.params(0.0, J_default=J_bound)
    sweep = run_sweep(p, cfg.grid(), cfg.truncation(), workers=cfg.jobs, convention=cfg.convention)
    data = {name: sweep.column(name) for name in SWEEP_COLUMNS if name != "g"}
    data["g"] = np.asarray(sweep.g_grid)
    if "slope_exact_fd" in columns:
        # the exact curve only exists on the grid: second-order finite differences along it
        data["slope_exact_fd"] = np.gradient(data["nb_exact"], data["g"])
    rows = [[data[c][i] for c in ["g", *columns]] for i in range(len(sweep.g_grid))]
    prov = provenance(cfg, p, {"cutoffs_used": sweep.meta["cutoffs_used"]})
    return prov, ["g", *columns], rows


def sweep_table(cfg: RunConfig) -> tuple[dict, list[str], list[list]]:
    p = cfg.params(0.0)
    sweep: SweepResult = run_sweep(p, cfg.grid(), cfg.truncation(), workers=cfg.jobs, convention=cfg.convention)
    rows = [[getattr(r, c) for c in SWEEP_COLUMNS] for r in sweep.records]
    return provenance(cfg, p, {"cutoffs_used": sweep.meta["cutoffs_used"]}), SWEEP_COLUMNS, rows


def cmd_solve(cfg: RunConfig) -> str:
    p = cfg.params()
    report: PointReport = evaluate_point(p, cfg.truncation(), cfg.convention)
    fields = report.as_dict()
    if cfg.format == "json":
        return json.dumps({"params": provenance(cfg, p, {"g": p.g}), "result": fields}, indent=2) + "\n"
    width = max(map(len, fields))
    return "".join(f"{k:<{width}} = {fmt(v)}\n" for k, v in fields.items())


def cmd_sweep(cfg: RunConfig) -> str:
    return render_table(*sweep_table(cfg), cfg.format)


def cmd_figure(cfg: RunConfig) -> str:
    return render_table(*figure_table(cfg), cfg.format)


def cmd_detect(cfg: RunConfig) -> str:
    if cfg.nb is None:
        raise InvalidParameters("detect needs --nb")
    p = cfg.params(0.0, J_default=0.2)
    g_est = estimate_g(cfg.nb, p, g_max=cfg.g_max, convention=cfg.convention)
    slope = nb_slope(p.with_g(g_est), solve_self_consistent(p.with_g(g_est), convention=cfg.convention))
    if cfg.delta_nb is None or cfg.delta_nb == 0:
        delta_g = None
    else:
        delta_g = abs(cfg.delta_nb / slope) if slope != 0 else float("inf")
    result = {"nb": cfg.nb, "g_estimate": g_est, "slope": slope, "delta_nb": cfg.delta_nb, "delta_g": delta_g}
    if cfg.format == "json":
        return json.dumps({"params": provenance(cfg, p), "result": result}, indent=2) + "\n"
    lines = [
        f"g_estimate = {fmt(g_est)}",
        f"slope      = {fmt(slope)}",
        f"delta_g    = {'n/a' if delta_g is None else fmt(delta_g)}",
    ]
    return "\n".join(lines) + "\n"


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "figure": cmd_figure, "detect": cmd_detect}


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys mirror the flags")
    common.add_argument("--Omega", type=float, help="emitter splitting (default 0.1)")
    common.add_argument("--omega", type=float, help="resonator frequency (default 1)")
    common.add_argument("--J", type=float, help="inter-resonator hopping")
    common.add_argument("--g", type=float, default=0.0, help="emitter-resonator coupling (solve)")
    common.add_argument("--g-min", type=float, default=0.0)
    common.add_argument("--g-max", type=float, default=1.0)
    common.add_argument("--g-count", type=int, default=101)
    common.add_argument("--n-start", type=int, default=12, help="initial Fock cutoff per mode")
    common.add_argument("--n-cap", type=int, default=96, help="largest Fock cutoff per mode")
    common.add_argument("--tol", type=float, default=1e-10, help="ground-energy convergence tolerance")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--figure", choices=sorted(FIGURES))
    common.add_argument("--nb", type=float, help="measured <n_b> (detect)")
    common.add_argument("--delta-nb", type=float, help="uncertainty of --nb (detect)")
    common.add_argument("--convention", choices=sorted(CONVENTIONS), default="published")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")
    if defaults:
        known = {a.dest for a in common._actions}
        unknown = sorted(set(defaults) - known)
        if unknown:
            raise InvalidParameters(f"unknown config keys: {', '.join(unknown)}")
        common.set_defaults(**defaults)

    parser = argparse.ArgumentParser(prog="tworabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="all quantities at a single g")
    sub.add_parser("sweep", parents=[common], help="all quantities along a g grid")
    sub.add_parser("figure", parents=[common], help="data behind one figure panel")
    sub.add_parser("detect", parents=[common], help="estimate g from a measured <n_b>")
    return parser


def load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise InvalidParameters(f"config file {path} must hold a JSON object")
    return {k.lstrip("-").replace("-", "_"): v for k, v in raw.items()}


def parse_config(argv=None) -> RunConfig:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    # config values act as defaults; explicit flags still win
    defaults = load_config_file(known.config) if known.config else None
    values = vars(build_parser(defaults).parse_args(argv))
    values.pop("config", None)
    verbose = values.pop("verbose", False)
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    return RunConfig(**values)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (InvalidParameters, ValueError, OSError) as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = COMMANDS[cfg.command](cfg)
    except InvalidParameters as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TwoRabiError as exc:
        print(f"error [{exc.stage}]: {type(getattr(exc, 'cause', exc)).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG if exc.stage == "config" else EXIT_SOLVER
    except ValueError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        emit(text, cfg.out)
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
