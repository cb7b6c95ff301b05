"""Batch front end: config files, sweep orchestration, CSV/plot emission.

A run is described by a plain-text config (``key = value`` lines, ``#``
comments).  Each task writes into the output directory:

* ``<task>.csv``     comma-separated dataset, 17 significant digits, with
                     the full configuration echoed in ``# config:`` comments
* ``<task>.plt``     a gnuplot script rendering the CSV
* ``<task>_summary.txt``  human-readable run summary

Grids are written either as comma lists (``20,25,30``) or inclusive ranges
``lo:hi:step``.  Unknown keys are rejected with their line number.  Sweep
points fan out over a worker pool (``--workers``, config ``workers`` or the
``HYBRIDQ_WORKERS`` environment variable); failed points are flagged in the
CSV rather than aborting the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import assembly, observables, quartic1d, solver
from .basis import BasisSpec
from .errors import ConfigError, HybridQError
from .model import PhysicalParams, scale

TASKS = ("solve", "stabilize", "sweep-bsl", "sweep-w0", "sweep-B0",
         "quartic-gap", "contour-fit")

# defaults: the paper's working parameter set
_DEFAULTS = {
    "m_ratio": 0.041,
    "eta": 4.0,
    "mu": 0.7,
    "L": 20,
    "N": 20,
    "n_track": 8,
}

_FLOAT_KEYS = ("hw0", "a", "b", "gamma", "B0", "bSLa", "m_ratio",
               "eta", "mu")
_INT_KEYS = ("L", "N", "n_track", "workers")
_GRID_KEYS = ("mu_grid", "eta_grid", "bsl_grid", "hw0_list", "B0_list",
              "a_grid", "targets")
_ALL_KEYS = ("task", "out_dir") + _FLOAT_KEYS + _INT_KEYS + _GRID_KEYS


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one batch run."""

    task: str
    physical: PhysicalParams
    eta: float
    mu: float
    L: int
    N: int
    n_track: int
    workers: int | None = None
    out_dir: str | None = None
    mu_grid: tuple = ()
    eta_grid: tuple = ()
    bsl_grid: tuple = ()
    hw0_list: tuple = ()
    B0_list: tuple = ()
    a_grid: tuple = ()
    targets: tuple = ()

    @property
    def spec(self) -> BasisSpec:
        return BasisSpec(eta=self.eta, mu=self.mu, L=self.L, N=self.N)


@dataclass(frozen=True)
class RunResult:
    status: int
    files: tuple


def _parse_number(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"malformed number {text!r}", line) from None


def _parse_grid(text: str, line: int) -> tuple:
    """A comma list or an inclusive lo:hi:step range."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("range must be lo:hi:step", line)
        lo, hi, step = (_parse_number(p, line) for p in parts)
        if step <= 0 or hi < lo:
            raise ConfigError("range needs hi >= lo and step > 0", line)
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(n))
    return tuple(_parse_number(p, line) for p in text.split(","))


def parse_config_lines(lines) -> RunConfig:
    """Parse config text lines into a validated RunConfig."""
    raw: dict[str, object] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if key in ("task", "out_dir"):
            raw[key] = value
        elif key in _GRID_KEYS:
            raw[key] = _parse_grid(value, lineno)
        elif key in _INT_KEYS:
            num = _parse_number(value, lineno)
            if num != int(num):
                raise ConfigError(f"{key} must be an integer", lineno)
            raw[key] = int(num)
        else:
            raw[key] = _parse_number(value, lineno)
    return _validate_config(raw)


def _validate_config(raw: dict) -> RunConfig:
    task = raw.get("task")
    if task is None:
        raise ConfigError("missing required key 'task'")
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}; expected one of {TASKS}")
    for key in ("hw0", "a"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    try:
        physical = PhysicalParams(
            hw0=raw["hw0"], a=raw["a"], b=raw.get("b"),
            gamma=raw.get("gamma", 0.0), B0=raw.get("B0", 0.0),
            bSLa=raw.get("bSLa", 0.0),
            m_ratio=raw.get("m_ratio", _DEFAULTS["m_ratio"]),
        )
        scale(physical)  # rejects bSLa > 0 with B0 = 0
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    cfg = RunConfig(
        task=task,
        physical=physical,
        eta=raw.get("eta", _DEFAULTS["eta"]),
        mu=raw.get("mu", _DEFAULTS["mu"]),
        L=raw.get("L", _DEFAULTS["L"]),
        N=raw.get("N", _DEFAULTS["N"]),
        n_track=raw.get("n_track", _DEFAULTS["n_track"]),
        workers=raw.get("workers"),
        out_dir=raw.get("out_dir"),
        mu_grid=raw.get("mu_grid", ()),
        eta_grid=raw.get("eta_grid", ()),
        bsl_grid=raw.get("bsl_grid", ()),
        hw0_list=raw.get("hw0_list", ()),
        B0_list=raw.get("B0_list", ()),
        a_grid=raw.get("a_grid", ()),
        targets=raw.get("targets", ()),
    )
    cfg.spec  # validates eta, mu, L, N
    _check_grids(cfg)
    return cfg


def _require_grid(cfg: RunConfig, name: str) -> None:
    grid = getattr(cfg, name)
    if len(grid) == 0:
        raise ConfigError(f"task {cfg.task!r} requires {name}")
    if len(grid) > 1 and any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"{name} must be strictly increasing")


def _check_grids(cfg: RunConfig) -> None:
    needed = {
        "solve": (),
        "stabilize": (),
        "sweep-bsl": ("bsl_grid",),
        "sweep-w0": ("hw0_list", "bsl_grid"),
        "sweep-B0": ("B0_list", "bsl_grid"),
        "quartic-gap": ("hw0_list", "a_grid"),
        "contour-fit": ("hw0_list", "a_grid", "targets"),
    }[cfg.task]
    for name in needed:
        _require_grid(cfg, name)
    if cfg.task == "stabilize":
        if bool(cfg.mu_grid) == bool(cfg.eta_grid):
            raise ConfigError(
                "task 'stabilize' requires exactly one of mu_grid, eta_grid")
        _require_grid(cfg, "mu_grid" if cfg.mu_grid else "eta_grid")
    if cfg.task in ("sweep-bsl", "sweep-w0") and cfg.bsl_grid:
        if max(cfg.bsl_grid) > 0 and cfg.physical.B0 == 0:
            raise ConfigError("bsl_grid reaches bSLa > 0 but B0 = 0")


def load_config(path) -> RunConfig:
    """Load and validate a run configuration file."""
    with open(path, encoding="utf-8") as handle:
        return parse_config_lines(handle)


def _fmt(value) -> str:
    return f"{value:.17g}"


def serialize_config(cfg: RunConfig) -> str:
    """Render a RunConfig back into parseable config text."""
    p = cfg.physical
    lines = [f"task = {cfg.task}"]
    for key, value in (("hw0", p.hw0), ("a", p.a), ("b", p.b),
                       ("gamma", p.gamma), ("B0", p.B0), ("bSLa", p.bSLa),
                       ("m_ratio", p.m_ratio), ("eta", cfg.eta),
                       ("mu", cfg.mu)):
        lines.append(f"{key} = {_fmt(value)}")
    for key in ("L", "N", "n_track"):
        lines.append(f"{key} = {getattr(cfg, key)}")
    if cfg.workers is not None:
        lines.append(f"workers = {cfg.workers}")
    if cfg.out_dir is not None:
        lines.append(f"out_dir = {cfg.out_dir}")
    for key in _GRID_KEYS:
        grid = getattr(cfg, key)
        if grid:
            lines.append(f"{key} = " + ",".join(_fmt(v) for v in grid))
    return "\n".join(lines) + "\n"


def config_from_csv(path) -> RunConfig:
    """Reconstruct the RunConfig echoed in a dataset's comment header."""
    lines = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# config: "):
                lines.append(line[len("# config: "):])
    if not lines:
        raise ConfigError(f"{path} carries no '# config:' echo")
    return parse_config_lines(lines)


# ----------------------------------------------------------------------
# dataset emission
# ----------------------------------------------------------------------

def _write_csv(path: Path, columns, rows, cfg: RunConfig, notes=()) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for note in notes:
            out.write(f"# {note}\n")
        for line in serialize_config(cfg).splitlines():
            out.write(f"# config: {line}\n")
        out.write(",".join(columns) + "\n")
        for row in rows:
            out.write(",".join(
                v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def _plot_script(csv_name: str, png_name: str, xlabel: str, ylabel: str,
                 plot_expr: str, extra=()) -> str:
    lines = [
        f"# gnuplot script; renders {csv_name}",
        "set datafile separator ','",
        "set terminal pngcairo size 960,640",
        f"set output '{png_name}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set key outside",
        *extra,
        f"plot {plot_expr}",
    ]
    return "\n".join(lines) + "\n"


def _resolve_workers(cfg: RunConfig) -> int:
    if cfg.workers is not None:
        return max(1, cfg.workers)
    env = os.environ.get("HYBRIDQ_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"HYBRIDQ_WORKERS={env!r} is not an integer")
    return 1


def _parallel_map(func, items, workers: int):
    if workers > 1 and len(items) > 1:
        with Pool(workers) as pool:
            return pool.map(func, items)
    return [func(item) for item in items]


def _solve_point(args):
    """Worker: one full assemble+solve, returning plain observables."""
    index, physical, spec, n_track = args
    try:
        scaled = scale(physical)
        problem = assembly.assemble(scaled, spec)
        sol = solver.solve(problem, n_track)
        n_obs = min(4, n_track)
        reports = [observables.state_report(sol, j, problem)
                   for j in range(n_obs)]
        return {
            "index": index,
            "energies": sol.energies.tolist(),
            "z": [r.z_mean for r in reports],
            "sx": [r.sx_mean for r in reports],
            "error": None,
        }
    except Exception as exc:
        return {"index": index, "error": f"{type(exc).__name__}: {exc}"}


def _nan_row(n: int) -> list:
    return [float("nan")] * n


def _run_solve(cfg: RunConfig, out: Path, workers: int):
    res = _solve_point((0, cfg.physical, cfg.spec, cfg.n_track))
    if res["error"] is not None:
        raise HybridQError(res["error"])
    hw0 = cfg.physical.hw0
    columns = ["state", "E_hw0", "E_meV", "z_over_a", "sigma_x", "status"]
    rows = []
    for j, energy in enumerate(res["energies"]):
        z = res["z"][j] if j < len(res["z"]) else float("nan")
        sx = res["sx"][j] if j < len(res["sx"]) else float("nan")
        rows.append([float(j), energy, energy * hw0, z, sx, "ok"])
    csv = out / "solve.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["columns: index, energy [hw0], energy [meV], "
                      "<z>/a, <sigma_x>, status"])
    summary = [
        f"lowest {cfg.n_track} states at bSLa = {cfg.physical.bSLa} T",
        f"ground <z>/a = {res['z'][0]:.4f}, <sigma_x> = {res['sx'][0]:.4f}",
    ]
    if cfg.n_track >= 2:
        gap = res["energies"][1] - res["energies"][0]
        summary.insert(
            1, f"qubit gap (E1-E0): {gap:.6e} hw0 = "
               f"{gap * hw0 * 1e3:.4f} ueV")
    plt = _plot_script("solve.csv", "solve.png", "state index", "E / hw0",
                       "'solve.csv' using 1:2 with points pt 7 notitle")
    return [csv], rows, summary, plt


def _run_stabilize(cfg: RunConfig, out: Path, workers: int):
    parameter = "mu" if cfg.mu_grid else "eta"
    grid = cfg.mu_grid or cfg.eta_grid
    scaled = scale(cfg.physical)
    table = solver.stabilize(scaled, cfg.spec, parameter, grid,
                             cfg.n_track, workers=workers)
    columns = [parameter] + [f"E{j}_hw0" for j in range(cfg.n_track)] \
        + ["status"]
    rows = []
    failed = dict(table.failures)
    for i, value in enumerate(table.grid):
        status = "failed" if i in failed else "ok"
        rows.append([float(value), *table.energies[i].tolist(), status])
    csv = out / "stabilize.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=[f"stabilization of the lowest {cfg.n_track} "
                      f"eigenvalues vs {parameter}; energies in hw0 units"])
    summary = [f"stabilization parameter: {parameter}",
               f"window tolerance: {table.tolerance:g}"]
    for plateau in table.plateaus:
        if plateau is None:
            continue
        summary.append(
            f"level {plateau.level}: plateau [{plateau.lo:g}, {plateau.hi:g}]"
            f" ({plateau.n_points} pts, rel variation "
            f"{plateau.rel_variation:.2e})")
    for index, message in table.failures:
        summary.append(f"FAILED {parameter} = {table.grid[index]:g}: "
                       f"{message}")
    plt = _plot_script(
        "stabilize.csv", "stabilize.png", parameter, "E / hw0",
        f"for [i=2:{cfg.n_track + 1}] 'stabilize.csv' "
        "using 1:i with lines lw 1.5 notitle")
    status = 1 if len(table.failures) == len(grid) else 0
    return [csv], rows, summary, plt, status


def _sweep_rows(cfg: RunConfig, points, workers: int, lead_names, lead_vals):
    """Shared fan-out for sweep tasks.  ``points`` are PhysicalParams."""
    hw0_col = "hw0" in lead_names
    tasks = [(i, phys, cfg.spec, cfg.n_track)
             for i, phys in enumerate(points)]
    results = sorted(_parallel_map(_solve_point, tasks, workers),
                     key=lambda r: r["index"])
    rows, n_failed = [], 0
    for res, lead in zip(results, lead_vals):
        hw0 = lead[lead_names.index("hw0")] if hw0_col else cfg.physical.hw0
        if res["error"] is not None:
            n_failed += 1
            rows.append([*lead, *_nan_row(cfg.n_track + 2 + 8),
                         f"failed: {res['error'].replace(',', ';')}"])
            continue
        energies = res["energies"]
        gap = energies[1] - energies[0]
        z = (res["z"] + _nan_row(4))[:4]
        sx = (res["sx"] + _nan_row(4))[:4]
        rows.append([*lead, *energies, gap, gap * hw0 * 1e3,
                     *z, *sx, "ok"])
    return rows, n_failed


def _sweep_columns(cfg: RunConfig, lead_names):
    return ([*lead_names]
            + [f"E{j}_hw0" for j in range(cfg.n_track)]
            + ["gap_hw0", "gap_ueV"]
            + [f"z{j}" for j in range(4)]
            + [f"sx{j}" for j in range(4)]
            + ["status"])


def _run_sweep_bsl(cfg: RunConfig, out: Path, workers: int):
    points = [dataclasses.replace(cfg.physical, bSLa=v)
              for v in cfg.bsl_grid]
    rows, n_failed = _sweep_rows(cfg, points, workers, ["bSLa_T"],
                                 [[v] for v in cfg.bsl_grid])
    columns = _sweep_columns(cfg, ["bSLa_T"])
    csv = out / "sweep-bsl.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["spectrum and lowest-state observables vs bSLa"])
    summary = [f"swept bSLa over {len(points)} points; "
               f"{n_failed} failed"]
    plt = _plot_script(
        "sweep-bsl.csv", "sweep-bsl.png", "b_SL a  [T]", "E / hw0",
        f"for [i=2:{cfg.n_track + 1}] 'sweep-bsl.csv' "
        "using 1:i with lines lw 1.5 notitle")
    status = 1 if n_failed == len(points) else 0
    return [csv], rows, summary, plt, status


def _run_sweep_w0(cfg: RunConfig, out: Path, workers: int):
    points, lead = [], []
    for hw0 in cfg.hw0_list:
        for bsl in cfg.bsl_grid:
            points.append(dataclasses.replace(cfg.physical, hw0=hw0,
                                              bSLa=bsl))
            lead.append([hw0, bsl])
    rows, n_failed = _sweep_rows(cfg, points, workers, ["hw0", "bSLa_T"],
                                 lead)
    columns = _sweep_columns(cfg, ["hw0", "bSLa_T"])
    csv = out / "sweep-w0.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["qubit metrics vs bSLa for several dot energies hw0"])
    summary = [f"swept {len(cfg.hw0_list)} hw0 values x "
               f"{len(cfg.bsl_grid)} bSLa points; {n_failed} failed"]
    gap_col = 2 + cfg.n_track + 1
    sx_col = gap_col + 2 + 4
    plt = _plot_script(
        "sweep-w0.csv", "sweep-w0.png", "b_SL a  [T]", "qubit metrics",
        " , ".join(
            f"'sweep-w0.csv' using 2:($1 == {hw0:g} ? ${gap_col} : NaN) "
            f"with linespoints title 'gap, hw0={hw0:g} meV'"
            for hw0 in cfg.hw0_list),
        extra=["set multiplot layout 2,1",
               "set ylabel 'gap / hw0'"]) \
        + "set ylabel '<sigma_x> ground'\nplot " + " , ".join(
            f"'sweep-w0.csv' using 2:($1 == {hw0:g} ? ${sx_col} : NaN) "
            f"with linespoints title 'hw0={hw0:g} meV'"
            for hw0 in cfg.hw0_list) + "\nunset multiplot\n"
    status = 1 if n_failed == len(points) else 0
    return [csv], rows, summary, plt, status


def _run_sweep_b0(cfg: RunConfig, out: Path, workers: int):
    points, lead = [], []
    for b0 in cfg.B0_list:
        for bsl in cfg.bsl_grid:
            points.append(dataclasses.replace(cfg.physical, B0=b0,
                                              bSLa=bsl))
            lead.append([b0, bsl])
    rows, n_failed = _sweep_rows(cfg, points, workers, ["B0_T", "bSLa_T"],
                                 lead)
    columns = _sweep_columns(cfg, ["B0_T", "bSLa_T"])
    csv = out / "sweep-B0.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["ground-state <sigma_x> vs bSLa for several B0"])
    summary = [f"swept {len(cfg.B0_list)} B0 values x "
               f"{len(cfg.bsl_grid)} bSLa points; {n_failed} failed"]
    sx_col = 2 + cfg.n_track + 2 + 4 + 1
    plt = _plot_script(
        "sweep-B0.csv", "sweep-B0.png", "b_SL a  [T]", "<sigma_x> ground",
        " , ".join(
            f"'sweep-B0.csv' using 2:($1 == {b0:g} ? ${sx_col} : NaN) "
            f"with linespoints title 'B0={b0:g} T'"
            for b0 in cfg.B0_list))
    status = 1 if n_failed == len(points) else 0
    return [csv], rows, summary, plt, status


def _quartic_point(args):
    index, hw0, a, b, gamma, n_basis, m_ratio = args
    try:
        levels = quartic1d.solve_1d(hw0, a, b=b, gamma=gamma,
                                    n_basis=n_basis, n_lowest=2,
                                    m_ratio=m_ratio)
        return index, float(levels[1] - levels[0]), None
    except Exception as exc:
        return index, float("nan"), f"{type(exc).__name__}: {exc}"


def _tabulate_gaps(cfg: RunConfig, workers: int):
    p = cfg.physical
    b_over_a = p.b / p.a
    tasks = []
    for i, hw0 in enumerate(cfg.hw0_list):
        for j, a in enumerate(cfg.a_grid):
            tasks.append((i * len(cfg.a_grid) + j, hw0, a, b_over_a * a,
                          p.gamma, cfg.N, p.m_ratio))
    results = sorted(_parallel_map(_quartic_point, tasks, workers))
    gaps = np.full((len(cfg.hw0_list), len(cfg.a_grid)), np.nan)
    failures = []
    for index, gap, err in results:
        i, j = divmod(index, len(cfg.a_grid))
        gaps[i, j] = gap
        if err is not None:
            failures.append((cfg.hw0_list[i], cfg.a_grid[j], err))
    return gaps, failures


def _run_quartic_gap(cfg: RunConfig, out: Path, workers: int):
    gaps, failures = _tabulate_gaps(cfg, workers)
    surface = quartic1d.GapSurface(
        hw0_values=np.asarray(cfg.hw0_list),
        a_values=np.asarray(cfg.a_grid), gaps=gaps,
        gamma=cfg.physical.gamma, b_over_a=cfg.physical.b / cfg.physical.a,
        regimes=tuple(quartic1d.classify_regimes(cfg.a_grid, row)
                      for row in gaps))
    columns = ["a_nm"] + [f"gap_hw0_{w:g}meV" for w in cfg.hw0_list] \
        + ["status"]
    rows = []
    failed_a = {a for (_, a, _) in failures}
    for j, a in enumerate(cfg.a_grid):
        status = "failed" if a in failed_a else "ok"
        rows.append([float(a), *gaps[:, j].tolist(), status])
    csv = out / "quartic-gap.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["scaled 1D gap (E1-E0)/hw0 vs well half-separation a"])
    summary = []
    names = ("algebraic", "exponential", "floor")
    for i, hw0 in enumerate(cfg.hw0_list):
        reg = surface.regimes[i]
        parts = []
        for name in names:
            span = getattr(reg, name)
            if span is not None:
                parts.append(f"{name} a in [{cfg.a_grid[span[0]]:g}, "
                             f"{cfg.a_grid[span[1]]:g}] nm")
        summary.append(f"hw0 = {hw0:g} meV: " + ("; ".join(parts) or
                                                 "no regime identified"))
    for hw0, a, err in failures:
        summary.append(f"FAILED hw0={hw0:g} a={a:g}: {err}")
    plt = _plot_script(
        "quartic-gap.csv", "quartic-gap.png", "a  [nm]",
        "(E1-E0) / hw0",
        " , ".join(
            f"'quartic-gap.csv' using 1:{i + 2} with lines "
            f"title 'hw0={w:g} meV'" for i, w in enumerate(cfg.hw0_list)),
        extra=["set logscale y"])
    status = 1 if failures and len(failures) == gaps.size else 0
    return [csv], rows, summary, plt, status


def _run_contour_fit(cfg: RunConfig, out: Path, workers: int):
    gaps, failures = _tabulate_gaps(cfg, workers)
    surface = quartic1d.GapSurface(
        hw0_values=np.asarray(cfg.hw0_list),
        a_values=np.asarray(cfg.a_grid), gaps=gaps,
        gamma=cfg.physical.gamma, b_over_a=cfg.physical.b / cfg.physical.a,
        regimes=())
    columns = ["target_gap", "hw0_meV", "a_nm", "status"]
    rows, summary = [], []
    n_ok = 0
    for target in cfg.targets:
        try:
            fit = quartic1d.contour_fit(surface, target)
        except ValueError as exc:
            summary.append(f"target {target:g}: {exc}")
            continue
        n_ok += 1
        for hw0, a in zip(fit.hw0_values, fit.a_values):
            rows.append([float(target), float(hw0), float(a), "ok"])
        for hw0 in fit.skipped_hw0:
            rows.append([float(target), float(hw0), float("nan"),
                         "unreachable"])
        summary.append(
            f"target {target:g}: a = {fit.amplitude:.4f} * hw0^"
            f"{fit.exponent:+.4f} (R^2 = {fit.r_squared:.6f}; "
            f"{len(fit.skipped_hw0)} hw0 column(s) skipped)")
    csv = out / "contour-fit.csv"
    _write_csv(csv, columns, rows, cfg,
               notes=["iso-gap contours a(hw0) extracted from the "
                      "tabulated 1D gap surface"])
    plt = _plot_script(
        "contour-fit.csv", "contour-fit.png", "hw0  [meV]", "a  [nm]",
        " , ".join(
            f"'contour-fit.csv' using ($1 == {t:g} ? $2 : NaN):3 "
            f"with linespoints title 'gap = {t:g}'" for t in cfg.targets),
        extra=["set logscale xy"])
    status = 0 if n_ok else 1
    return [csv], rows, summary, plt, status


_RUNNERS = {
    "solve": _run_solve,
    "stabilize": _run_stabilize,
    "sweep-bsl": _run_sweep_bsl,
    "sweep-w0": _run_sweep_w0,
    "sweep-B0": _run_sweep_b0,
    "quartic-gap": _run_quartic_gap,
    "contour-fit": _run_contour_fit,
}


def run(cfg: RunConfig) -> RunResult:
    """Execute a configured task; emit CSV, plot script and summary."""
    out = Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    workers = _resolve_workers(cfg)

    result = _RUNNERS[cfg.task](cfg, out, workers)
    if len(result) == 4:
        files, _rows, summary, plt_text = result
        status = 0
    else:
        files, _rows, summary, plt_text, status = result

    plt_path = out / f"{cfg.task}.plt"
    plt_path.write_text(plt_text, encoding="utf-8")
    summary_path = out / f"{cfg.task}_summary.txt"
    with open(summary_path, "w", encoding="utf-8") as handle:
        handle.write(f"hybridq run: task {cfg.task}\n")
        handle.write("\nconfiguration:\n")
        for line in serialize_config(cfg).splitlines():
            handle.write(f"  {line}\n")
        handle.write("\nresults:\n")
        for line in summary:
            handle.write(f"  {line}\n")
    files = [*files, plt_path, summary_path]
    return RunResult(status=status, files=tuple(files))


# ----------------------------------------------------------------------
# command line
# ----------------------------------------------------------------------

_SUBCOMMAND_TASKS = {
    "solve": ("solve",),
    "stabilize": ("stabilize",),
    "sweep": ("sweep-bsl", "sweep-w0", "sweep-B0"),
    "quartic": ("quartic-gap",),
    "contour": ("contour-fit",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridq",
        description="Spectral solver and sweep runner for the double-well "
                    "hybrid-qubit dot")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, tasks in _SUBCOMMAND_TASKS.items():
        cmd = sub.add_parser(name, help=f"run a {'/'.join(tasks)} task")
        cmd.add_argument("--config", required=True, help="config file path")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--workers", type=int, default=None,
                         help="worker processes (HYBRIDQ_WORKERS fallback)")
        cmd.add_argument("--track", type=int, default=None,
                         help="number of levels to track")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        allowed = _SUBCOMMAND_TASKS[args.command]
        if cfg.task not in allowed:
            raise ConfigError(
                f"config task {cfg.task!r} does not match subcommand "
                f"{args.command!r} (expected one of {allowed})")
        updates = {}
        if args.out is not None:
            updates["out_dir"] = args.out
        if args.workers is not None:
            updates["workers"] = args.workers
        if args.track is not None:
            updates["n_track"] = args.track
        if updates:
            cfg = dataclasses.replace(cfg, **updates)
        result = run(cfg)
    except (HybridQError, OSError) as exc:
        print(f"hybridq: error: {exc}", file=sys.stderr)
        return 2
    for path in result.files:
        print(path)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
