"""Experiment runner: mesh-refinement studies with optional extrapolation.

Writes three kinds of artifacts into the output directory:

* convergence.csv: one row per (mesh, species) with the fixed column schema
  problem,scheme,re_mode,Mx,My,N,species,error,ratio,order,newton_avg,
  krylov_avg,wall_ms
* fields_*.txt: final-layer field dumps (x,y,value per node, boundary
  nodes included), one block per species
* run_metadata.txt: every knob of the run plus the git revision

For the manufactured problem the error column is the final-layer max-norm
against the exact solution; for the air-pollution problem it is the relative
deviation of the probe-node value from the run on the finest mesh in the
list (whose own error cell is left empty).

Configuration comes from a flat key=value file and/or command-line flags;
flags override file values.  Numbers are serialized with 17 significant
digits so reruns diff exactly.
"""

from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import analysis, model, richardson
from .grid import Grid2D, TimeGrid, build_grid, build_time_grid, lex_index
from .stepper import SolverFailure, average_counts, build_scheme, integrate

CSV_COLUMNS = ("problem", "scheme", "re_mode", "Mx", "My", "N", "species",
               "error", "ratio", "order", "newton_avg", "krylov_avg", "wall_ms")

PROBLEMS = ("manufactured", "airpollution")
RE_MODES = ("none", "space", "spacetime")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


@dataclass
class RunConfig:
    problem: str = "manufactured"
    scheme: str = "cds"
    theta: float = 0.5
    meshes: List[Tuple[int, int, int]] = field(default_factory=list)
    re_mode: str = "none"
    mu_mode: Union[str, float] = "standard"
    cos_theta: float = 1.0
    chemistry: str = "as-printed"
    probe: Union[str, Tuple[int, int]] = "center"
    newton_tol: float = 1e-11
    krylov_tol: float = 1e-10
    ell: int = 2
    out_dir: str = "runs"
    deterministic: bool = True
    cfds_variant: str = "derived"


def mu_value(cfg: RunConfig) -> float:
    if cfg.mu_mode == "standard":
        return model.MU_STANDARD
    if cfg.mu_mode == "fast":
        return model.MU_FAST
    try:
        return float(cfg.mu_mode)
    except (TypeError, ValueError):
        raise ConfigError(f"mu: expected 'standard', 'fast' or a number, "
                          f"got {cfg.mu_mode!r}")


def validate_config(cfg: RunConfig) -> None:
    if cfg.problem not in PROBLEMS:
        raise ConfigError(f"problem: must be one of {PROBLEMS}, got {cfg.problem!r}")
    if cfg.scheme not in ("cds", "cfds"):
        raise ConfigError(f"scheme: must be cds or cfds, got {cfg.scheme!r}")
    if not 0.0 <= cfg.theta <= 1.0:
        raise ConfigError(f"theta: must be in [0, 1], got {cfg.theta}")
    if not cfg.meshes:
        raise ConfigError("mesh: at least one MxxMyxN triple is required")
    for m in cfg.meshes:
        if len(m) != 3 or any(int(v) != v or v < 2 for v in m[:2]) or m[2] < 1:
            raise ConfigError(f"mesh: invalid triple {m}")
    if cfg.re_mode not in RE_MODES:
        raise ConfigError(f"re: must be one of {RE_MODES}, got {cfg.re_mode!r}")
    if cfg.cos_theta <= 0:
        raise ConfigError(f"cos-theta: must be positive, got {cfg.cos_theta}")
    if cfg.chemistry not in ("as-printed", "corrected"):
        raise ConfigError(f"chemistry: must be as-printed or corrected, "
                          f"got {cfg.chemistry!r}")
    mu_value(cfg)
    if cfg.problem == "airpollution":
        for Mx, My, _ in cfg.meshes:
            probe_node(cfg, Mx, My)  # raises if the probe misses a node


def probe_node(cfg: RunConfig, Mx: int, My: int) -> Tuple[int, int]:
    """Probe (i, j) on an Mx x My mesh; center and X/6 need divisibility."""
    if cfg.probe == "center":
        if Mx % 2 or My % 2:
            raise ConfigError(f"probe: center needs even Mx, My, got {Mx}x{My}")
        return Mx // 2, My // 2
    if cfg.probe == "sixth":
        if Mx % 6 or My % 6:
            raise ConfigError(f"probe: sixth needs Mx, My divisible by 6, "
                              f"got {Mx}x{My}")
        return Mx // 6, My // 6
    i, j = cfg.probe
    if not (1 <= i <= Mx - 1 and 1 <= j <= My - 1):
        raise ConfigError(f"probe: node ({i},{j}) not interior to {Mx}x{My}")
    return i, j


def build_problem(cfg: RunConfig) -> model.ProblemSpec:
    if cfg.problem == "manufactured":
        return model.make_example1(cos_theta=cfg.cos_theta,
                                   chemistry=cfg.chemistry)
    return model.make_example2(cos_theta=cfg.cos_theta, mu=mu_value(cfg),
                               chemistry=cfg.chemistry)


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return format(x, ".17g")
    return str(x)


def _solve(cfg, problem, Mx: int, My: int, N: int):
    grid = build_grid(problem.X, problem.Y, Mx, My)
    tg = build_time_grid(problem.T, N)
    scheme = build_scheme(problem, grid, cfg.scheme, variant=cfg.cfds_variant)
    t0 = time.perf_counter()
    W, reports = integrate(problem, grid, tg, scheme, theta=cfg.theta,
                           newton_tol=cfg.newton_tol, krylov_tol=cfg.krylov_tol,
                           ell=cfg.ell)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return W, grid, tg, reports, wall_ms


def run_one_mesh(cfg: RunConfig, problem, Mx: int, My: int, N: int):
    """Solve one mesh entry, including any extrapolation companions.

    Returns (field on the Mx x My grid, grid, time grid, reports, wall_ms);
    the field is the extrapolated one when re_mode is not "none".
    """
    sigma_space = 2 if cfg.scheme == "cds" else 4
    W, grid, tg, reports, wall = _solve(cfg, problem, Mx, My, N)
    if cfg.re_mode == "none":
        return W, grid, tg, reports, wall
    W2, grid2, tg2, reports2, wall2 = _solve(cfg, problem, 2 * Mx, 2 * My, N)
    if cfg.re_mode == "space":
        Wx = richardson.extrapolate_space(W, W2, grid, grid2, sigma_space)
        return Wx, grid, tg, reports + reports2, wall + wall2
    Wt, _, tgt, reports3, wall3 = _solve(cfg, problem, Mx, My, 2 * N)
    W2t, _, _, reports4, wall4 = _solve(cfg, problem, 2 * Mx, 2 * My, 2 * N)
    Wx = richardson.extrapolate_spacetime(W, Wt, W2, W2t, grid, grid2, tg, tgt,
                                          sigma_space, 2)
    return (Wx, grid, tg, reports + reports2 + reports3 + reports4,
            wall + wall2 + wall3 + wall4)


def run_study(cfg: RunConfig) -> str:
    """Execute the configured mesh study; returns the output directory."""
    validate_config(cfg)
    problem = build_problem(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)

    results = []
    for (Mx, My, N) in cfg.meshes:
        try:
            W, grid, tg, reports, wall = run_one_mesh(cfg, problem, Mx, My, N)
        except SolverFailure as exc:
            raise SolverFailure(
                f"mesh {Mx}x{My}x{N}: {exc}", step=exc.step) from exc
        results.append((Mx, My, N, W, grid, tg, reports, wall))
        dump = os.path.join(
            cfg.out_dir,
            f"fields_{cfg.problem}_{cfg.scheme}_{cfg.re_mode}_{Mx}x{My}x{N}.txt")
        emit_field_dump(W, grid, tg.T, dump, boundary=problem.boundary)

    L = problem.L
    errors = np.full((len(results), L), math.nan)
    if cfg.problem == "manufactured":
        def exact(l, x, y, t):
            return model.manufactured_solution(x, y, t, problem.X, problem.Y,
                                               problem.T)
        for r, (Mx, My, N, W, grid, tg, *_rest) in enumerate(results):
            errors[r] = analysis.max_norm_error(W, exact, grid, tg.T)
    else:
        ref_vals = None
        finest = max(range(len(results)), key=lambda r: results[r][0])
        Mx, My = results[finest][0], results[finest][1]
        i, j = probe_node(cfg, Mx, My)
        ref_vals = results[finest][3][:, lex_index(i, j, Mx)]
        for r, (Mx, My, N, W, grid, *_rest) in enumerate(results):
            if r == finest:
                continue
            i, j = probe_node(cfg, Mx, My)
            vals = W[:, lex_index(i, j, Mx)]
            errors[r] = np.abs(vals - ref_vals) / np.abs(ref_vals)

    rows = []
    for l in range(L):
        prev = None
        for r, (Mx, My, N, W, grid, tg, reports, wall) in enumerate(results):
            err = errors[r, l]
            ratio = order = math.nan
            if prev is not None and math.isfinite(err) and math.isfinite(prev[1]):
                ratio = prev[1] / err if err != 0 else math.inf
                if prev[1] > 0 and err > 0:
                    order = math.log(prev[1] / err) / math.log(Mx / prev[0])
            newton_avg, krylov_avg = average_counts(reports)
            rows.append((cfg.problem, cfg.scheme, cfg.re_mode, Mx, My, N, l,
                         err, ratio, order, newton_avg, krylov_avg, wall))
            if math.isfinite(err):
                prev = (Mx, err)

    csv_path = os.path.join(cfg.out_dir, "convergence.csv")
    with open(csv_path, "w") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")

    write_metadata(cfg, os.path.join(cfg.out_dir, "run_metadata.txt"))
    return cfg.out_dir


def emit_field_dump(u: np.ndarray, grid: Grid2D, t: float, path: str,
                    boundary=None) -> None:
    """Text dump of a field: per species, rows "x,y,value" over all nodes.

    Rows are emitted row-major in y (all x for y=0, then y=hy, ...) and
    include boundary nodes; their values come from the boundary callable
    (zero if none is given).  Values carry 17 significant digits so a parsed
    dump reproduces the field exactly.
    """
    L = u.shape[0]
    xs, ys = grid.x_nodes(), grid.y_nodes()
    tmp_fd, tmp_path = tempfile.mkstemp(dir=os.path.dirname(path) or ".",
                                        suffix=".part")
    try:
        with os.fdopen(tmp_fd, "w") as f:
            for l in range(L):
                full = np.zeros((grid.My + 1, grid.Mx + 1))
                full[1:-1, 1:-1] = u[l].reshape(grid.ny, grid.nx)
                if boundary is not None:
                    full[0, :] = boundary(l, xs, np.zeros_like(xs), t)
                    full[-1, :] = boundary(l, xs, np.full_like(xs, grid.Y), t)
                    full[1:-1, 0] = boundary(l, np.zeros_like(ys[1:-1]),
                                             ys[1:-1], t)
                    full[1:-1, -1] = boundary(l, np.full_like(ys[1:-1], grid.X),
                                              ys[1:-1], t)
                f.write(f"# species {l} t {_fmt(float(t))}\n")
                f.write("x,y,value\n")
                for j in range(grid.My + 1):
                    for i in range(grid.Mx + 1):
                        f.write(f"{_fmt(xs[i])},{_fmt(ys[j])},"
                                f"{_fmt(full[j, i])}\n")
        os.replace(tmp_path, path)
    except OSError:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def read_field_dump(path: str):
    """Parse a field dump back into {species: (x, y, value) arrays}."""
    out = {}
    cur = None
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line.startswith("# species"):
                cur = int(line.split()[2])
                out[cur] = []
            elif not line or line.startswith("x,y,value"):
                continue
            else:
                out[cur].append(tuple(float(v) for v in line.split(",")))
    return {l: np.asarray(rows) for l, rows in out.items()}


def git_revision() -> str:
    try:
        return subprocess.run(["git", "rev-parse", "HEAD"],
                              capture_output=True, text=True, check=True,
                              cwd=os.path.dirname(os.path.abspath(__file__))
                              ).stdout.strip()
    except (OSError, subprocess.CalledProcessError):
        return "unknown"


def write_metadata(cfg: RunConfig, path: str) -> None:
    with open(path, "w") as f:
        f.write(f"problem={cfg.problem}\n")
        f.write(f"scheme={cfg.scheme}\n")
        f.write(f"theta={_fmt(cfg.theta)}\n")
        f.write("mesh=" + " ".join(f"{a}x{b}x{c}" for a, b, c in cfg.meshes) + "\n")
        f.write(f"re={cfg.re_mode}\n")
        f.write(f"mu={cfg.mu_mode}\n")
        f.write(f"mu_value={_fmt(mu_value(cfg))}\n")
        f.write(f"cos_theta={_fmt(cfg.cos_theta)}\n")
        f.write(f"chemistry={cfg.chemistry}\n")
        f.write(f"probe={cfg.probe}\n")
        f.write(f"newton_tol={_fmt(cfg.newton_tol)}\n")
        f.write(f"krylov_tol={_fmt(cfg.krylov_tol)}\n")
        f.write(f"ell={cfg.ell}\n")
        f.write(f"cfds_variant={cfg.cfds_variant}\n")
        f.write(f"deterministic={int(cfg.deterministic)}\n")
        f.write(f"git_revision={git_revision()}\n")


def parse_mesh(text: str) -> Tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise ConfigError(f"mesh: expected MxxMyxN, got {text!r}")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ConfigError(f"mesh: expected integers in {text!r}")


def parse_probe(text: str):
    if text in ("center", "sixth"):
        return text
    try:
        i, j = (int(v) for v in text.split(","))
        return (i, j)
    except ValueError:
        raise ConfigError(f"probe: expected center, sixth or i,j; got {text!r}")


def load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = (s.strip() for s in line.split("=", 1))
                values[key] = val
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}")
    return values


def config_from_sources(file_values: dict, args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    str_fields = {"problem": "problem", "scheme": "scheme", "re": "re_mode",
                  "chemistry": "chemistry", "out": "out_dir",
                  "cfds-variant": "cfds_variant"}
    for key, attr in str_fields.items():
        if key in file_values:
            setattr(cfg, attr, file_values[key])
    for key, attr, conv in (("theta", "theta", float),
                            ("cos_theta", "cos_theta", float),
                            ("newton_tol", "newton_tol", float),
                            ("krylov_tol", "krylov_tol", float),
                            ("ell", "ell", int)):
        if key in file_values:
            try:
                setattr(cfg, attr, conv(file_values[key]))
            except ValueError:
                raise ConfigError(f"{key}: bad value {file_values[key]!r}")
    if "mu" in file_values:
        cfg.mu_mode = file_values["mu"]
    if "probe" in file_values:
        cfg.probe = parse_probe(file_values["probe"])
    if "mesh" in file_values:
        cfg.meshes = [parse_mesh(t) for t in
                      file_values["mesh"].replace(",", " ").split()]
    if "deterministic" in file_values:
        cfg.deterministic = file_values["deterministic"].lower() in ("1", "true", "yes")

    if args.problem is not None:
        cfg.problem = args.problem
    if args.scheme is not None:
        cfg.scheme = args.scheme
    if args.theta is not None:
        cfg.theta = args.theta
    if args.mesh:
        cfg.meshes = [parse_mesh(t) for t in args.mesh]
    if args.re is not None:
        cfg.re_mode = args.re
    if args.mu is not None:
        cfg.mu_mode = args.mu
    if args.cos_theta is not None:
        cfg.cos_theta = args.cos_theta
    if args.chemistry is not None:
        cfg.chemistry = args.chemistry
    if args.probe is not None:
        cfg.probe = parse_probe(args.probe)
    if args.out is not None:
        cfg.out_dir = args.out
    if args.deterministic:
        cfg.deterministic = True
    if args.cfds_variant is not None:
        cfg.cfds_variant = args.cfds_variant
    return cfg


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="parabolic2d",
        description="Mesh-refinement studies for 2D semilinear parabolic "
                    "systems (central and compact schemes, optional "
                    "Richardson extrapolation).")
    p.add_argument("--problem", choices=PROBLEMS)
    p.add_argument("--scheme", choices=("cds", "cfds"))
    p.add_argument("--theta", type=float)
    p.add_argument("--mesh", action="append", metavar="MxxMyxN",
                   help="mesh triple, e.g. 16x16x64 (repeatable)")
    p.add_argument("--re", choices=RE_MODES, help="Richardson extrapolation mode")
    p.add_argument("--mu", help="wind rate: standard, fast, or a number")
    p.add_argument("--cos-theta", dest="cos_theta", type=float,
                   help="cosine of the solar zenith angle")
    p.add_argument("--chemistry", choices=("as-printed", "corrected"))
    p.add_argument("--probe", help="center, sixth, or i,j node indices")
    p.add_argument("--out", help="output directory")
    p.add_argument("--deterministic", action="store_true",
                   help="fixed-order reductions (always on; recorded in metadata)")
    p.add_argument("--cfds-variant", dest="cfds_variant",
                   choices=("derived", "as-printed"))
    p.add_argument("--config", help="flat key=value config file")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = config_from_sources(file_values, args)
        out = run_study(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    print(f"study complete; artifacts in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
