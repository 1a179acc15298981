"""Command-line experiments: single solves and the K / H / grid-distribution sweeps.

Every CSV starts with a ``#``-prefixed block holding the JSON manifest of the
run, followed by a header row and the data rows.  The same manifest is also
written to ``manifest.json``; ``nnbvp replay manifest.json`` re-runs it.

Exit codes: 0 success, 2 usage error, 3 numerical divergence.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__, kernels
from .evaluation import e_abs_field
from .problems import Problem, analytic_solution, trial_eval
from .sampling import RANDOM_GENERATOR, GridKind, GridSpec, test_grid
from .trainer import TrainConfig, TrainingDiverged, TrainResult, train

log = logging.getLogger(__name__)

EXIT_DIVERGED = 3

DEFAULT_K_LIST = (8, 16, 24, 30, 40)
DEFAULT_H_LIST = (5, 10, 15, 25, 35, 45)

SOLUTION_COLUMNS = ("x1", "x2", "psi_t", "psi_a", "e_abs")
CONVERGENCE_COLUMNS = ("epoch", "pde_error_train", "e_norm_train", "e_norm_test")
SWEEP_K_COLUMNS = ("K", "m_train", "e_norm_test", "pde_error_train", "e_norm_test_std", "repeats")
SWEEP_H_COLUMNS = ("H", "K", "e_norm_test", "pde_error_train", "e_norm_test_std", "repeats")
SWEEP_GRID_COLUMNS = ("grid", "K", "m_train", "H", "e_norm_test", "pde_error_train",
                      "e_norm_test_std", "repeats")


@dataclass
class ExperimentManifest:
    command: str
    problem: str
    grid: dict
    h_count: int
    train_config: dict
    tool_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    backend: str = kernels.BACKEND
    sweep: dict = field(default_factory=dict)
    repeats: int = 1
    notes: dict = field(default_factory=lambda: {
        "uniform_grids_include_boundary": True,
        "random_generator": RANDOM_GENERATOR,
        "test_grid": "uniform 21x21, boundary included",
    })

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentManifest":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, manifest: ExperimentManifest, columns, rows) -> None:
    text = json.dumps(manifest.to_dict(), indent=2, sort_keys=True)
    with open(path, "w", newline="") as fh:
        for line in text.splitlines():
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Return ``(manifest, header, rows)`` of a file written by :func:`write_csv`."""
    comment, body = [], []
    with open(path, newline="") as fh:
        for line in fh:
            (comment if line.startswith("#") else body).append(line)
    manifest = json.loads("".join(line[2:] if line.startswith("# ") else line[1:]
                                  for line in comment))
    reader = list(csv.reader(body))
    return manifest, reader[0], reader[1:]


def _write_manifest(out_dir: Path, manifest: ExperimentManifest) -> None:
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _final(result: TrainResult):
    return result.history[-1]


def _train_repeats(problem, grid: GridSpec, h: int, config: TrainConfig, repeats: int):
    """Train ``repeats`` times with consecutive seeds; returns mean/std of the final errors."""
    e_norms, pdes = [], []
    for r in range(repeats):
        seed = config.seed + r
        spec = GridSpec(grid.kind, grid.resolution, seed) if grid.kind is GridKind.RANDOM else grid
        cfg = TrainConfig(**{**config.to_dict(), "seed": seed})
        last = _final(train(problem, spec, h, cfg))
        e_norms.append(last.e_norm_test)
        pdes.append(last.pde_error_train)
        log.info("%s %s K=%d H=%d seed=%d: e_norm_test=%.3g",
                 problem.value, spec.kind.value, spec.resolution, h, seed, last.e_norm_test)
    return float(np.mean(e_norms)), float(np.mean(pdes)), float(np.std(e_norms))


def run_solve(manifest: ExperimentManifest, out_dir: Path) -> TrainResult:
    problem = Problem(manifest.problem)
    grid = GridSpec(**manifest.grid)
    config = TrainConfig(**manifest.train_config)
    result = train(problem, grid, manifest.h_count, config)
    tg = test_grid()
    err = e_abs_field(problem, result.params, tg)
    psi_a = analytic_solution(problem, tg.points)
    psi_t = trial_eval(problem, result.params, tg.points)
    rows = [(x[0], x[1], t, a, e) for x, t, a, e in zip(tg.points, psi_t, psi_a, err.e_abs)]
    write_csv(out_dir / "solution.csv", manifest, SOLUTION_COLUMNS, rows)
    conv = [(h.epoch, h.pde_error_train, h.e_norm_train, h.e_norm_test) for h in result.history]
    write_csv(out_dir / "convergence.csv", manifest, CONVERGENCE_COLUMNS, conv)
    _write_manifest(out_dir, manifest)
    return result


def run_sweep_k(manifest: ExperimentManifest, out_dir: Path) -> list[tuple]:
    problem = Problem(manifest.problem)
    config = TrainConfig(**manifest.train_config)
    kind = GridKind(manifest.grid["kind"])
    rows = []
    for k in manifest.sweep["k_list"]:
        grid = GridSpec(kind, k, manifest.grid.get("seed", config.seed))
        e, pde, std = _train_repeats(problem, grid, manifest.h_count, config, manifest.repeats)
        rows.append((k, grid.size, e, pde, std, manifest.repeats))
    write_csv(out_dir / "sweep_k.csv", manifest, SWEEP_K_COLUMNS, rows)
    _write_manifest(out_dir, manifest)
    return rows


def run_sweep_h(manifest: ExperimentManifest, out_dir: Path) -> list[tuple]:
    problem = Problem(manifest.problem)
    config = TrainConfig(**manifest.train_config)
    grid = GridSpec(**manifest.grid)
    rows = []
    for h in manifest.sweep["h_list"]:
        e, pde, std = _train_repeats(problem, grid, h, config, manifest.repeats)
        rows.append((h, grid.resolution, e, pde, std, manifest.repeats))
    write_csv(out_dir / "sweep_h.csv", manifest, SWEEP_H_COLUMNS, rows)
    _write_manifest(out_dir, manifest)
    return rows


def run_sweep_grid(manifest: ExperimentManifest, out_dir: Path) -> list[tuple]:
    problem = Problem(manifest.problem)
    config = TrainConfig(**manifest.train_config)
    k = manifest.grid["resolution"]
    rows = []
    for kind in manifest.sweep["grid_kinds"]:
        grid = GridSpec(kind, k, manifest.grid.get("seed", config.seed))
        e, pde, std = _train_repeats(problem, grid, manifest.h_count, config, manifest.repeats)
        rows.append((grid.kind.value, k, grid.size, manifest.h_count, e, pde, std, manifest.repeats))
    write_csv(out_dir / "sweep_grid.csv", manifest, SWEEP_GRID_COLUMNS, rows)
    _write_manifest(out_dir, manifest)
    return rows


RUNNERS = {
    "solve": run_solve,
    "sweep-k": run_sweep_k,
    "sweep-h": run_sweep_h,
    "sweep-grid": run_sweep_grid,
}


def execute(manifest: ExperimentManifest, out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        RUNNERS[manifest.command](manifest, out_dir)
    except TrainingDiverged as exc:
        click.echo(f"error: training diverged: {exc}", err=True)
        sys.exit(EXIT_DIVERGED)
    click.echo(f"wrote {manifest.command} results to {out_dir}")


_defaults = TrainConfig()


def train_options(f):
    opts = [
        click.option("--epochs", type=click.IntRange(min=0), default=_defaults.epochs, show_default=True),
        click.option("--lr0", type=click.FloatRange(min=0, min_open=True), default=_defaults.lr0,
                     show_default=True, help="Initial learning rate."),
        click.option("--anneal", type=click.FloatRange(0, 1, min_open=True), default=_defaults.anneal,
                     show_default=True, help="Per-epoch learning-rate decay factor."),
        click.option("--l2", type=click.FloatRange(min=0), default=_defaults.l2, show_default=True,
                     help="L2 penalty on weights."),
        click.option("--batch-size", type=click.IntRange(min=1), default=_defaults.batch_size,
                     show_default=True),
        click.option("--seed", type=int, default=_defaults.seed, show_default=True,
                     help="Seed for initialization, shuffling and random grids."),
        click.option("--eval-every", type=click.IntRange(min=1), default=_defaults.eval_every,
                     show_default=True),
        click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
                     default=Path("results"), show_default=True),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


problem_option = click.option(
    "--problem", type=click.Choice([p.value for p in Problem]), default=Problem.LAPLACE_DIRICHLET.value,
    show_default=True)
grid_option = click.option(
    "--grid", "grid_kind", type=click.Choice([g.value for g in GridKind]), default="uniform",
    show_default=True)
repeats_option = click.option(
    "--repeats", type=click.IntRange(min=1), default=1, show_default=True,
    help="Average each row over this many consecutive seeds.")


def _config(epochs, lr0, anneal, l2, batch_size, seed, eval_every) -> TrainConfig:
    return TrainConfig(epochs=epochs, lr0=lr0, anneal=anneal, l2=l2, batch_size=batch_size,
                       seed=seed, eval_every=eval_every)


@click.group()
@click.version_option(__version__, prog_name="nnbvp")
@click.option("-v", "--verbose", is_flag=True, help="Log every training run.")
def main(verbose):
    """Neural-network trial-solution solver for BVPs on the unit square."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@problem_option
@grid_option
@click.option("--k", type=click.IntRange(min=2), default=16, show_default=True,
              help="Training grid resolution (K*K points).")
@click.option("--h", type=click.IntRange(min=1), default=15, show_default=True, help="Hidden nodes.")
@train_options
def solve(problem, grid_kind, k, h, out_dir, **train_kw):
    """Train one network; write solution.csv, convergence.csv and manifest.json."""
    config = _config(**train_kw)
    manifest = ExperimentManifest("solve", problem, GridSpec(grid_kind, k, config.seed).to_dict(),
                                  h, config.to_dict())
    execute(manifest, out_dir)


@main.command("sweep-k")
@problem_option
@grid_option
@click.option("--k", "k_list", type=click.IntRange(min=2), multiple=True,
              help=f"Grid resolutions to sweep (repeatable). Default: {DEFAULT_K_LIST}.")
@click.option("--h", type=click.IntRange(min=1), default=15, show_default=True)
@repeats_option
@train_options
def sweep_k(problem, grid_kind, k_list, h, repeats, out_dir, **train_kw):
    """Final errors against training grid resolution K."""
    config = _config(**train_kw)
    k_list = list(k_list or DEFAULT_K_LIST)
    manifest = ExperimentManifest("sweep-k", problem,
                                  {"kind": grid_kind, "resolution": None, "seed": config.seed},
                                  h, config.to_dict(), sweep={"k_list": k_list}, repeats=repeats)
    execute(manifest, out_dir)


@main.command("sweep-h")
@problem_option
@grid_option
@click.option("--k", type=click.IntRange(min=2), default=16, show_default=True)
@click.option("--h", "h_list", type=click.IntRange(min=1), multiple=True,
              help=f"Hidden-node counts to sweep (repeatable). Default: {DEFAULT_H_LIST}.")
@repeats_option
@train_options
def sweep_h(problem, grid_kind, k, h_list, repeats, out_dir, **train_kw):
    """Final errors against the number of hidden nodes H."""
    config = _config(**train_kw)
    h_list = list(h_list or DEFAULT_H_LIST)
    manifest = ExperimentManifest("sweep-h", problem, GridSpec(grid_kind, k, config.seed).to_dict(),
                                  None, config.to_dict(), sweep={"h_list": h_list}, repeats=repeats)
    execute(manifest, out_dir)


@main.command("sweep-grid")
@problem_option
@click.option("--k", type=click.IntRange(min=2), default=16, show_default=True)
@click.option("--h", type=click.IntRange(min=1), default=15, show_default=True)
@repeats_option
@train_options
def sweep_grid(problem, k, h, repeats, out_dir, **train_kw):
    """Final errors for the four training point distributions at m_train = K*K."""
    config = _config(**train_kw)
    manifest = ExperimentManifest("sweep-grid", problem,
                                  {"kind": None, "resolution": k, "seed": config.seed},
                                  h, config.to_dict(),
                                  sweep={"grid_kinds": [g.value for g in GridKind]}, repeats=repeats)
    execute(manifest, out_dir)


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), required=True)
def replay(manifest_path, out_dir):
    """Re-run the experiment recorded in a manifest.json."""
    with open(manifest_path) as fh:
        data = json.load(fh)
    if data.get("command") not in RUNNERS:
        raise click.UsageError(f"manifest has unknown command {data.get('command')!r}")
    manifest = ExperimentManifest.from_dict(data)
    if manifest.backend != kernels.BACKEND:
        click.echo(f"warning: manifest was produced with the {manifest.backend} backend, "
                   f"replaying with {kernels.BACKEND}; rows may differ in the last bits", err=True)
        manifest.backend = kernels.BACKEND
    manifest.timestamp = ExperimentManifest.__dataclass_fields__["timestamp"].default_factory()
    execute(manifest, out_dir)


if __name__ == "__main__":
    main()
