"""Command-line pipeline: corpus generation through noise sweeps and reports.

Commands compose through files only; every output embeds the producing
config and seed so reruns with equal inputs are reproducible.

Exit codes: 0 success, 2 config error, 3 infeasible generation, 4 size cap
exceeded.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .donordb import DonorDatabase, SPEEDUP_REGIMES, build_db, speedup_report, transfer_eval
from .embeddings import EmbeddingConfig, EmbeddingModel, fit_embedding
from .graphs import (
    GenerationError,
    Graph,
    GraphError,
    from_json,
    parity_classes,
    stratified_corpus,
)
from .io import read_corpus, write_corpus, write_csv, read_csv
from .maxcut import SizeCapError, exact_maxcut
from .noise import NoiseModel, sweep_scale
from .qaoa import multistart

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_CAP = 4

TRANSFER_CSV_FIELDS = ["acceptor_id", "donor_id", "distance", "r_avg", "r_native", "regime", "wall_time_s"]
SPEEDUP_CSV_FIELDS = ["graph_id", "regime", "iterations", "transferred", "wall_time_s", "speedup", "ratio"]
NOISE_CSV_FIELDS = ["graph_id", "scale", "e_ideal", "e_noisy", "stderr", "delta_e", "rel_err"]
NOISE_AGG_FIELDS = ["scale", "mean", "median", "q1", "q3", "lo_whisker", "hi_whisker", "n_outliers"]


def _load_graph(path: str) -> Graph:
    return from_json(Path(path).read_text())


@click.group()
@click.version_option(__version__)
def main() -> None:
    """QAOA parameter transferability pipeline for MaxCut."""


@main.command()
@click.option("--n", default=14, show_default=True, help="Nodes per graph.")
@click.option("--max-degree", default=4, show_default=True)
@click.option("--per-class", default=50, show_default=True, help="Graphs per parity class.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def generate(n: int, max_degree: int, per_class: int, seed: int, out: str) -> None:
    """Parity-stratified random graph corpus, equal counts per class."""
    config = {
        "command": "generate", "version": __version__, "n": n,
        "max_degree": max_degree, "per_class": per_class, "seed": seed,
    }
    try:
        graphs = stratified_corpus(n, max_degree, per_class, seed)
    except GraphError as exc:
        click.echo(f"bad generation config: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc
    except GenerationError as exc:
        click.echo(f"generation infeasible: {exc} ({exc.attempts} attempts)", err=True)
        raise click.exceptions.Exit(EXIT_INFEASIBLE) from exc
    write_corpus(graphs, config, out)
    click.echo(f"wrote {len(graphs)} graphs ({len(parity_classes(n))} parity classes) to {out}")


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--cap", default=24, show_default=True)
def solve(graph_path: str, cap: int) -> None:
    """Exact MaxCut for one graph JSON file."""
    try:
        sol = exact_maxcut(_load_graph(graph_path), cap=cap)
    except SizeCapError as exc:
        click.echo(str(exc), err=True)
        raise click.exceptions.Exit(EXIT_CAP) from exc
    except GraphError as exc:
        click.echo(str(exc), err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc
    click.echo(json.dumps({"cstar": sol.value, "assignment": sol.assignment}))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--p", default=3, show_default=True)
@click.option("--starts", default=10, show_default=True)
@click.option("--budget", default=None, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, type=click.Path())
def optimize(graph_path: str, p: int, starts: int, budget: int | None, seed: int, out: str | None) -> None:
    """Multistart QAOA parameter optimization for one graph."""
    g = _load_graph(graph_path)
    records = multistart(g, p, starts, seed=seed, budget=budget)
    payload = {
        "config": {"command": "optimize", "version": __version__, "p": p,
                   "starts": starts, "budget": budget, "seed": seed},
        "records": [r.to_dict() for r in records],
    }
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--p", default=3, show_default=True)
@click.option("--starts", default=10, show_default=True)
@click.option("--method", default="graph2vec", show_default=True,
              type=click.Choice(["graph2vec", "gl2vec", "sf", "feather"]))
@click.option("--dims", default=64, show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--lr", default=0.065, show_default=True)
@click.option("--budget", default=None, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--model-out", default=None, type=click.Path())
def build(corpus: str, p: int, starts: int, method: str, dims: int, epochs: int,
          lr: float, budget: int | None, seed: int, db_path: str, model_out: str | None) -> None:
    """Train the embedding on a corpus and build the donor database (resumable)."""
    graphs, _ = read_corpus(corpus)
    if not graphs:
        raise click.exceptions.Exit(EXIT_CONFIG)
    config = EmbeddingConfig(method=method, dims=dims, epochs=epochs, lr=lr, seed=seed)
    model = fit_embedding(graphs, config)
    try:
        db = build_db(graphs, p, starts, model, seed=seed, budget=budget, checkpoint_path=db_path)
    except SizeCapError as exc:
        click.echo(str(exc), err=True)
        raise click.exceptions.Exit(EXIT_CAP) from exc
    if model_out:
        model.save(model_out)
    click.echo(f"built donor database with {len(db)} entries at {db_path}")


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--acceptors", required=True, type=click.Path(exists=True))
@click.option("--native/--no-native", default=False, help="Also optimize each acceptor natively.")
@click.option("--starts", default=10, show_default=True, help="Starts for the native baseline.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def transfer(db_path: str, model_path: str, acceptors: str, native: bool,
             starts: int, seed: int, out: str) -> None:
    """Nearest- and farthest-donor transfer evaluation per acceptor."""
    db = DonorDatabase.load(db_path)
    model = EmbeddingModel.load(model_path)
    accept_graphs, _ = read_corpus(acceptors)
    rows = []
    for aid, g in enumerate(accept_graphs):
        try:
            cstar = exact_maxcut(g).value
        except SizeCapError as exc:
            click.echo(str(exc), err=True)
            raise click.exceptions.Exit(EXIT_CAP) from exc
        r_native = None
        if native:
            best = multistart(g, db.p, starts, seed=seed + aid)[0]
            r_native = best.energy / cstar
        vec = model.infer(g, seed=seed + aid)
        near_id, near_d = db.nearest(vec, k=1)[0]
        far_id, far_d = db.farthest(vec)
        for regime, donor_id, dist in (("nearest", near_id, near_d), ("farthest", far_id, far_d)):
            res = transfer_eval(g, db.by_id(donor_id), acceptor_id=aid, dist=dist,
                                cstar=cstar, r_native=r_native)
            row = {k: getattr(res, k if k != "wall_time_s" else "wall_time_s", "")
                   for k in ("acceptor_id", "donor_id", "distance", "r_avg", "r_native", "wall_time_s")}
            row["regime"] = regime
            rows.append(row)
    cfg = {"command": "transfer", "version": __version__, "db": str(db_path),
           "method": db.header.get("method"), "seed": seed, "native": native}
    write_csv(out, TRANSFER_CSV_FIELDS, rows, config=cfg)
    click.echo(f"wrote {len(rows)} transfer rows to {out}")


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--acceptors", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def speedup(db_path: str, model_path: str, acceptors: str, seed: int, out: str) -> None:
    """Five-regime speedup table (random inits vs warm start vs pure transfer)."""
    db = DonorDatabase.load(db_path)
    model = EmbeddingModel.load(model_path)
    accept_graphs, _ = read_corpus(acceptors)
    rows = []
    for aid, g in enumerate(accept_graphs):
        for row in speedup_report(g, db, model, graph_id=aid, seed=seed + aid):
            rows.append(vars(row))
    cfg = {"command": "speedup", "version": __version__, "db": str(db_path),
           "seed": seed, "regimes": [r[0] for r in SPEEDUP_REGIMES]}
    write_csv(out, SPEEDUP_CSV_FIELDS, rows, config=cfg)
    click.echo(f"wrote {len(rows)} speedup rows to {out}")


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--acceptors", required=True, type=click.Path(exists=True))
@click.option("--scale", "scales", multiple=True, type=float, default=(0.5, 1.0, 2.0), show_default=True)
@click.option("--traj", default=500, show_default=True)
@click.option("--p1", default=1e-3, show_default=True)
@click.option("--p2", default=1e-2, show_default=True)
@click.option("--p-ro", default=2e-2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Prefix; writes <out>.csv and <out>_agg.csv")
def noise(db_path: str, model_path: str, acceptors: str, scales: tuple[float, ...],
          traj: int, p1: float, p2: float, p_ro: float, seed: int, out: str) -> None:
    """Noise-scale sweep with transferred parameters per acceptor."""
    db = DonorDatabase.load(db_path)
    model = EmbeddingModel.load(model_path)
    accept_graphs, _ = read_corpus(acceptors)
    items = []
    for aid, g in enumerate(accept_graphs):
        vec = model.infer(g, seed=seed + aid)
        donor = db.by_id(db.nearest(vec, k=1)[0][0])
        items.append((aid, g, donor.records[0].params))
    try:
        nm = NoiseModel(p1=p1, p2=p2, p_ro=p_ro)
        rows, aggregates = sweep_scale(items, list(scales), nm, n_traj=traj, seed=seed)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc
    cfg = {"command": "noise", "version": __version__, "scales": list(scales),
           "traj": traj, "p1": p1, "p2": p2, "p_ro": p_ro, "seed": seed}
    write_csv(f"{out}.csv", NOISE_CSV_FIELDS, rows, config=cfg)
    write_csv(f"{out}_agg.csv", NOISE_AGG_FIELDS, aggregates, config=cfg)
    click.echo(f"wrote noise sweep to {out}.csv and {out}_agg.csv")


@main.command()
@click.option("--transfer-csv", default=None, type=click.Path(exists=True))
@click.option("--speedup-csv", default=None, type=click.Path(exists=True))
@click.option("--noise-agg-csv", default=None, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
def report(transfer_csv: str | None, speedup_csv: str | None,
           noise_agg_csv: str | None, out: str) -> None:
    """Aggregate experiment CSVs into a summary JSON plus rendered figures."""
    from . import plotting

    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    summary: dict = {"version": __version__, "inputs": {}}
    if transfer_csv:
        rows = [
            {**r, "acceptor_id": int(r["acceptor_id"]), "r_avg": float(r["r_avg"]),
             "r_native": float(r["r_native"]) if r.get("r_native") else None}
            for r in read_csv(transfer_csv)
        ]
        near = [r["r_avg"] for r in rows if r["regime"] == "nearest"]
        far = [r["r_avg"] for r in rows if r["regime"] == "farthest"]
        wins = sum(1 for a, b in zip(near, far) if a > b)
        summary["transfer"] = {
            "n_acceptors": len(near),
            "mean_nearest_r_avg": float(np.mean(near)) if near else None,
            "mean_farthest_r_avg": float(np.mean(far)) if far else None,
            "nearest_win_fraction": wins / len(near) if near else None,
        }
        summary["inputs"]["transfer_csv"] = str(transfer_csv)
        plotting.transfer_figure(rows, outdir / "transfer.png")
        write_csv(outdir / "transfer_points.csv", TRANSFER_CSV_FIELDS, rows)
    if speedup_csv:
        rows = [
            {**r, "transferred": r["transferred"] == "True", "wall_time_s": float(r["wall_time_s"]),
             "speedup": float(r["speedup"]), "ratio": float(r["ratio"])}
            for r in read_csv(speedup_csv)
        ]
        summary["speedup"] = {
            "max_speedup": max(r["speedup"] for r in rows),
            "regimes": sorted({r["regime"] for r in rows}),
        }
        summary["inputs"]["speedup_csv"] = str(speedup_csv)
        plotting.speedup_figure(rows, outdir / "speedup.png")
    if noise_agg_csv:
        aggs = [{k: float(v) if k != "n_outliers" else int(v) for k, v in r.items()}
                for r in read_csv(noise_agg_csv)]
        summary["noise"] = {"scales": [a["scale"] for a in aggs],
                            "mean_delta_e": [a["mean"] for a in aggs]}
        summary["inputs"]["noise_agg_csv"] = str(noise_agg_csv)
        plotting.noise_figure(aggs, outdir / "noise.png")
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    click.echo(f"report written to {outdir}")


if __name__ == "__main__":
    sys.exit(main())
