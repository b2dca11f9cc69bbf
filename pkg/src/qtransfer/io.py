"""File formats shared by the CLI commands: graph corpora and CSV helpers."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .graphs import Graph, from_json, to_json

__all__ = ["write_corpus", "read_corpus", "write_csv", "read_csv"]


def write_corpus(graphs: list[Graph], config: dict[str, Any], path: str | Path) -> None:
    """JSONL: header line with config, then one canonical graph per line."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"kind": "graph-corpus", "config": config}, sort_keys=True) + "\n")
        for g in graphs:
            fh.write(to_json(g) + "\n")


def read_corpus(path: str | Path) -> tuple[list[Graph], dict[str, Any]]:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty corpus file {path}")
    header = json.loads(lines[0])
    if header.get("kind") != "graph-corpus":
        raise ValueError(f"{path} is not a graph corpus file")
    return [from_json(ln) for ln in lines[1:]], header.get("config", {})


def write_csv(path: str | Path, fieldnames: list[str], rows: list[dict], config: dict | None = None) -> None:
    """Comma-delimited with an optional leading '# <config json>' comment line."""
    with open(path, "w") as fh:
        if config is not None:
            fh.write("# " + json.dumps(config, sort_keys=True) + "\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(k, "")) for k in fieldnames) + "\n")


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if v is None:
        return ""
    return str(v)


def read_csv(path: str | Path) -> list[dict[str, str]]:
    import csv

    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
