"""Readers for run-directory artifacts (CSV/JSON only, no engine imports)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class ArtifactError(RuntimeError):
    pass


def read_summaries(run_dir) -> dict:
    """Parse summaries.csv into column arrays; floats are kept exactly as parsed."""
    path = Path(run_dir) / "summaries.csv"
    if not path.exists():
        raise ArtifactError(f"missing {path}")
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    cols = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(cell)
    out = {
        "generation": [int(v) for v in cols["generation"]],
        "sd": [float(v) for v in cols["sd"]],
        "cluster_count": [int(v) for v in cols["cluster_count"]],
        "classification": cols["classification"],
    }
    out["mean"] = [[float(x) for x in v.split(";")] for v in cols["mean"]]
    return out


def read_samples(run_dir, generation: int) -> np.ndarray | None:
    path = Path(run_dir) / f"iter_{generation}" / "samples.csv"
    if not path.exists():
        return None
    return np.loadtxt(path, skiprows=1, ndmin=1)


def read_iterate_summary(run_dir, generation: int) -> dict:
    path = Path(run_dir) / f"iter_{generation}" / "summary.json"
    if not path.exists():
        raise ArtifactError(f"missing {path}")
    with open(path) as fh:
        return json.load(fh)


def read_config(run_dir) -> dict:
    path = Path(run_dir) / "config.json"
    if not path.exists():
        raise ArtifactError(f"missing {path}")
    with open(path) as fh:
        return json.load(fh)


def read_classification_table(path) -> dict:
    """Rows of a k,j,type,p_crit CSV keyed by (j, k)."""
    lines = Path(path).read_text().strip().splitlines()
    out = {}
    for line in lines[1:]:
        k, j, typ, pcrit = line.split(",")
        out[(int(j), int(k))] = {"type": typ, "p_crit": float(pcrit) if pcrit else None}
    return out
