"""Grid experiments: generate instances, run covering algorithms, append CSV rows.

An experiment is described by a JSON object::

    {
      "family": "balanced-hard",            # balanced-hard | linear | blowup | steiner | random
      "grid": {"n": [200], "d": [4, 8, 16], "k": [3]},
      "trials": 2,
      "algorithms": ["balanced"],           # balanced | general | exact
      "seed": 1,
      "output": "results.csv",
      "mode": "adaptive",                   # optional
      "t_cap": null                         # optional
    }

Cells are the Cartesian product of the grid in the listed order.  Each
(cell, trial) derives its seed from the master seed, so every row can be
regenerated alone.  Rows are appended as they finish; rerunning the same description
skips rows already present, which makes runs resumable.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import gens
from .bounds import compute_bounds
from .cover import verify_theta_cover
from .errors import InputError, ThetaLabError
from .exact import DEFAULT_LIMITS, SolveLimits, vartheta_exact
from .hypergraph import Hypergraph, max_degree
from .randcover import BalancedConfig, GeneralConfig, balanced_cover, balanced_trials, general_cover, general_trials

log = logging.getLogger(__name__)

FAMILIES = ("balanced-hard", "linear", "blowup", "steiner", "random")
ALGORITHMS = ("balanced", "general", "exact")

COLUMNS = (
    "cell", "trial", "family", "n", "d", "k", "alg", "seed", "instance", "edges",
    "t_achieved", "cert_size", "complete", "uncovered", "bound", "ratio",
    "upper_balanced", "upper_general", "lower_balanced_form", "lower_even_form",
    "steiner_lower_form", "verified", "status",
)


@dataclass
class ExperimentSpec:
    family: str
    grid: dict
    trials: int
    algorithms: list
    seed: int
    output: str
    mode: str = "adaptive"
    t_cap: int | None = None
    limits: SolveLimits = field(default_factory=lambda: DEFAULT_LIMITS)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        for axis in ("n", "d", "k"):
            values = self.grid.get(axis)
            if not values:
                raise InputError(f"grid axis {axis!r} is empty")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if not self.algorithms or bad:
            raise InputError(f"algorithms must be a non-empty subset of {ALGORITHMS}, got {self.algorithms}")
        if self.trials < 1:
            raise InputError("trials must be at least 1")

    @classmethod
    def from_json(cls, text: str, base_dir: str = ".") -> "ExperimentSpec":
        raw = json.loads(text)
        output = raw.get("output", "results.csv")
        if not os.path.isabs(output):
            output = os.path.join(base_dir, output)
        return cls(
            family=raw["family"],
            grid=raw.get("grid", {}),
            trials=int(raw.get("trials", 1)),
            algorithms=list(raw.get("algorithms", [])),
            seed=int(raw.get("seed", 0)),
            output=output,
            mode=raw.get("mode", "adaptive"),
            t_cap=raw.get("t_cap"),
        )

    def cells(self) -> list[tuple[int, int, int]]:
        return list(product(self.grid["n"], self.grid["d"], self.grid["k"]))


def cell_seed(master: int, cell: int, trial: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(cell, trial)).generate_state(1, np.uint32)[0])


def build_instance(family: str, n: int, d: int, k: int, seed: int) -> Hypergraph:
    if family == "balanced-hard":
        n2, _ = gens.round_parameters(n, d, k)
        return gens.gen_balanced_hard(n2, d, k, seed).hypergraph
    if family == "linear":
        return gens.gen_linear_kpartite(n // k, d, k, seed).hypergraph
    if family == "blowup":
        if k % 2:
            raise InputError(f"blowup family needs even k, got {k}")
        ell = k // 2
        F = gens.gen_random_bounded(n // ell, d, 2, seed)
        return gens.gen_blowup_even(F, ell).hypergraph
    if family == "steiner":
        return gens.gen_partial_steiner(n, k, seed)
    if family == "random":
        return gens.gen_random_bounded(n, d, k, seed)
    raise InputError(f"unknown family {family!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _read_done(path: str) -> set[tuple[str, str, str]]:
    if not os.path.exists(path):
        return set()
    with open(path, newline="") as fh:
        return {(r["cell"], r["trial"], r["alg"]) for r in csv.DictReader(fh)}


def run_cell(spec: ExperimentSpec, cell: int, trial: int, n: int, d: int, k: int, alg: str,
             paranoid: bool = False) -> dict:
    seed = cell_seed(spec.seed, cell, trial)
    row = {"cell": cell, "trial": trial, "family": spec.family, "n": n, "d": d, "k": k,
           "alg": alg, "seed": seed, "status": "ok"}
    try:
        G = build_instance(spec.family, n, d, k, seed)
        row.update(n=G.n, instance=G.fingerprint, edges=len(G))
        if G.n > d >= 2:
            b = compute_bounds(G.n, d, k)
            row.update(upper_balanced=b.upper_balanced, upper_general=b.upper_general,
                       lower_balanced_form=b.lower_balanced_form, lower_even_form=b.lower_even_form,
                       steiner_lower_form=b.steiner_lower_form)
        if spec.family == "steiner":
            d_eff = max(max_degree(G, 1), 2 if alg == "balanced" else 3)
        else:
            d_eff = d
        if alg == "exact":
            sol = vartheta_exact(G, spec.limits)
            cert = sol.cover
            row.update(t_achieved=sol.size, cert_size=sol.size, complete=True, uncovered=0)
            if not sol.optimal:
                row["status"] = "ok (optimality unproven)"
        else:
            if alg == "balanced":
                cert = balanced_cover(G, BalancedConfig(d=d_eff, seed=seed, t_cap=spec.t_cap, mode=spec.mode))
                bound = balanced_trials(max(G.n, 2), d_eff, k)
            else:
                cert = general_cover(G, GeneralConfig(d=d_eff, seed=seed, t_cap=spec.t_cap, mode=spec.mode))
                bound = general_trials(max(G.n, 2), d_eff, k)
            row.update(t_achieved=cert.t_achieved, cert_size=cert.t, complete=cert.complete,
                       uncovered=cert.uncovered, bound=bound, ratio=cert.t_achieved / bound)
        if paranoid and row.get("complete"):
            row["verified"] = bool(verify_theta_cover(G, cert))
    except ThetaLabError as exc:
        log.warning("cell %d trial %d alg %s failed: %s", cell, trial, alg, exc)
        row["status"] = f"error: {exc}"
    return row


def run_experiment(spec: ExperimentSpec, paranoid: bool = False) -> str:
    """Run every missing (cell, trial, algorithm) row and append it to ``spec.output``."""
    done = _read_done(spec.output)
    fresh = not os.path.exists(spec.output)
    with open(spec.output, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(COLUMNS)
        for cell, (n, d, k) in enumerate(spec.cells()):
            for trial in range(spec.trials):
                for alg in spec.algorithms:
                    if (str(cell), str(trial), alg) in done:
                        continue
                    if alg == "exact" and n > spec.limits.max_vertices:
                        continue
                    row = run_cell(spec, cell, trial, n, d, k, alg, paranoid)
                    writer.writerow([_fmt(row.get(c)) for c in COLUMNS])
                    fh.flush()
    return spec.output
