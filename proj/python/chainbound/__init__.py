"""Certified lower/upper bounds for supply-chain design MILPs.

The heavy lifting lives in the compiled `_core` module; run results come
back as the same JSON documents the CLI writes, parsed into dicts.
"""

import json as _json

from ._core import (
    Config,
    Instance,
    Problem,
    format_gap,
    formulate_full,
    gap_percent,
    generate,
    read_bundle,
    solve,
    toy_config,
    write_bundle,
)
from . import _core as _c

__all__ = [
    "Config",
    "Instance",
    "Problem",
    "format_gap",
    "formulate_full",
    "gap_percent",
    "generate",
    "lower_bound",
    "read_bundle",
    "run_gsc",
    "solve",
    "toy_config",
    "upper_bound",
    "write_bundle",
]


def _edges(instance, value):
    return instance.num_edges if value == "max" else int(value)


def _partitions(instance, value):
    return instance.num_nodes if value == "max" else int(value)


def lower_bound(instance, edges, draws=1, seed=0, stratified=False, threads=1,
                time_limit=0.0, mip_gap=0.0):
    """Edge-sampled restrictions; the result's best_lb certifies a lower bound."""
    raw = _c.lower_bound_json(instance, _edges(instance, edges), draws, seed, stratified,
                              threads, time_limit, mip_gap)
    return _json.loads(raw)


def upper_bound(instance, partitions, trials=1, seed=0, threads=1,
                time_limit=0.0, mip_gap=0.0):
    """Aggregated relaxations; the result's best_ub certifies an upper bound."""
    raw = _c.upper_bound_json(instance, _partitions(instance, partitions), trials, seed,
                              threads, time_limit, mip_gap)
    return _json.loads(raw)


def run_gsc(instance, levels, seed=0, gap_tol=0.0, stratified=False, threads=1,
            time_limit=0.0, mip_gap=0.0):
    """Full protocol over a schedule of (edges, partitions[, draws]) levels.

    Level entries accept "max" for the edge or partition slot, mirroring the
    CLI grammar.
    """
    triplets = []
    for spec in levels:
        parts = tuple(spec)
        if len(parts) == 2:
            a, c = parts
            w = 1
        elif len(parts) == 3:
            a, c, w = parts
        else:
            raise ValueError(f"level {spec!r} must be (edges, partitions[, draws])")
        triplets.append((_edges(instance, a), _partitions(instance, c), int(w)))
    raw = _c.run_gsc_json(instance, triplets, seed, gap_tol, stratified, threads,
                          time_limit, mip_gap)
    return _json.loads(raw)
