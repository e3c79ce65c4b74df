"""Sparse integer linear scoring systems trained to certified optimality."""

from ._slim import (
    Dataset,
    Lattice,
    ScoringSystem,
    SlimError,
    brute_force,
    cross_validate,
    export_mip,
    generalization_bound,
    load_csv,
    log_cardinality,
    objective,
    parse_lattice,
    parse_model,
    render_tree,
    serialize_model,
    solve,
)

__all__ = [
    "Dataset",
    "Lattice",
    "ScoringSystem",
    "SlimError",
    "brute_force",
    "cross_validate",
    "export_mip",
    "generalization_bound",
    "load_csv",
    "log_cardinality",
    "objective",
    "parse_lattice",
    "parse_model",
    "render_tree",
    "serialize_model",
    "solve",
]
__version__ = "0.1.0"
