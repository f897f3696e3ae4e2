"""JSON encoding of the exchange formats: rationals as "p/q" strings, grids as
nested arrays, measures as atom lists, series keyed by "i,j", partitions as
sorted block arrays.  Every document carries the schema marker and output is
deterministic (sorted keys, no floats)."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .cumulants import CumulantTable
from .distributions import (
    AtomicPlanarMeasure,
    GridDistribution,
    WordDistribution,
    as_fraction,
)
from .errors import InvalidInputError
from .partitions import OrderedPartition
from .positivity import PsdVerdict, RationalMatrix
from .series import TruncatedSeries2

SCHEMA = "bimono/1"


def rat(x: Fraction) -> str:
    return str(x)


def envelope(kind: str, body: dict[str, Any]) -> dict[str, Any]:
    doc = {"schema": SCHEMA, "kind": kind}
    doc.update(body)
    return doc


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1)


def check_schema(doc: Any) -> dict[str, Any]:
    if not isinstance(doc, dict):
        raise InvalidInputError("expected a JSON object")
    schema = doc.get("schema")
    if schema not in (None, SCHEMA):
        raise InvalidInputError(f"unsupported schema {schema!r}")
    return doc


def grid_to_json(g: GridDistribution) -> dict[str, Any]:
    return envelope("grid", {"order": g.order, "m": [[rat(x) for x in row] for row in g.m]})


def grid_from_json(doc: dict[str, Any]) -> GridDistribution:
    body = check_schema(doc)
    return GridDistribution.from_rows(body["m"])


def word_dist_to_json(d: WordDistribution) -> dict[str, Any]:
    return envelope(
        "word",
        {
            "max_len": d.max_len,
            "moments": {w: rat(v) for w, v in sorted(d.moments.items())},
        },
    )


def word_dist_from_json(doc: dict[str, Any]) -> WordDistribution:
    body = check_schema(doc)
    return WordDistribution.from_moments(body["moments"], body.get("max_len"))


def distribution_from_json(doc: dict[str, Any]) -> WordDistribution | GridDistribution:
    body = check_schema(doc)
    if "m" in body:
        return grid_from_json(body)
    if "moments" in body:
        return word_dist_from_json(body)
    raise InvalidInputError("document is neither a grid nor a word distribution")


def distribution_to_json(d: WordDistribution | GridDistribution) -> dict[str, Any]:
    if isinstance(d, GridDistribution):
        return grid_to_json(d)
    return word_dist_to_json(d)


def measure_to_json(mu: AtomicPlanarMeasure) -> dict[str, Any]:
    return envelope(
        "measure",
        {"atoms": [{"s": rat(s), "t": rat(t), "w": rat(w)} for s, t, w in mu.atoms]},
    )


def measure_from_json(doc: dict[str, Any]) -> AtomicPlanarMeasure:
    body = check_schema(doc)
    atoms = body["atoms"] if "atoms" in body else body
    return AtomicPlanarMeasure.from_atoms(
        (a["s"], a["t"], a["w"]) for a in atoms
    )


def cumulant_table_to_json(table: CumulantTable) -> dict[str, Any]:
    entries = {p: rat(v) for p, v in table.entries.items()}
    return envelope("cumulants", {"entries": entries})


def cumulant_table_from_json(doc: dict[str, Any]) -> CumulantTable:
    body = check_schema(doc)
    return CumulantTable.from_entries(body["entries"])


def series2_to_json(s: TruncatedSeries2) -> dict[str, Any]:
    cells = {}
    for i, row in enumerate(s.coeffs):
        for j, c in enumerate(row):
            if c != 0:
                cells[f"{i},{j}"] = rat(as_fraction(c))
    return envelope("series", {"nu": s.nu, "nv": s.nv, "cells": cells})


def series_table_text(s: TruncatedSeries2) -> str:
    """Aligned text rendering of a rational bivariate series."""
    cells = [[str(as_fraction(c)) for c in row] for row in s.coeffs]
    width = max(len(x) for row in cells for x in row)
    lines = [" ".join(x.rjust(width) for x in row) for row in cells]
    return "\n".join(lines)


def matrix_to_json(m: RationalMatrix) -> dict[str, Any]:
    body: dict[str, Any] = {"entries": [[rat(x) for x in row] for row in m.entries]}
    if m.labels is not None:
        body["labels"] = [list(p) for p in m.labels]
    return envelope("matrix", body)


def matrix_from_json(doc: dict[str, Any]) -> RationalMatrix:
    body = check_schema(doc)
    return RationalMatrix.from_rows(body["entries"])


def verdict_to_json(v: PsdVerdict) -> dict[str, Any]:
    body: dict[str, Any] = {"is_psd": v.is_psd}
    if v.witness is not None:
        body["witness"] = [rat(x) for x in v.witness]
        body["witness_value"] = rat(v.witness_value)
    if v.diagonal is not None:
        body["diagonal"] = [rat(x) for x in v.diagonal]
    return body


def blocks_to_json(blocks) -> list[list[int]]:
    return [list(b) for b in blocks]


def ordered_partition_to_json(op: OrderedPartition) -> dict[str, Any]:
    return {"blocks": blocks_to_json(op.blocks), "rank": list(op.rank)}
