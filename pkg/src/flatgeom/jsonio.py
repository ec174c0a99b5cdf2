"""Canonical JSON encoding of matroids, structures, scenarios and results.

All emitted JSON uses sorted keys and compact separators so identical
inputs produce byte-identical outputs.  Loaders raise InputError with a
line/column diagnostic on malformed documents.
"""

from __future__ import annotations

import json
from typing import Any

from .effective import (
    Delta2Schedule,
    FlipEvent,
    Relation,
    RelationalStructure,
    Sigma1Schedule,
    StagewisePresentation,
)
from .errors import InputError
from .formula_closure import EnumeratedStructure, GeometricStructure, fiber_key
from .matroid import (
    ClosureTableOracle,
    GroundSet,
    LinearOracle,
    Matroid,
    UniformOracle,
    linear_matroid,
    uniform_matroid,
)

SCHEMA_VERSION = 1


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str, what: str = "input") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {what}: {e.msg} at line {e.lineno} column {e.colno}"
        ) from None


def load_file(path: str) -> Any:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    return loads(text, path)


# -- matroids ----------------------------------------------------------------


def matroid_to_json(m: Matroid) -> dict:
    oracle = m.oracle
    if isinstance(oracle, LinearOracle):
        out: dict[str, Any] = {
            "type": "linear",
            "field": oracle.field,
            "columns": [list(c) for c in oracle.columns],
        }
        if m.ground.labels:
            out["labels"] = [
                m.ground.labels.get(e, str(e)) for e in m.ground.elements
            ]
        return out
    if isinstance(oracle, UniformOracle):
        return {
            "type": "uniform",
            "rank": oracle.rank_bound,
            "size": len(m.ground),
        }
    return {
        "type": "closure-table",
        "ground": len(m.ground),
        "closure": [
            {"set": sorted(k), "cl": sorted(v)}
            for k, v in sorted(
                oracle.table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
            )
        ],
    }


def matroid_from_json(doc: Any) -> Matroid:
    if not isinstance(doc, dict) or "type" not in doc:
        raise InputError("matroid document must be an object with a 'type'")
    kind = doc["type"]
    try:
        if kind == "linear":
            labels = None
            if "labels" in doc:
                labels = {i: lab for i, lab in enumerate(doc["labels"])}
            return linear_matroid(int(doc["field"]), doc["columns"], labels)
        if kind == "uniform":
            return uniform_matroid(int(doc["rank"]), int(doc["size"]))
        if kind == "closure-table":
            n = int(doc["ground"])
            table = {
                frozenset(entry["set"]): frozenset(entry["cl"])
                for entry in doc["closure"]
            }
            return Matroid(GroundSet(tuple(range(n))), ClosureTableOracle(table))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad matroid document: {e}") from None
    raise InputError(f"unknown matroid type {kind!r}")


# -- geometric structures and scenarios --------------------------------------


def structure_to_json(g: GeometricStructure) -> dict:
    return {
        "universe": len(g.universe),
        "matroid": matroid_to_json(g.matroid),
        "phi": {"arity": g.arity, "tuples": sorted(list(t) for t in g.phi)},
        "K": g.fiber_bound,
    }


def structure_from_json(doc: Any) -> GeometricStructure:
    try:
        m = matroid_from_json(doc["matroid"])
        tuples = [tuple(t) for t in doc["phi"]["tuples"]]
        g = GeometricStructure.of(m, tuples, int(doc["K"]))
        if len(g.universe) != int(doc["universe"]):
            raise InputError("universe size disagrees with the matroid")
        if g.arity != int(doc["phi"]["arity"]):
            raise InputError("declared arity disagrees with the tuples")
        return g
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad structure document: {e}") from None


def _fiber_key_str(key) -> str:
    j, rest = key
    return f"{j}|" + ",".join(str(r) for r in rest)


def _fiber_key_parse(text: str):
    try:
        j, rest = text.split("|", 1)
        parts = tuple(int(x) for x in rest.split(",")) if rest else ()
        return fiber_key(int(j), parts)
    except ValueError:
        raise InputError(f"bad fiber key {text!r}") from None


def scenario_to_json(enum: EnumeratedStructure) -> dict:
    doc = structure_to_json(enum.structure)
    reveals = []
    prev: frozenset = frozenset()
    for stage_set in enum.stages:
        reveals.append({"reveal": sorted(list(t) for t in stage_set - prev)})
        prev = stage_set
    doc["stages"] = reveals
    doc["counts"] = {_fiber_key_str(k): v for k, v in sorted(enum.counts.items())}
    doc["infinite_seeds"] = sorted(sorted(s) for s in enum.infinite_seeds)
    return doc


def scenario_from_json(doc: Any) -> EnumeratedStructure:
    g = structure_from_json(doc)
    try:
        reveal = [
            [tuple(t) for t in stage["reveal"]] for stage in doc.get("stages", [])
        ]
        counts = {
            _fiber_key_parse(k): int(v) for k, v in doc.get("counts", {}).items()
        }
        seeds = [frozenset(s) for s in doc.get("infinite_seeds", [])]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad scenario document: {e}") from None
    if not reveal:
        return EnumeratedStructure.complete(g)
    return EnumeratedStructure.of(g, reveal, counts, seeds)


# -- effective scenarios ------------------------------------------------------


def relational_to_json(s: RelationalStructure) -> dict:
    return {
        "universe": len(s.universe),
        "relations": {
            name: {"arity": rel.arity, "tuples": sorted(list(t) for t in rel.tuples)}
            for name, rel in sorted(s.relations.items())
        },
    }


def relational_from_json(doc: Any) -> RelationalStructure:
    try:
        n = int(doc["universe"])
        rels = {
            name: (int(spec["arity"]), [tuple(t) for t in spec["tuples"]])
            for name, spec in doc["relations"].items()
        }
        return RelationalStructure.of(range(n), rels)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad relational structure: {e}") from None


def effective_scenario_to_json(
    presentation: StagewisePresentation,
    membership: Delta2Schedule,
    enumeration: Sigma1Schedule,
    horizon: int,
) -> dict:
    if presentation.matroid is not None:
        struct_doc: dict[str, Any] = {"matroid": matroid_to_json(presentation.matroid)}
    else:
        struct_doc = {}
    struct_doc.update(relational_to_json(presentation.structure))
    a_stages: dict[str, list[int]] = {}
    for elem, stage in enumeration.entries:
        a_stages.setdefault(str(stage), []).append(elem)
    return {
        "structure": struct_doc,
        "signature_order": list(presentation.signature_order),
        "M": sorted(membership.target),
        "flips": [
            {"elem": ev.elem, "stage": ev.stage, "in": ev.value}
            for ev in membership.flips
        ],
        "max_flips": membership.max_flips_per_element,
        "A": sorted(enumeration.target),
        "A_stages": {k: sorted(v) for k, v in sorted(a_stages.items())},
        "horizon": horizon,
    }


def effective_scenario_from_json(
    doc: Any,
) -> tuple[StagewisePresentation, Delta2Schedule, Sigma1Schedule, int]:
    try:
        struct_doc = doc["structure"]
        structure = relational_from_json(struct_doc)
        matroid = (
            matroid_from_json(struct_doc["matroid"])
            if "matroid" in struct_doc
            else None
        )
        presentation = StagewisePresentation(
            structure, tuple(doc["signature_order"]), matroid
        )
        flips = tuple(
            FlipEvent(int(f["elem"]), int(f["stage"]), bool(f["in"]))
            for f in doc.get("flips", [])
        )
        membership = Delta2Schedule(
            frozenset(int(x) for x in doc["M"]),
            flips,
            int(doc.get("max_flips", 3)),
        )
        membership.validate()
        entries = []
        for stage, elems in doc.get("A_stages", {}).items():
            for e in elems:
                entries.append((int(e), int(stage)))
        enumeration = Sigma1Schedule.of(entries)
        declared = frozenset(int(x) for x in doc.get("A", []))
        if declared and declared != enumeration.target:
            raise InputError("A and A_stages disagree")
        horizon = int(doc["horizon"])
        return presentation, membership, enumeration, horizon
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad effective scenario: {e}") from None
