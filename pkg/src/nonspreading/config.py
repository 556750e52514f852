"""Experiment configuration: JSON schema, validation and decoding.

One JSON file describes one experiment.  Points are written in the space's
native form (see :func:`nonspreading.io.decode_point`).  Mappings, sets and
functions are tagged objects selected by their ``"kind"`` field, for example::

    {"space": {"kind": "euclidean", "dim": 2},
     "mapping": {"kind": "prox",
                 "function": {"kind": "half_sq_dist", "anchor": [0, 0], "weight": 1}},
     "solver": {"method": "picard", "start": [8, 0], "max_iter": 60}}
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from . import convex, mappings
from .geometry import GeometryError, SpaceTag
from .io import decode_point
from .solvers import DIVERGENCE_FACTOR, StepSchedule
from .spaces import EuclideanSpace, HyperbolicSpace, TreeSpace


class ConfigError(ValueError):
    """Invalid experiment configuration; ``details`` lists the problems."""

    def __init__(self, message, details=()):
        super().__init__(message)
        self.details = list(details)


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_point = {"$ref": "#/$defs/point"}


def _kind(name, required=(), **props):
    return {
        "type": "object",
        "properties": {"kind": {"const": name}, **props},
        "required": ["kind", *required],
        "additionalProperties": False,
    }


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "nonspreading experiment",
    "type": "object",
    "required": ["space"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "space": {"$ref": "#/$defs/space"},
        "mapping": {"$ref": "#/$defs/mapping"},
        "family": {"type": "array", "items": {"$ref": "#/$defs/mapping"}, "minItems": 1},
        "fixed_point": _point,
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start"],
            "properties": {
                "method": {"enum": ["picard", "mann", "cyclic"]},
                "schedule": {"$ref": "#/$defs/schedule"},
                "start": _point,
                "reference": _point,
                "max_iter": {"type": "integer", "minimum": 1},
                "tol": _pos,
                "divergence_factor": _pos,
            },
        },
        "sampler": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "center": _point,
                "radius": _pos,
                "count": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "suites": {"type": "array", "uniqueItems": True, "items": {
                    "enum": ["cauchy_schwarz", "identities", "convexity", "classification"]}},
                "properties": {"type": "array", "uniqueItems": True,
                               "items": {"enum": list(mappings.PROPERTIES)}},
                "tolerance": _num,
                "identity_tolerance": _pos,
            },
        },
        "expected": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "properties": {p: {"enum": ["pass", "fail"]} for p in mappings.PROPERTIES},
        },
        "diagnostics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "boolean"} for k in
                           ("asymptotic_center", "delta_limit", "double_sequence",
                            "demiclosedness", "fejer")},
        },
        "points": {"type": "array", "items": _point},
        "points_file": {"type": "string"},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "string"} for k in
                           ("report", "trace", "diagnostics")},
        },
    },
    "$defs": {
        "point": {"oneOf": [
            {"type": "array", "items": _num, "minItems": 1},
            {"type": "object", "additionalProperties": False, "required": ["vertex"],
             "properties": {"vertex": {"type": "integer", "minimum": 0}}},
            {"type": "object", "additionalProperties": False, "required": ["edge"],
             "properties": {"edge": {"type": "integer", "minimum": 0}, "offset": _num}},
            {"type": "object", "additionalProperties": False, "required": ["poincare"],
             "properties": {"poincare": {"type": "array", "items": _num}}},
            {"type": "object", "additionalProperties": False, "required": ["hyperboloid"],
             "properties": {"hyperboloid": {"type": "array", "items": _num}}},
        ]},
        "space": {"oneOf": [
            _kind("euclidean", ["dim"], dim={"type": "integer", "minimum": 1}),
            _kind("hyperbolic", ["dim"], dim={"type": "integer", "minimum": 1}),
            _kind("tree", ["vertices", "edges"], vertices={"type": "integer", "minimum": 2},
                  edges={"type": "array", "items": {
                      "type": "array", "minItems": 3, "maxItems": 3,
                      "prefixItems": [{"type": "integer"}, {"type": "integer"}, _num]}}),
            _kind("tree_file", ["path"], path={"type": "string"}),
            _kind("star", ["leaves"], leaves={"type": "integer", "minimum": 1}, length=_pos),
        ]},
        "set": {"oneOf": [
            _kind("ball", ["center", "radius"], center=_point, radius=_pos),
            _kind("segment", ["a", "b"], a=_point, b=_point),
            _kind("singleton", ["point"], point=_point),
            _kind("subtree", ["vertices"], vertices={
                "type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}),
            _kind("halfspace", ["normal", "offset"],
                  normal={"type": "array", "items": _num}, offset=_num),
        ]},
        "function": {"oneOf": [
            _kind("half_sq_dist", ["anchor"], anchor=_point, weight=_pos),
            _kind("frechet", ["anchors"], anchors={"type": "array", "minItems": 1, "items": {
                "type": "object", "additionalProperties": False, "required": ["point"],
                "properties": {"point": _point, "weight": _pos}}}),
            _kind("indicator", ["set"], set={"$ref": "#/$defs/set"}),
            _kind("dist", ["anchor"], anchor=_point, weight=_pos),
            _kind("affine", ["gradient"], gradient={"type": "array", "items": _num},
                  constant=_num),
        ]},
        "mapping": {"oneOf": [
            _kind("projection", ["set"], set={"$ref": "#/$defs/set"}),
            _kind("prox", ["function"], function={"$ref": "#/$defs/function"}),
            _kind("glued", ["S", "T", "center", "r"], S={"$ref": "#/$defs/mapping"},
                  T={"$ref": "#/$defs/mapping"}, center=_point, r=_pos, delta=_pos),
            _kind("glued_standard", ["center", "r"], center=_point, r=_pos, delta=_pos),
            _kind("composition", ["maps"], maps={
                "type": "array", "minItems": 1, "items": {"$ref": "#/$defs/mapping"}}),
            _kind("identity"),
        ]},
        "schedule": {"oneOf": [
            _kind("constant", ["alpha"], alpha={"type": "number", "exclusiveMinimum": 0,
                                                "maximum": 1}),
            _kind("harmonic"),
            _kind("custom", ["values"], values={"type": "array", "minItems": 1, "items": {
                "type": "number", "exclusiveMinimum": 0, "maximum": 1}}),
        ]},
    },
}

DEFAULT_SEED = 0
DEFAULT_COUNT = 10_000
DEFAULT_VERIFY = {
    "space": {"kind": "euclidean", "dim": 2},
    "mapping": {"kind": "projection",
                "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0}},
    "expected": {"mns": "pass", "fmns": "pass", "nonexpansive": "pass", "quasi": "pass"},
    "sampler": {"radius": 3.0, "count": DEFAULT_COUNT, "seed": DEFAULT_SEED},
}


def validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        details = [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}"
                   for e in errors]
        raise ConfigError("config does not match the schema", details)


def canonical_hash(doc) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    validate(doc)
    return doc


# ---------------------------------------------------------------- decoding

def build_space(spec, base_dir=None):
    kind = spec["kind"]
    if kind == "euclidean":
        return EuclideanSpace(spec["dim"])
    if kind == "hyperbolic":
        return HyperbolicSpace(spec["dim"])
    if kind == "tree":
        return TreeSpace(spec["vertices"], spec["edges"])
    if kind == "tree_file":
        path = Path(spec["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return TreeSpace.load(path)
    return TreeSpace.star(spec["leaves"], spec.get("length", 1.0))


def build_set(space, spec):
    kind = spec["kind"]
    pt = lambda obj: decode_point(space, obj)  # noqa: E731
    if kind == "ball":
        return convex.Ball(space, pt(spec["center"]), float(spec["radius"]))
    if kind == "segment":
        return convex.GeodesicSegment(space, pt(spec["a"]), pt(spec["b"]))
    if kind == "singleton":
        p = pt(spec["point"])
        return convex.GeodesicSegment(space, p, p)
    if kind == "subtree":
        return convex.Subtree(space, frozenset(spec["vertices"]))
    return convex.HalfspaceEuclidean(space, tuple(spec["normal"]), float(spec["offset"]))


def build_function(space, spec):
    kind = spec["kind"]
    if kind == "half_sq_dist":
        return convex.HalfSqDistTo(space, decode_point(space, spec["anchor"]),
                                   float(spec.get("weight", 1.0)))
    if kind == "frechet":
        anchors = tuple((decode_point(space, a["point"]), float(a.get("weight", 1.0)))
                        for a in spec["anchors"])
        return convex.WeightedFrechet(space, anchors)
    if kind == "indicator":
        return convex.IndicatorOf(build_set(space, spec["set"]))
    if kind == "dist":
        return convex.DistTo(space, decode_point(space, spec["anchor"]),
                             float(spec.get("weight", 1.0)))
    return convex.AffineEuclidean(space, tuple(spec["gradient"]),
                                  float(spec.get("constant", 0.0)))


def build_mapping(space, spec):
    kind = spec["kind"]
    if kind == "projection":
        return mappings.Projection(build_set(space, spec["set"]))
    if kind == "prox":
        return mappings.Prox(build_function(space, spec["function"]))
    if kind == "glued":
        r = float(spec["r"])
        delta = float(spec.get("delta", mappings.GLUED_RATIO * r))
        return mappings.Glued(build_mapping(space, spec["S"]), build_mapping(space, spec["T"]),
                              decode_point(space, spec["center"]), r, delta)
    if kind == "glued_standard":
        return mappings.glued_standard(space, decode_point(space, spec["center"]),
                                     float(spec["r"]), spec.get("delta"))
    if kind == "composition":
        return mappings.Composition(tuple(build_mapping(space, m) for m in spec["maps"]))
    return mappings.Identity(space)


def build_schedule(spec):
    if spec is None:
        return None
    if spec["kind"] == "constant":
        return StepSchedule.constant(spec["alpha"])
    if spec["kind"] == "harmonic":
        return StepSchedule.harmonic()
    return StepSchedule.custom(spec["values"])


@dataclass
class Experiment:
    """A validated config with its objects built."""

    doc: dict
    space: object
    mapping: object
    family: list
    fixed_point: object
    seed: int
    base_dir: object = None

    @property
    def sampler_spec(self) -> dict:
        return self.doc.get("sampler", {})

    def point(self, obj):
        return decode_point(self.space, obj)

    def sampler(self, seed_offset: int = 0):
        spec = self.sampler_spec
        center = self.point(spec["center"]) if "center" in spec else None
        radius = spec.get("radius")
        if center is None and self.space.tag is not SpaceTag.TREE:
            center = self.space.origin()
        if radius is None and self.space.tag is not SpaceTag.TREE:
            radius = 1.0
        return mappings.PairSampler(self.space, center, radius,
                                    seed=(self.seed + seed_offset) % 2 ** 64)

    @property
    def count(self) -> int:
        return int(self.sampler_spec.get("count", DEFAULT_COUNT))


def build(doc, seed=None, base_dir=None) -> Experiment:
    """Validate ``doc`` and build its objects; ``seed`` overrides the sampler seed."""
    doc = copy.deepcopy(doc)
    validate(doc)
    if seed is not None:
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        doc.setdefault("sampler", {})["seed"] = int(seed)
    try:
        space = build_space(doc["space"], base_dir)
        mapping = build_mapping(space, doc["mapping"]) if "mapping" in doc else None
        family = [build_mapping(space, m) for m in doc.get("family", [])]
        fixed = decode_point(space, doc["fixed_point"]) if "fixed_point" in doc else None
        if fixed is None and mapping is not None:
            fixed = mapping.fixed_point()
        if "solver" in doc:
            sol = doc["solver"]
            decode_point(space, sol["start"])
            if "reference" in sol:
                decode_point(space, sol["reference"])
            if sol.get("method", "picard") == "cyclic" and not family:
                raise ConfigError("cyclic solver needs a mapping family")
            if sol.get("method", "picard") != "cyclic" and mapping is None:
                raise ConfigError("solver needs a mapping")
            if sol.get("method") == "mann" and "schedule" not in sol:
                raise ConfigError("mann solver needs a schedule")
        if "sampler" in doc and "center" in doc["sampler"]:
            decode_point(space, doc["sampler"]["center"])
    except (GeometryError, OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config cannot be built: {exc}") from exc
    seed_value = int(doc.get("sampler", {}).get("seed", DEFAULT_SEED))
    return Experiment(doc, space, mapping, family, fixed, seed_value, base_dir)


def solver_settings(doc) -> dict:
    sol = doc["solver"]
    return {
        "method": sol.get("method", "picard"),
        "schedule": build_schedule(sol.get("schedule")),
        "max_iter": int(sol.get("max_iter", 1000)),
        "tol": float(sol.get("tol", 1e-12)),
        "divergence_factor": float(sol.get("divergence_factor", DIVERGENCE_FACTOR)),
    }
