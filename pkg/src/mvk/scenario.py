"""Scenario files: schema, loading and the bundled corpus."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .birational import Label, LabelStore, irrational, point, rational, unknown
from .equivariant import EquivAtom, ActionLabel, SncModelWithCovers, snc_model
from .errors import SchemaError, ValidationError
from .ring import Atom
from .strata import StrataComplex, build_complex, from_snc_nerve, make_stratum
from .toric import Cone, cone_from_rays

SCHEMA_VERSION = 1

_pair = {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}
_tag = {"enum": ["RATIONAL", "STABLY_RATIONAL", "IRRATIONAL", "UNKNOWN"]}
_info = {
    "type": "object",
    "additionalProperties": {
        "type": "object",
        "properties": {"tag": _tag, "label": {"type": "string"}, "open_atom": {"type": "string"}},
        "additionalProperties": False,
    },
}
_nerve = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "subset": {"type": "array", "items": {"type": "string"}, "minItems": 2},
            "pieces": {"type": "array", "items": {"type": "string"}},
            "count": {"type": "integer", "minimum": 0},
            "hints": {"type": "object",
                      "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        },
        "required": ["subset"],
        "additionalProperties": False,
    },
}
_complex = {
    "type": "object",
    "properties": {
        "fiber_dim": {"type": "integer", "minimum": 0},
        "strata": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "string"},
                    "name": {"type": "string"},
                    "codim": {"type": "integer", "minimum": 0},
                    "tag": _tag,
                    "label": {"type": "string"},
                    "open_atom": {"type": "string"},
                },
                "required": ["id", "codim"],
                "additionalProperties": False,
            },
        },
        "contains": {"type": "array", "items": _pair},
    },
    "required": ["fiber_dim", "strata"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "note": {"type": "string"},
        "labels": {
            "type": "object",
            "properties": {
                "declare": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "name": {"type": "string"},
                            "kind": {"enum": ["IRRATIONAL", "UNKNOWN"]},
                            "dim": {"type": "integer", "minimum": 0},
                        },
                        "required": ["name", "kind", "dim"],
                        "additionalProperties": False,
                    },
                },
                "equivalences": {"type": "array", "items": _pair},
                "distinctions": {"type": "array", "items": _pair},
                "not_stably_rational": {"type": "array", "items": {"type": "string"}},
                "stably_rational": {"type": "array", "items": {"type": "string"}},
            },
            "additionalProperties": False,
        },
        "complex": _complex,
        "nerve": {
            "type": "object",
            "properties": {
                "fiber_dim": {"type": "integer", "minimum": 0},
                "components": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "intersections": _nerve,
                "info": _info,
            },
            "required": ["fiber_dim", "components"],
            "additionalProperties": False,
        },
        "equivariant": {
            "type": "object",
            "properties": {
                "fiber_dim": {"type": "integer", "minimum": 0},
                "components": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {"name": {"type": "string"},
                                       "mult": {"type": "integer", "minimum": 1}},
                        "required": ["name", "mult"],
                        "additionalProperties": False,
                    },
                },
                "intersections": _nerve,
                "info": _info,
                "covers": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "atom": {"type": "string"},
                                "order": {"type": "integer", "minimum": 1},
                                "action": {"type": "string"},
                            },
                            "required": ["atom"],
                            "additionalProperties": False,
                        },
                    },
                },
                "base_changed": _complex,
                "identification": {"type": "object",
                                   "additionalProperties": {"type": "string"}},
            },
            "required": ["fiber_dim", "components"],
            "additionalProperties": False,
        },
        "cone": {
            "type": "object",
            "properties": {
                "rank": {"type": "integer", "minimum": 1},
                "rays": {"type": "array",
                         "items": {"type": "array", "items": {"type": "integer"}}},
            },
            "required": ["rank", "rays"],
            "additionalProperties": False,
        },
        "expected": {
            "type": "object",
            "properties": {
                "rule": {"enum": ["stable", "rational", "parity"]},
                "status": {"enum": ["OBSTRUCTED", "NOT_OBSTRUCTED", "INCONCLUSIVE"]},
                "class": {"type": "string"},
            },
            "required": ["rule", "status"],
            "additionalProperties": False,
        },
    },
    "required": ["schema", "name"],
    "oneOf": [{"required": [k]} for k in ("complex", "nerve", "equivariant", "cone")],
    "additionalProperties": False,
}

_validator = jsonschema.Draft202012Validator(SCHEMA)
_RATIONAL = re.compile(r"P\^(\d+)")


@dataclass
class Scenario:
    name: str
    raw: dict
    complex: StrataComplex | None = None
    model: SncModelWithCovers | None = None
    base_changed: StrataComplex | None = None
    cone: Cone | None = None
    expected: dict = field(default_factory=dict)
    path: Path | None = None

    @property
    def kind(self) -> str:
        return next(k for k in ("complex", "nerve", "equivariant", "cone") if k in self.raw)


def _label_resolver(declared: dict[str, Label]):
    def resolve(name):
        if name is None:
            return None
        if name in declared:
            return declared[name]
        if name == "pt":
            return point()
        m = _RATIONAL.fullmatch(name)
        if m:
            return rational(int(m.group(1)))
        return name  # make_stratum builds a label from the tag
    return resolve


def _apply_labels(x: StrataComplex, spec: dict):
    store = x.store
    for a, b in spec.get("equivalences", []):
        store.declare_equivalent(a, b)
    for a, b in spec.get("distinctions", []):
        store.declare_distinct(a, b)
    for a in spec.get("not_stably_rational", []):
        store.declare_not_stably_rational(a)
    for a in spec.get("stably_rational", []):
        store.declare_stably_rational(a)
    store.check()


def _info(info: dict, resolve) -> dict:
    return {k: {**v, "label": resolve(v.get("label"))} for k, v in info.items()}


def _complex(spec: dict, resolve, store: LabelStore) -> StrataComplex:
    n = spec["fiber_dim"]
    strata = [make_stratum(s["id"], s["codim"], n, name=s.get("name"),
                           tag=s.get("tag", "UNKNOWN"), label=resolve(s.get("label")),
                           open_atom=s.get("open_atom"))
              for s in spec["strata"]]
    return build_complex(n, strata, spec.get("contains", []), store)


def parse(raw: dict, path: Path | None = None) -> Scenario:
    errs = sorted(_validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errs:
        diags = [{"code": "SchemaError", "path": "/".join(map(str, e.absolute_path)),
                  "message": e.message} for e in errs]
        raise SchemaError("; ".join(f"{d['path'] or '<root>'}: {d['message']}" for d in diags),
                          diags)
    labels = raw.get("labels", {})
    declared = {}
    for d in labels.get("declare", []):
        make = irrational if d["kind"] == "IRRATIONAL" else unknown
        declared[d["name"]] = make(d["name"], d["dim"])
    store = LabelStore(declared.values())
    resolve = _label_resolver(declared)
    sc = Scenario(raw["name"], raw, expected=raw.get("expected", {}), path=path)
    if "complex" in raw:
        sc.complex = _complex(raw["complex"], resolve, store)
    elif "nerve" in raw:
        nv = raw["nerve"]
        sc.complex = from_snc_nerve(nv["fiber_dim"], nv["components"], nv.get("intersections", []),
                                    _info(nv.get("info", {}), resolve), store)
    elif "equivariant" in raw:
        eq = raw["equivariant"]
        covers = None
        if "covers" in eq:
            covers = {}
            for sid, pieces in eq["covers"].items():
                covers[sid] = [(p["atom"], ActionLabel(p.get("order", 1), p.get("action", "")))
                               for p in pieces]
        sc.model = _model(eq, covers, resolve)
        sc.complex = sc.model.complex
        if "base_changed" in eq:
            sc.base_changed = _complex(eq["base_changed"], resolve, store)
    else:
        sc.cone = cone_from_rays(raw["cone"]["rank"], raw["cone"]["rays"])
    if sc.complex is not None:
        _apply_labels(sc.complex, labels)
    return sc


def _model(eq, covers, resolve) -> SncModelWithCovers:
    comps = [(c["name"], c["mult"]) for c in eq["components"]]
    info = _info(eq.get("info", {}), resolve)
    if covers is not None:
        # cover atoms get their dimension from the stratum they cover
        probe = from_snc_nerve(eq["fiber_dim"], [c for c, _ in comps],
                               eq.get("intersections", []), info)
        dims = {s.id: s.dim for s in probe}
        covers = {sid: [EquivAtom(Atom(a, dims.get(sid, 0)), act) for a, act in pieces]
                  for sid, pieces in covers.items()}
    return snc_model(eq["fiber_dim"], comps, eq.get("intersections", []), covers, info)


def load(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: not valid JSON ({e})") from None
    return parse(raw, path)


def corpus_dir() -> Path:
    env = os.environ.get("MVK_CORPUS_DIR")
    return Path(env) if env else Path(__file__).with_name("corpus")


def corpus_manifest() -> list[dict]:
    """The bundled scenarios with the verdicts they are expected to produce."""
    d = corpus_dir()
    names = json.loads((d / "manifest.json").read_text(encoding="utf-8"))["scenarios"]
    out = []
    for fname in names:
        raw = json.loads((d / fname).read_text(encoding="utf-8"))
        out.append({"file": fname, "name": raw["name"], "expected": raw.get("expected", {})})
    return out


def resolve_path(arg: str) -> Path:
    """A scenario path, falling back to the corpus directory for bare names."""
    p = Path(arg)
    if p.exists():
        return p
    for q in (corpus_dir() / arg, corpus_dir() / f"{arg}.json"):
        if q.is_file():
            return q
    raise ValidationError(f"no such scenario file: {arg}")
