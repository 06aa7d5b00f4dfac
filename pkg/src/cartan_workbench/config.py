"""Workbench configuration: JSON parsing, validation and canonical serialization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

import jsonschema

from .cocycles import CocycleDescriptor, CocycleTerm
from .groups import GroupDescriptor, GroupError, TwistTerm
from .subgroups import SubgroupDescriptor, SubgroupError

ANGLE = r"^-?[0-9]+(/[0-9]+)?$"

SCHEMA = {
    "type": "object",
    "required": ["group", "cocycle", "subgroups"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "group": {
            "type": "object",
            "required": ["components"],
            "additionalProperties": False,
            "properties": {
                "components": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "string", "pattern": r"^(Z|Z/[0-9]+)$"},
                },
                "twist": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["target", "left", "right", "coeff"],
                        "additionalProperties": False,
                        "properties": {
                            k: {"type": "integer"} for k in ("target", "left", "right", "coeff")
                        },
                    },
                },
            },
        },
        "cocycle": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["left", "right", "angle"],
                "additionalProperties": False,
                "properties": {
                    "left": {"type": "integer", "minimum": 1},
                    "right": {"type": "integer", "minimum": 1},
                    "angle": {"type": "string", "pattern": ANGLE},
                },
            },
        },
        "subgroups": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
            },
        },
        "ball_radius": {"type": "integer", "minimum": 1},
        "k_max": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": -(2**63), "maximum": 2**64 - 1},
        "counterexample": {
            "type": "object",
            "required": ["subgroup", "h"],
            "additionalProperties": False,
            "properties": {
                "subgroup": {"type": "string"},
                "h": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["element", "coeff"],
                        "additionalProperties": False,
                        "properties": {
                            "element": {"type": "array", "items": {"type": "integer"}},
                            "coeff": {"type": "string", "pattern": ANGLE},
                        },
                    },
                },
            },
        },
    },
}


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(f"field {path}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass
class WorkbenchConfig:
    group: GroupDescriptor
    cocycle: CocycleDescriptor
    subgroups: dict[str, SubgroupDescriptor]
    ball_radius: int = 3
    k_max: int = 4
    samples: int = 500
    seed: int = 0
    name: str | None = None
    # optional probe h for the commutant check: (subgroup name, [(element, angle)])
    counterexample: tuple[str, tuple[tuple[tuple[int, ...], Fraction], ...]] | None = None

    def subgroup(self, name: str | None) -> tuple[str, SubgroupDescriptor]:
        if name is None:
            name = next(iter(self.subgroups))
        if name not in self.subgroups:
            raise ConfigError(f"unknown subgroup {name!r}; have {sorted(self.subgroups)}", "subgroups")
        return name, self.subgroups[name]

    def to_json(self) -> dict:
        out: dict = {}
        if self.name is not None:
            out["name"] = self.name
        out["group"] = self.group.to_json()
        out["cocycle"] = self.cocycle.to_json()
        out["subgroups"] = {k: v.to_json() for k, v in self.subgroups.items()}
        out["ball_radius"] = self.ball_radius
        out["k_max"] = self.k_max
        out["samples"] = self.samples
        out["seed"] = self.seed
        if self.counterexample is not None:
            sub, terms = self.counterexample
            out["counterexample"] = {
                "subgroup": sub,
                "h": [
                    {"element": list(g), "coeff": f"{a.numerator}/{a.denominator}"} for g, a in terms
                ],
            }
        return out


def _line_of(text: str, path: list) -> int | None:
    """Best-effort line number for a JSON path: the last key that occurs in the text."""
    for key in reversed(path):
        if isinstance(key, str):
            m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
            if m:
                return text.count("\n", 0, m.start()) + 1
    return None


def _path(parts) -> str:
    return "".join(f"[{p}]" if isinstance(p, int) else (f".{p}" if i else p) for i, p in enumerate(parts))


def parse_config(text: str) -> WorkbenchConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno) from None

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        parts = list(err.absolute_path)
        raise ConfigError(err.message, _path(parts), _line_of(text, parts))

    g = data["group"]
    try:
        twist = tuple(TwistTerm(t["target"], t["left"], t["right"], t["coeff"]) for t in g.get("twist", []))
        group = GroupDescriptor.from_components(g["components"], twist)
    except (GroupError, ValueError) as exc:
        raise ConfigError(str(exc), "group", _line_of(text, ["group"])) from None
    for i, t in enumerate(group.twist):
        if t in group.triangularity_violations():
            raise ConfigError(
                f"twist term {t.to_json()} violates triangularity (left and right must exceed target)",
                f"group.twist[{i}]",
                _line_of(text, ["twist"]),
            )
    for t, side in group.well_definedness_violations():
        raise ConfigError(
            f"twist term {t.to_json()} is not well defined on the torsion {side} component",
            "group.twist",
            _line_of(text, ["twist"]),
        )

    cocycle = CocycleDescriptor(
        tuple(CocycleTerm(t["left"], t["right"], Fraction(t["angle"])) for t in data["cocycle"])
    )
    problems = cocycle.structural_problems(group)
    if problems:
        p = problems[0]
        raise ConfigError(f"{p['problem']} in term {p['term']}", "cocycle", _line_of(text, ["cocycle"]))

    subgroups = {}
    for name, scalings in data["subgroups"].items():
        S = SubgroupDescriptor(tuple(scalings))
        try:
            S.check_against(group)
        except SubgroupError as exc:
            raise ConfigError(str(exc), f"subgroups.{name}", _line_of(text, [name])) from None
        subgroups[name] = S

    counterexample = None
    if "counterexample" in data:
        ce = data["counterexample"]
        if ce["subgroup"] not in subgroups:
            raise ConfigError(f"unknown subgroup {ce['subgroup']!r}", "counterexample.subgroup")
        terms = []
        for i, t in enumerate(ce["h"]):
            if len(t["element"]) != group.rank:
                raise ConfigError(
                    f"element needs {group.rank} coordinates", f"counterexample.h[{i}].element"
                )
            terms.append((group.element(t["element"]), Fraction(t["coeff"])))
        counterexample = (ce["subgroup"], tuple(terms))

    return WorkbenchConfig(
        group=group,
        cocycle=cocycle,
        subgroups=subgroups,
        ball_radius=data.get("ball_radius", 3),
        k_max=data.get("k_max", 4),
        samples=data.get("samples", 500),
        seed=data.get("seed", 0),
        name=data.get("name"),
        counterexample=counterexample,
    )


def serialize_config(cfg: WorkbenchConfig) -> str:
    return json.dumps(cfg.to_json(), indent=2) + "\n"
