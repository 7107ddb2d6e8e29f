"""Problem files: JSON documents binding K, P, p and solver overrides.

Layout::

    {"P": {"n": 2, "d": 2, "coeffs": [[...], [...]]},
     "p": [1.0, 1.0],
     "K": {"C": [[-1, 0], [0, -1]], "b": [0, 0]},
     "config": {"multistart": 128}}

Unknown keys are rejected at every level.
"""

from __future__ import annotations

import dataclasses
import json
import sys

import jsonschema

from .kkt import SolveConfig, VIProblem
from .polyhedra import PolyhedralSet
from .polymap import PolynomialMap

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM}
_MAT = {"type": "array", "items": _VEC}

_CONFIG_PROPS = {
    f.name: ({"type": "integer"} if f.type in ("int", int) else _NUM)
    for f in dataclasses.fields(SolveConfig)
}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "P": {
            "type": "object",
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 0},
                "coeffs": _MAT,
            },
            "required": ["n", "d", "coeffs"],
            "additionalProperties": False,
        },
        "p": _VEC,
        "K": {
            "type": "object",
            "properties": {"C": _MAT, "b": _VEC, "E": _MAT, "d": _VEC},
            "additionalProperties": False,
        },
        "config": {"type": "object", "properties": _CONFIG_PROPS, "additionalProperties": False},
    },
    "required": ["P", "K"],
    "additionalProperties": False,
}


class ProblemFileError(ValueError):
    """Malformed or inconsistent problem file."""


@dataclasses.dataclass(frozen=True)
class ProblemFile:
    problem: VIProblem
    config: SolveConfig

    @property
    def K(self):
        return self.problem.K

    @property
    def P(self):
        return self.problem.P

    @property
    def p(self):
        return self.problem.p

    def to_json(self) -> dict:
        return {
            "P": self.P.to_json(),
            "p": self.p.tolist(),
            "K": self.K.to_json(),
            "config": self.config.to_json(),
        }


def parse_problem(doc, overrides=None) -> ProblemFile:
    """Validate a decoded document and build the problem plus resolved config."""
    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ProblemFileError(f"{where}: {exc.message}") from None
    try:
        P = PolynomialMap.from_json(doc["P"])
        K = PolyhedralSet.from_json(doc["K"], n=P.n)
        prob = VIProblem(K, P, doc.get("p"))
        cfg = SolveConfig(**{**doc.get("config", {}), **(overrides or {})})
    except (ValueError, TypeError) as exc:
        raise ProblemFileError(str(exc)) from None
    return ProblemFile(prob, cfg)


def load_problem(path, overrides=None) -> ProblemFile:
    """Read a problem file; ``"-"`` reads standard input."""
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise ProblemFileError(str(exc)) from None
    return parse_problem(doc, overrides)


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"
