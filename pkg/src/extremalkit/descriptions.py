"""JSON set descriptions: {"kind": ..., parameters...}, recursive for unions and products.

Complex numbers are written as a plain number or as [re, im].
A document may carry an "id" and, for control fixtures, a
"synthetic_profile": {"gamma": ..., "B": ...} that replaces the computed
Green profile in the equivalence suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .sets import (Arc, Disc, Point, Polydisc, Product, RealBox, RealInterval, SetDescriptionError, Union,
                   build_chain_set, build_onion_set)

KINDS = ("interval", "disc", "arc", "point", "box", "polydisc", "product", "union", "onion", "chain")


@dataclass(frozen=True)
class SetDocument:
    set: object
    set_id: str
    kind: str
    truncation: int | None = None
    violations: tuple[str, ...] = ()
    claim: tuple[float, float] | None = None  # (m, gamma) a construction is known to satisfy
    synthetic: dict | None = None
    parameters: dict = field(default_factory=dict)


def _real(obj, key):
    if key not in obj:
        raise SetDescriptionError(f"missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SetDescriptionError(f"field {key!r} must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise SetDescriptionError(f"field {key!r} must be finite")
    return v


def _complex(v, key="value") -> complex:
    if isinstance(v, bool):
        raise SetDescriptionError(f"{key} must be a number or [re, im]")
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                   for x in v):
        return complex(float(v[0]), float(v[1]))
    raise SetDescriptionError(f"{key} must be a number or [re, im], got {v!r}")


def _list(obj, key) -> list:
    v = obj.get(key)
    if not isinstance(v, list) or not v:
        raise SetDescriptionError(f"field {key!r} must be a nonempty list")
    return v


def _reals(obj, key) -> list[float]:
    return [_real({key: x}, key) for x in _list(obj, key)]


def _int(obj, key, default=None) -> int:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SetDescriptionError(f"field {key!r} must be an integer, got {v!r}")
    return v


def parse_set(obj, truncation: int | None = None):
    """Build a set descriptor; returns (set, info) with construction details in info."""
    if not isinstance(obj, dict):
        raise SetDescriptionError("a set description must be a JSON object")
    kind = obj.get("kind")
    info: dict = {"kind": kind}
    if kind == "interval":
        return RealInterval(_real(obj, "a"), _real(obj, "b")), info
    if kind == "disc":
        return Disc(_complex(obj.get("center", 0), "center"), _real(obj, "radius")), info
    if kind == "arc":
        return Arc(_complex(obj.get("center", 0), "center"), _real(obj, "radius"),
                   _real(obj, "theta_start"), _real(obj, "theta_end")), info
    if kind == "point":
        return Point(tuple(_complex(v, "location") for v in _list(obj, "location"))), info
    if kind == "box":
        return RealBox(tuple(_reals(obj, "lo")), tuple(_reals(obj, "hi"))), info
    if kind == "polydisc":
        center = tuple(_complex(v, "center") for v in _list(obj, "center"))
        return Polydisc(center, tuple(_reals(obj, "polyradius"))), info
    if kind == "product":
        return Product(tuple(parse_set(f)[0] for f in _list(obj, "factors"))), info
    if kind == "union":
        return Union(tuple(parse_set(m)[0] for m in _list(obj, "members"))), info
    if kind == "onion":
        J = truncation if truncation is not None else _int(obj, "truncation")
        c = build_onion_set(_reals(obj, "radii"), _reals(obj, "angles"), J)
        info.update(truncation=J, violations=c.violations, claim=(6.0, 1 / 6), parameters=c.parameters)
        return c.set, info
    if kind == "chain":
        J = truncation if truncation is not None else _int(obj, "truncation")
        mu = _real(obj, "mu")
        c = build_chain_set(mu, _real(obj, "b"), _int(obj, "N", 1), J)
        info.update(truncation=J, violations=c.violations, claim=(2 + mu, 1 / (2 + mu)),
                    parameters=c.parameters)
        return c.set, info
    raise SetDescriptionError(f"unknown set kind {kind!r}; expected one of {', '.join(KINDS)}")


def parse_document(obj, default_id: str = "set", truncation: int | None = None) -> SetDocument:
    s, info = parse_set(obj, truncation)
    set_id = obj.get("id", default_id)
    if not isinstance(set_id, str) or not set_id:
        raise SetDescriptionError("id must be a nonempty string")
    synthetic = obj.get("synthetic_profile")
    if synthetic is not None:
        if not isinstance(synthetic, dict):
            raise SetDescriptionError("synthetic_profile must be an object")
        synthetic = {"gamma": _real(synthetic, "gamma"), "B": _real(synthetic, "B")}
        if not synthetic["gamma"] > 0 or not synthetic["B"] > 0:
            raise SetDescriptionError("synthetic_profile needs gamma > 0 and B > 0")
    return SetDocument(s, set_id, info["kind"], info.get("truncation"), tuple(info.get("violations", ())),
                       info.get("claim"), synthetic, info.get("parameters", {}))


def load_set_file(path, truncation: int | None = None) -> SetDocument:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise SetDescriptionError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SetDescriptionError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_document(obj, path.stem, truncation)


def _c(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def set_to_json(s) -> dict:
    """Inverse of parse_set for the primitive kinds."""
    if isinstance(s, RealInterval):
        return {"kind": "interval", "a": s.a, "b": s.b}
    if isinstance(s, Disc):
        return {"kind": "disc", "center": _c(s.center), "radius": s.radius}
    if isinstance(s, Arc):
        return {"kind": "arc", "center": _c(s.center), "radius": s.radius,
                "theta_start": s.theta_start, "theta_end": s.theta_end}
    if isinstance(s, Point):
        return {"kind": "point", "location": [_c(z) for z in s.location]}
    if isinstance(s, RealBox):
        return {"kind": "box", "lo": list(s.lo), "hi": list(s.hi)}
    if isinstance(s, Polydisc):
        return {"kind": "polydisc", "center": [_c(z) for z in s.center], "polyradius": list(s.polyradius)}
    if isinstance(s, Product):
        return {"kind": "product", "factors": [set_to_json(f) for f in s.factors]}
    if isinstance(s, Union):
        return {"kind": "union", "members": [set_to_json(m) for m in s.members]}
    raise TypeError(f"cannot serialize {type(s).__name__}")
