"""JSON file schemas for groups, cocycles, bundles, triples and scenarios.

One structured-text format covers every input.  Complex entries are numbers
or two-element [re, im] lists; U(1) tables may instead be given as angles in
units of 2 pi, with exact rationals allowed ("1/2"), so roots of unity of
order 1, 2 and 4 survive exponentiation exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog
from .bundles import FellBundle
from .cocycles import BilinearCocycle, TwoCocycleReal, TwoCocycleU1, bilinear_cocycle
from .errors import ConfigInvalid, DeformlabError, InputInvalid
from .groups import FiniteGroup, build_group
from .linalg import unit_root
from .spectral import EquivariantTriple


def _load_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigInvalid(str(path), "file does not exist")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(str(path), f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigInvalid(str(path), "top level must be an object")
    return payload


def _complex_entry(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigInvalid(where, f"expected number or [re, im] pair, got {value!r}")


def _complex_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ConfigInvalid(where, "expected a nonempty list of rows")
    return np.array([[_complex_entry(v, where) for v in row] for row in rows])


def _angle_value(value, where: str) -> complex:
    """Angle in units of 2 pi; strings are exact rationals."""
    if isinstance(value, str):
        try:
            frac = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigInvalid(where, f"bad rational angle {value!r}") from exc
        return unit_root(frac.numerator, frac.denominator)
    if isinstance(value, (int, float)):
        return complex(np.exp(2j * np.pi * float(value)))
    raise ConfigInvalid(where, f"expected angle, got {value!r}")


def load_group(source, where: str = "group") -> FiniteGroup:
    """Group from a file path, a ``builtin:<name>`` reference, or inline data."""
    if isinstance(source, FiniteGroup):
        return source
    if isinstance(source, str):
        if source.startswith("builtin:"):
            name = source.split(":", 1)[1]
            if name not in catalog.BUILTIN_GROUPS:
                raise ConfigInvalid(where, f"unknown builtin group {name!r}")
            return catalog.builtin_group(name)
        return load_group(_load_json(source), where=source)
    if not isinstance(source, dict):
        raise ConfigInvalid(where, "expected path, builtin reference, or object")
    if source.get("kind", "group") != "group":
        raise ConfigInvalid(where, f"expected kind 'group', got {source.get('kind')!r}")
    if "cayley" not in source:
        raise ConfigInvalid(where, "missing 'cayley' table")
    try:
        return build_group(source["cayley"], labels=source.get("labels"),
                           name=source.get("name", ""))
    except DeformlabError as exc:
        raise InputInvalid(f"{where}: {exc}") from exc


def load_cocycle(source, group: FiniteGroup | None = None, where: str = "cocycle"):
    """U(1) or real cocycle; one of table, angles_over_2pi, bilinear_form."""
    if isinstance(source, (TwoCocycleU1, TwoCocycleReal, BilinearCocycle)):
        return source
    if isinstance(source, str):
        return load_cocycle(_load_json(source), group=group, where=source)
    if not isinstance(source, dict):
        raise ConfigInvalid(where, "expected path or object")
    if source.get("kind", "cocycle") != "cocycle":
        raise ConfigInvalid(where, f"expected kind 'cocycle', got {source.get('kind')!r}")
    if "bilinear_form" in source:
        try:
            return bilinear_cocycle(np.array(source["bilinear_form"], dtype=float))
        except DeformlabError as exc:
            raise InputInvalid(f"{where}: {exc}") from exc
    if group is None and "group" in source:
        group = load_group(source["group"], where=f"{where}.group")
    if group is None:
        raise ConfigInvalid(where, "cocycle needs a group")
    target = source.get("target", "u1")
    try:
        if target == "real":
            return TwoCocycleReal(group, np.array(source["table"], dtype=float))
        if target != "u1":
            raise ConfigInvalid(where, f"unknown target {target!r}")
        if "angles_over_2pi" in source:
            rows = source["angles_over_2pi"]
            table = np.array([[_angle_value(v, where) for v in row] for row in rows])
            return TwoCocycleU1(group, table)
        if "table" in source:
            return TwoCocycleU1(group, _complex_matrix(source["table"], where))
    except DeformlabError as exc:
        raise InputInvalid(f"{where}: {exc}") from exc
    raise ConfigInvalid(where, "need one of 'table', 'angles_over_2pi', 'bilinear_form'")


def load_bundle(source, where: str = "bundle") -> FellBundle:
    if isinstance(source, FellBundle):
        return source
    if isinstance(source, str):
        if source.startswith("builtin:"):
            name = source.split(":", 1)[1]
            makers = {
                "pauli": catalog.pauli_bundle,
                "clock-shift": catalog.clock_shift_bundle,
            }
            if name in makers:
                return makers[name]()
            if name.startswith("group-algebra-"):
                return catalog.group_algebra_bundle(
                    catalog.builtin_group(name.removeprefix("group-algebra-")))
            raise ConfigInvalid(where, f"unknown builtin bundle {name!r}")
        return load_bundle(_load_json(source), where=source)
    if not isinstance(source, dict):
        raise ConfigInvalid(where, "expected path, builtin reference, or object")
    if source.get("kind", "bundle") != "bundle":
        raise ConfigInvalid(where, f"expected kind 'bundle', got {source.get('kind')!r}")
    group = load_group(source.get("group"), where=f"{where}.group")
    if "basis" not in source:
        raise ConfigInvalid(where, "missing 'basis'")
    basis = []
    degrees = []
    for idx, item in enumerate(source["basis"]):
        if not isinstance(item, dict) or "matrix" not in item or "degree" not in item:
            raise ConfigInvalid(where, f"basis[{idx}] needs 'matrix' and 'degree'")
        basis.append(_complex_matrix(item["matrix"], f"{where}.basis[{idx}]"))
        degrees.append(item["degree"])
    try:
        return FellBundle(group, basis, [group.label_index(d) for d in degrees],
                          name=source.get("name", ""))
    except DeformlabError as exc:
        raise InputInvalid(f"{where}: {exc}") from exc


def load_triple(source, where: str = "triple") -> EquivariantTriple:
    if isinstance(source, EquivariantTriple):
        return source
    if isinstance(source, str):
        return load_triple(_load_json(source), where=source)
    if not isinstance(source, dict):
        raise ConfigInvalid(where, "expected path or object")
    if source.get("kind", "triple") != "triple":
        raise ConfigInvalid(where, f"expected kind 'triple', got {source.get('kind')!r}")
    bundle = load_bundle(source.get("bundle"), where=f"{where}.bundle")
    for key in ("grading", "dirac", "gamma"):
        if key not in source:
            raise ConfigInvalid(where, f"missing '{key}'")
    try:
        return EquivariantTriple(
            bundle, source["grading"],
            _complex_matrix(source["dirac"], f"{where}.dirac"),
            _complex_matrix(source["gamma"], f"{where}.gamma"),
            name=source.get("name", ""))
    except DeformlabError as exc:
        raise InputInvalid(f"{where}: {exc}") from exc


def parse_theta_grid(text: str) -> tuple:
    """'a:b:n' -> n evenly spaced points from a to b."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigInvalid("theta-grid", f"expected 'a:b:n', got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigInvalid("theta-grid", f"expected 'a:b:n', got {text!r}") from exc
    if n < 1:
        raise ConfigInvalid("theta-grid", "need at least one point")
    return tuple(float(t) for t in np.linspace(a, b, n))


def load_scenario(source, where: str = "scenario"):
    """Scenario config: either a builtin reference or inline inputs."""
    from .catalog import ScenarioInputs
    from .scenarios import Scenario, builtin_scenario

    if isinstance(source, str):
        return load_scenario(_load_json(source), where=source)
    if not isinstance(source, dict):
        raise ConfigInvalid(where, "expected path or object")
    if source.get("kind", "scenario") != "scenario":
        raise ConfigInvalid(where, f"expected kind 'scenario', got {source.get('kind')!r}")
    seed = int(source.get("seed", 0))
    grid = parse_theta_grid(source["theta_grid"]) if "theta_grid" in source else None
    tolerances = source.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigInvalid(where, "'tolerances' must be an object")
    if "builtin" in source:
        scenario = builtin_scenario(source["builtin"], theta_grid=grid, seed=seed,
                                    tolerances=tolerances)
        if "suites" in source and source["suites"] != "all":
            scenario.suites = tuple(source["suites"])
        if "name" in source:
            scenario.name = source["name"]
        return scenario
    if "inputs" not in source:
        raise ConfigInvalid(where, "need 'builtin' or 'inputs'")
    raw = source["inputs"]
    group = load_group(raw["group"], where=f"{where}.inputs.group") if "group" in raw else None
    inputs = ScenarioInputs(group=group)
    for name, item in (raw.get("u1_cocycles") or {}).items():
        loaded = load_cocycle(item, group=group, where=f"{where}.inputs.u1_cocycles.{name}")
        if isinstance(loaded, BilinearCocycle):
            inputs.bilinear.append((name, loaded))
        else:
            inputs.u1_cocycles.append((name, loaded))
    for name, item in (raw.get("real_cocycles") or {}).items():
        inputs.real_cocycles.append(
            (name, load_cocycle(item, group=group, where=f"{where}.inputs.real_cocycles.{name}")))
    for name, item in (raw.get("bundles") or {}).items():
        inputs.bundles.append((name, load_bundle(item, where=f"{where}.inputs.bundles.{name}")))
    for name, item in (raw.get("triples") or {}).items():
        inputs.triples.append((name, load_triple(item, where=f"{where}.inputs.triples.{name}")))
    suites = source.get("suites", "all")
    if suites == "all":
        suites = ("cocycle", "tga", "deform", "crossed", "k0", "triple")
    scenario = Scenario(source.get("name", "custom"), inputs, tuple(suites), seed=seed,
                        tolerances=tolerances)
    if grid is not None:
        scenario.theta_grid = grid
    return scenario


def save_cocycle(cocycle, path) -> None:
    if isinstance(cocycle, TwoCocycleU1):
        payload = {
            "kind": "cocycle",
            "target": "u1",
            "group": {"kind": "group", "cayley": cocycle.group.cayley.tolist(),
                      "name": cocycle.group.name},
            "table": [[[float(v.real), float(v.imag)] for v in row]
                      for row in cocycle.table],
        }
    elif isinstance(cocycle, TwoCocycleReal):
        payload = {
            "kind": "cocycle",
            "target": "real",
            "group": {"kind": "group", "cayley": cocycle.group.cayley.tolist(),
                      "name": cocycle.group.name},
            "table": [[float(v) for v in row] for row in cocycle.table],
        }
    else:
        raise InputInvalid(f"cannot serialize {type(cocycle)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
