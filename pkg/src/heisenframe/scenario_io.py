"""Scenario JSON documents: a mode registry, a gate list and an optional state.

Example::

    {
      "modes": [{"species": "photon", "site": "L", "cutoff": 2},
                {"species": "photon", "site": "R", "cutoff": 2}],
      "gates": [{"type": "beam_splitter", "sites": ["L", "R"]},
                {"type": "phase_shift", "sites": ["L"], "phi": 1.5707963267948966},
                {"type": "beam_splitter", "sites": ["L", "R"]}],
      "state": [{"occupations": [1, 0], "amplitude": 1.0}]
    }

Complex numbers are written as ``[re, im]`` pairs or plain reals.  The full
schema is ``SCENARIO_SCHEMA`` (also shipped as docs/scenario.schema.json).
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from . import descriptors as dsc
from . import fock
from .errors import HeisenframeError, ScenarioError

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_SPECIES = {"enum": [s.value for s in fock.Species]}
_SPECIES_LIST = {"type": "array", "items": _SPECIES, "minItems": 1, "uniqueItems": True}


def _gate(kind: str, n_sites: int | None, extra: dict, required: list[str]) -> dict:
    sites = {"type": "array", "items": {"type": "string"}, "minItems": 1}
    if n_sites is not None:
        sites = {**sites, "minItems": n_sites, "maxItems": n_sites}
    return {
        "type": "object",
        "properties": {"type": {"const": kind}, "sites": sites, **extra},
        "required": ["type", "sites", *required],
        "additionalProperties": False,
    }


GATE_TYPES = ("beam_splitter", "phase_shift", "charge_rotation", "custom")

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "heisenframe scenario",
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "modes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "species": _SPECIES,
                    "site": {"type": "string", "minLength": 1},
                    "cutoff": {"type": "integer", "minimum": 1},
                },
                "required": ["species", "site"],
                "additionalProperties": False,
            },
        },
        "gates": {
            "type": "array",
            "items": {
                "oneOf": [
                    _gate("beam_splitter", 2, {"species": _SPECIES_LIST}, []),
                    _gate("phase_shift", 1, {"phi": {"type": "number"}, "species": _SPECIES_LIST}, ["phi"]),
                    _gate("charge_rotation", 1, {"phi": {"type": "number"}}, ["phi"]),
                    _gate(
                        "custom",
                        None,
                        {
                            "species": _SPECIES,
                            "matrix": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
                        },
                        ["species", "matrix"],
                    ),
                ]
            },
        },
        "state": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "occupations": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "amplitude": _COMPLEX,
                },
                "required": ["occupations"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["modes", "gates"],
    "additionalProperties": False,
}


def _complex(value) -> complex:
    return complex(value[0], value[1]) if isinstance(value, list) else complex(value)


def _mode(entry: dict) -> fock.ModeSpec:
    species = fock.Species(entry["species"])
    if species is fock.Species.PHOTON:
        return fock.photon(entry["site"], entry.get("cutoff", 2))
    if "cutoff" in entry:
        raise ScenarioError(f"fermionic mode {species.value}:{entry['site']} takes no cutoff")
    return fock.ModeSpec(fock.ModeId(species, entry["site"]), fock.Statistics.FERMI)


def _build_gate(entry: dict) -> dsc.PassiveGate:
    kind = entry["type"]
    sites = entry["sites"]
    if kind == "beam_splitter":
        return dsc.BeamSplitter(sites[0], sites[1], entry.get("species", ["photon"]))
    if kind == "phase_shift":
        return dsc.PhaseShift(sites[0], entry["phi"], entry.get("species", ["photon"]))
    if kind == "charge_rotation":
        return dsc.ChargeRotation(sites[0], entry["phi"])
    matrix = [[_complex(z) for z in row] for row in entry["matrix"]]
    return dsc.Custom(entry["species"], tuple(sites), matrix)


def parse_scenario(doc: dict) -> tuple[dsc.Circuit, fock.StateVector | None]:
    """Validate a decoded document and build its circuit and (optional) state."""
    if isinstance(doc, dict):
        for i, gate in enumerate(doc.get("gates") or []):
            if isinstance(gate, dict) and gate.get("type") not in GATE_TYPES:
                raise ScenarioError(f"gate {i}: unknown type {gate.get('type')!r}")
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ScenarioError(f"schema error at {where}: {exc.message}") from exc
    try:
        space = fock.build_space(_mode(m) for m in doc["modes"])
        circuit = dsc.Circuit(space, [_build_gate(g) for g in doc["gates"]])
        state = None
        if "state" in doc:
            state = fock.superpose(
                (_complex(t.get("amplitude", 1.0)), fock.basis_state(space, t["occupations"]))
                for t in doc["state"]
            )
    except HeisenframeError as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc
    return circuit, state


def read_scenario(path: str | Path) -> tuple[dsc.Circuit, fock.StateVector | None]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ScenarioError(f"scenario file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(doc)


def load_scenario(path: str | Path) -> dsc.Circuit:
    return read_scenario(path)[0]


def dump_circuit(circuit: dsc.Circuit) -> dict:
    """Inverse of ``parse_scenario`` for library gates (raw unitaries are not serializable)."""
    modes = []
    for spec in circuit.space.modes:
        entry = {"species": spec.id.species.value, "site": spec.id.site}
        if not spec.is_fermi:
            entry["cutoff"] = spec.cutoff
        modes.append(entry)
    gates = []
    for g in circuit.gates:
        if isinstance(g, dsc.BeamSplitter):
            gates.append({"type": "beam_splitter", "sites": [g.site_a, g.site_b],
                          "species": sorted(s.value for s in g.species)})
        elif isinstance(g, dsc.PhaseShift):
            gates.append({"type": "phase_shift", "sites": [g.site], "phi": g.phi,
                          "species": sorted(s.value for s in g.species)})
        elif isinstance(g, dsc.ChargeRotation):
            gates.append({"type": "charge_rotation", "sites": [g.site], "phi": g.phi})
        elif isinstance(g, dsc.Custom):
            gates.append({"type": "custom", "species": g.species.value, "sites": list(g.sites),
                          "matrix": [[[z.real, z.imag] for z in row] for row in g.matrix.tolist()]})
        else:
            raise ScenarioError(f"{g.label} cannot be serialized")
    return {"modes": modes, "gates": gates}
