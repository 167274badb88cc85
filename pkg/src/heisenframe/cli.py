"""Command-line front end.

Exit codes: 0 success, 1 a physics check failed, 2 invalid input.
Results go to stdout (CSV or JSON); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config, fock
from . import descriptors as dsc
from . import scenarios as sc
from . import superselection as ss
from .errors import ConsistencyError, HeisenframeError, ScenarioError
from .scenario_io import read_scenario

log = logging.getLogger("heisenframe")

COMMANDS = ("boson-mz", "fermion-mz", "wigner", "audit", "equivalence", "run")


@dataclass
class RunConfig:
    command: str
    phi_min: float = 0.0
    phi_max: float = 2 * math.pi
    steps: int = 33
    cutoff: int = 2
    format: str = "csv"
    seed: int = 0
    scenario_path: str | None = None
    tolerances: config.Tolerances = field(default_factory=config.Tolerances)
    charge: float = 1.0
    pre_splitter: bool = False
    phi: float = math.pi / 2
    inject_violation: str | None = None
    trials: int = 100
    max_gates: int = 10

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        tols = config.Tolerances(
            expectation=ns.tol_expectation,
            operator=ns.tol_operator,
            exact=config.DEFAULT.exact,
            synthesis=config.DEFAULT.synthesis,
        )
        known = {f for f in cls.__dataclass_fields__} - {"tolerances"}
        kwargs = {k: v for k, v in vars(ns).items() if k in known and v is not None}
        return cls(tolerances=tols, **kwargs)


def fmt(x: float) -> str:
    """12 significant digits, locale-free; values below 1e-15 in magnitude print as 0."""
    x = float(x)
    if abs(x) < 1e-15:
        return "0"
    return format(x, ".12g")


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _emit_json(payload: dict, out) -> None:
    json.dump(payload, out, indent=2, sort_keys=False)
    out.write("\n")


# -- commands --------------------------------------------------------------------

def cmd_boson_mz(cfg: RunConfig, out) -> int:
    records = sc.sweep(sc.BOSON, cfg.phi_min, cfg.phi_max, cfg.steps, cutoff=cfg.cutoff,
                       tol=cfg.tolerances)
    tol = cfg.tolerances.expectation
    bad = [r.phi for r in records
           if abs(r.n_left - math.cos(r.phi / 2) ** 2) >= tol
           or abs(r.n_right - math.sin(r.phi / 2) ** 2) >= tol
           or abs(r.a_squared_left - 1 - 2 * r.n_left) >= tol]
    if cfg.format == "csv":
        _emit_csv(["phi", "n_left", "n_right", "a2_left"],
                  [(r.phi, r.n_left, r.n_right, r.a_squared_left) for r in records], out)
    else:
        _emit_json({"scenario": sc.BOSON, "passed": not bad,
                    "records": [r.to_dict() for r in records]}, out)
    if bad:
        log.error("bosonic fringe mismatch at phi = %s", bad)
        return 1
    return 0


def cmd_fermion_mz(cfg: RunConfig, out) -> int:
    records = sc.sweep(sc.FERMION, cfg.phi_min, cfg.phi_max, cfg.steps, charge=cfg.charge,
                       pre_splitter=cfg.pre_splitter, tol=cfg.tolerances)
    tol = cfg.tolerances.expectation
    bad = [r.phi for r in records
           if abs(r.j0_left + cfg.charge * math.cos(r.phi / 2) ** 2) >= tol
           or abs(r.j0_right + cfg.charge * math.sin(r.phi / 2) ** 2) >= tol]
    if cfg.format == "csv":
        _emit_csv(["phi", "j0_left", "j0_right", "coherence"],
                  [(r.phi, r.j0_left, r.j0_right, r.coherence) for r in records], out)
    else:
        _emit_json({"scenario": sc.FERMION, "charge": cfg.charge, "passed": not bad,
                    "records": [r.to_dict() for r in records]}, out)
    if bad:
        log.error("fermionic fringe mismatch at phi = %s", bad)
        return 1
    return 0


def cmd_wigner(cfg: RunConfig, out) -> int:
    report = ss.wigner_demo(tol=cfg.tolerances.operator)
    data = report.to_dict()
    if cfg.format == "csv":
        _emit_csv(list(data), [list(data.values())], out)
    else:
        _emit_json(data, out)
    tol = cfg.tolerances.operator
    ok = (abs(report.expectation_without - 1) < tol and abs(report.expectation_with + 1) < tol
          and report.descriptor_flip_residual < cfg.tolerances.exact and report.signalling_detected)
    if not ok:
        log.error("signalling demo did not reproduce the expected flip")
    return 0 if ok else 1


def _circuit_for(cfg: RunConfig) -> tuple[dsc.Circuit, fock.StateVector | None]:
    if cfg.scenario_path:
        return read_scenario(cfg.scenario_path)
    space = sc.photon_pair_space(cfg.cutoff)
    return sc.mz_circuit(space, cfg.phi), fock.basis_state(space, (1, 0))


def cmd_audit(cfg: RunConfig, out) -> int:
    circuit, _ = _circuit_for(cfg)
    if cfg.inject_violation:
        try:
            mode = fock.ModeId.parse(cfg.inject_violation)
            u = ss.parity_violating_unitary(circuit.space, mode)
        except HeisenframeError as exc:
            raise ScenarioError(f"--inject-violation: {exc}") from exc
        circuit = circuit.then(dsc.RawUnitary(u, {mode}, "parity_violation"))
    report = sc.locality_audit(circuit, cfg.tolerances.operator)
    if cfg.format == "csv":
        rows = [(g.index, g.gate, ";".join(g.support),
                 "" if g.descriptor_deviation is None else float(g.descriptor_deviation),
                 float(g.conjugation_deviation), g.worst_operator or "", str(g.passed).lower())
                for g in report.gates]
        _emit_csv(["index", "gate", "support", "descriptor_deviation",
                   "conjugation_deviation", "worst_operator", "passed"], rows, out)
    else:
        _emit_json(report.to_dict(), out)
    if not report.passed:
        log.error("locality audit failed")
        return 1
    return 0


def _standard_observables(space: fock.FockSpace) -> list[tuple[str, fock.MatrixOperator]]:
    obs = [(f"n[{m}]", fock.number_op(space, m)) for m in space.mode_ids]
    sites = {m.site for m in space.modes_of(fock.Species.ELECTRON)} & {
        m.site for m in space.modes_of(fock.Species.POSITRON)}
    obs += [(f"j0[{s}]", ss.charge_density_op(space, s)) for s in sorted(sites)]
    return obs


def cmd_equivalence(cfg: RunConfig, out) -> int:
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.tolerances.expectation
    rows = []
    if cfg.scenario_path:
        circuit, state = read_scenario(cfg.scenario_path)
        state = state or sc.random_admissible_state(circuit.space, rng)
        obs = [op for _, op in _standard_observables(circuit.space)]
        rows.append((0, "scenario", len(circuit), sc.picture_equivalence(circuit, state, obs, tol)))
    else:
        spaces = [("dirac", sc.dirac_pair_space()), ("photon", sc.photon_pair_space(3))]
        for trial in range(cfg.trials):
            name, space = spaces[trial % 2]
            circuit = sc.random_circuit(space, int(rng.integers(1, cfg.max_gates + 1)), rng)
            obs = [sc.random_admissible_observable(space, rng) for _ in range(2)]
            state = sc.random_admissible_state(space, rng)
            rows.append((trial, name, len(circuit), sc.picture_equivalence(circuit, state, obs, tol)))
    worst = max(r[3].max_deviation for r in rows)
    passed = all(r[3].passed for r in rows)
    if cfg.format == "csv":
        _emit_csv(["trial", "space", "gates", "max_deviation", "passed"],
                  [(t, n, g, float(r.max_deviation), str(r.passed).lower()) for t, n, g, r in rows], out)
    else:
        _emit_json({"seed": cfg.seed, "max_deviation": worst, "passed": passed, "tolerance": tol,
                    "trials": [{"trial": t, "space": n, "gates": g, "max_deviation": r.max_deviation,
                                "passed": r.passed} for t, n, g, r in rows]}, out)
    if not passed:
        log.error("picture equivalence deviation %.3e exceeds %.1e", worst, tol)
        return 1
    return 0


def cmd_run(cfg: RunConfig, out) -> int:
    if not cfg.scenario_path:
        raise ScenarioError("run needs a scenario file")
    circuit, state = read_scenario(cfg.scenario_path)
    space = circuit.space
    state = state or fock.vacuum(space)
    named = _standard_observables(space)
    unitaries = dsc.circuit_unitaries(circuit)
    table = [
        (t, name, fock.expectation(state, dsc.heisenberg_conjugate(u, op)).real)
        for t, u in enumerate(unitaries) for name, op in named
    ]
    audit = sc.locality_audit(circuit, cfg.tolerances.operator)
    equiv = sc.picture_equivalence(circuit, state, [op for _, op in named], cfg.tolerances.expectation)
    if cfg.format == "csv":
        _emit_csv(["time", "observable", "expectation"], table, out)
    else:
        frames = dsc.run_frame(circuit) if all(map(dsc.is_passive, circuit.gates)) else []
        _emit_json({
            "gates": [g.label for g in circuit.gates],
            "frames": [f.to_dict() for f in frames],
            "expectations": [{"time": t, "observable": n, "value": v} for t, n, v in table],
            "audit": audit.to_dict(),
            "equivalence": equiv.to_dict(),
        }, out)
    ok = audit.passed and equiv.passed
    if not ok:
        log.error("run checks failed: audit=%s equivalence=%s", audit.passed, equiv.passed)
    return 0 if ok else 1


HANDLERS = {
    "boson-mz": cmd_boson_mz,
    "fermion-mz": cmd_fermion_mz,
    "wigner": cmd_wigner,
    "audit": cmd_audit,
    "equivalence": cmd_equivalence,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-expectation", type=float, default=config.DEFAULT.expectation)
    common.add_argument("--tol-operator", type=float, default=config.DEFAULT.operator)
    common.add_argument("-v", "--verbose", action="store_true")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--phi-min", type=float, default=0.0)
    grid.add_argument("--phi-max", type=float, default=2 * math.pi)
    grid.add_argument("--steps", type=int, default=33)

    parser = argparse.ArgumentParser(
        prog="heisenframe",
        description="Heisenberg-picture descriptors for Mach-Zehnder interferometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("boson-mz", parents=[common, grid], help="single-photon fringe sweep")
    p.add_argument("--cutoff", type=int, default=2)

    p = sub.add_parser("fermion-mz", parents=[common, grid], help="single-electron charge-density sweep")
    p.add_argument("--charge", type=float, default=1.0)
    p.add_argument("--pre-splitter", action="store_true",
                   help="start from one electron in L and apply the first splitter explicitly")

    sub.add_parser("wigner", parents=[common], help="parity-violation signalling demo")

    p = sub.add_parser("audit", parents=[common], help="gate-by-gate locality audit")
    p.add_argument("scenario_path", nargs="?", help="scenario JSON (default: bosonic MZ)")
    p.add_argument("--phi", type=float, default=math.pi / 2, help="phase for the default circuit")
    p.add_argument("--cutoff", type=int, default=2)
    p.add_argument("--inject-violation", metavar="MODE",
                   help="append exp(pi/2 (f^dag - f)) on MODE, e.g. electron:L")

    p = sub.add_parser("equivalence", parents=[common], help="Schrodinger vs Heisenberg expectations")
    p.add_argument("scenario_path", nargs="?", help="scenario JSON (default: seeded random circuits)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-gates", type=int, default=10)

    p = sub.add_parser("run", parents=[common], help="evaluate a scenario file")
    p.add_argument("scenario_path")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if ns.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    cfg = RunConfig.from_args(ns)
    buf = io.StringIO()
    try:
        code = HANDLERS[cfg.command](cfg, buf)
    except ConsistencyError as exc:
        log.error("%s", exc)
        return 1
    except (ScenarioError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
