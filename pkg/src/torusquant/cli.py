"""Command-line front end: ``torusquant <command> CONFIG [--out PATH] [--seed N]``.

Commands read a JSON run configuration (validated against
``schema/run_config.schema.json``), run the corresponding checks and emit
line-delimited JSON records plus a plain-text summary. Exit status is 0 when
every residual is within tolerance, 1 otherwise and 2 on configuration
errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .fourier import FourierSeries
from .holonomy import (
    MarginError,
    ParameterPath,
    PathError,
    PerturbationError,
    PerturbationSpec,
    TruncationBox,
    abelian_closed_form,
    convergence_order,
    evolve_U2,
    interior_deviation,
    interior_unitarity_defect,
    is_angle_independent,
)
from .poisson import AffineObservable
from .representation import (
    RepresentationParams,
    dirac_residual,
    gauge_intertwine_check,
    quantize_affine,
    twist_reduce,
)
from .sampling import random_affine
from .spectra import (
    AnalyticDomainError,
    HamiltonianSpec,
    degeneracy_table,
    diagonal_band,
    hamiltonian_operator,
    quantize_hamiltonian,
    spectrum_window,
)

DEFAULT_TOLERANCES = {
    "residual": 1e-12,
    "degeneracy": 1e-9,
    "unitarity": 1e-8,
    "closed_form": 1e-10,
    "order_min": 1.8,
    "order_max": 2.2,
}

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Configuration rejected before or during dispatch."""


def load_schema() -> dict:
    text = resources.files("torusquant").joinpath("schema/run_config.schema.json").read_text()
    return json.loads(text)


def validate_config(config: dict) -> dict:
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {exc.message}") from None
    m = config["dimension"]
    rep = config["representation"]
    if len(rep["lambda"]) != m or len(rep.get("epsilon", [0] * m)) != m:
        raise ConfigError(f"representation vectors must have length {m}")
    return config


def load_config(path: str | Path) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return validate_config(config)


def _tolerances(config: dict) -> dict:
    return {**DEFAULT_TOLERANCES, **config.get("tolerances", {})}


def _rep(config: dict) -> RepresentationParams:
    r = config["representation"]
    return RepresentationParams(tuple(r["lambda"]), tuple(r.get("epsilon", [0] * len(r["lambda"]))))


def _affine(record: dict, m: int) -> AffineObservable:
    if len(record["a"]) != m:
        raise ConfigError(f"affine observable needs {m} a-series")
    try:
        return AffineObservable.from_record(record, m)
    except ValueError as exc:
        raise ConfigError(f"bad observable: {exc}") from None


@dataclass
class Report:
    command: str
    config: dict
    tolerances: dict
    cases: list[dict] = field(default_factory=list)
    extra: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def check(self, case: dict, name: str, value: float, tol: float) -> None:
        case.setdefault("checks", []).append(
            {"name": name, "value": float(value), "tolerance": float(tol), "passed": bool(value <= tol)})

    def check_range(self, case: dict, name: str, value: float, lo: float, hi: float) -> None:
        case.setdefault("checks", []).append(
            {"name": name, "value": float(value), "range": [float(lo), float(hi)],
             "passed": bool(lo <= value <= hi)})

    @property
    def max_residual(self) -> float:
        return max((c["value"] for case in self.cases for c in case.get("checks", [])
                    if "tolerance" in c), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for case in self.cases for c in case.get("checks", []))

    def records(self) -> list[dict]:
        out = [{"record": "command", "command": self.command, "config": self.config,
                "tolerances": self.tolerances}]
        out += [{"record": "case", "index": i, **case} for i, case in enumerate(self.cases)]
        out += self.extra
        out.append({"record": "summary", "cases": len(self.cases), "max_residual": self.max_residual,
                    "verdict": "pass" if self.passed else "fail", **self.summary})
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())

    def summary_table(self) -> str:
        lines = [f"command: {self.command}", f"{'case':>6}  {'check':<28}{'value':>14}{'tol':>12}  ok"]
        for i, case in enumerate(self.cases):
            for c in case.get("checks", []):
                bound = f"{c['tolerance']:>12.1e}" if "tolerance" in c else \
                    f"{c['range'][0]:>5.2f}..{c['range'][1]:<5.2f}"
                lines.append(f"{i:>6}  {c['name']:<28}{c['value']:>14.3e}{bound}  "
                             f"{'yes' if c['passed'] else 'NO'}")
        lines.append(f"cases: {len(self.cases)}  max residual: {self.max_residual:.3e}  "
                     f"verdict: {'PASS' if self.passed else 'FAIL'}  wall time: {self.wall_time:.3f}s")
        return "\n".join(lines)


def run_spectrum(config: dict) -> Report:
    if "hamiltonian" not in config:
        raise ConfigError("spectrum needs a 'hamiltonian' block")
    m = config["dimension"]
    tol = _tolerances(config)
    report = Report("spectrum", config, tol)
    block = config["hamiltonian"]
    if any(len(t["powers"]) != m for t in block["terms"]):
        raise ConfigError(f"Hamiltonian powers must have length {m}")
    H = HamiltonianSpec.from_records(m, block["terms"], block.get("analytic"))
    rep = _rep(config)
    N = config.get("window", 0)
    D = quantize_hamiltonian(H, rep)
    try:
        window = spectrum_window(D, N)
    except AnalyticDomainError as exc:
        raise ConfigError(str(exc)) from None
    report.extra += [{"record": "eigenvalue", "n": list(n), "value": v} for v, n in window]
    table = degeneracy_table(D, N, tol["degeneracy"])
    report.extra += [{"record": "degeneracy", "value": v, "multiplicity": k} for v, k in table.items()]
    case = {"kind": "spectrum", "window": N, "size": len(window)}
    if H.is_polynomial():
        band = diagonal_band(hamiltonian_operator(H, rep))
        resid = max((abs(band(n) - v) for v, n in window), default=0.0)
        report.check(case, "enveloping_vs_lazy", resid, tol["residual"])
    report.cases.append(case)
    report.summary = {"distinct_values": len(table)}
    return report


def run_dirac_sweep(config: dict) -> Report:
    m = config["dimension"]
    tol = _tolerances(config)
    report = Report("dirac-sweep", config, tol)
    rep = _rep(config)
    pairs = [(_affine(p["f"], m), _affine(p["g"], m)) for p in config.get("pairs", [])]
    sweep = config.get("sweep", {"size": 0})
    rng = np.random.default_rng(config.get("seed", 0))
    radius, modes = sweep.get("support_radius", 3), sweep.get("modes", 3)
    for _ in range(sweep["size"]):
        pairs.append((random_affine(rng, m, radius, modes), random_affine(rng, m, radius, modes)))
    for f, g in pairs:
        res = dirac_residual(f, g, rep)
        case = {"kind": "dirac", "degree": res.degree()}
        report.check(case, "dirac_residual", res.max_abs_coeff(), tol["residual"])
        report.check(case, "quadratic_terms", res.max_abs_coeff(min_degree=2), tol["residual"])
        report.cases.append(case)
    return report


def run_equivalence_checks(config: dict) -> Report:
    m = config["dimension"]
    tol = _tolerances(config)
    report = Report("equivalence", config, tol)
    rep = _rep(config)
    block = config.get("equivalence", {})
    shifts = [tuple(d) for d in block.get("shifts", [[1] * m])]
    twists = [tuple(e) for e in block.get("twists", itertools.product((0, 0.5), repeat=m))]
    if any(len(d) != m for d in shifts) or any(len(e) != m for e in twists):
        raise ConfigError(f"shift and twist vectors must have length {m}")
    observables = [_affine(o, m) for o in block.get("observables", [])]
    rng = np.random.default_rng(config.get("seed", 0))
    radius = block.get("support_radius", 2)
    observables += [random_affine(rng, m, radius) for _ in range(block.get("random", 5))]
    for j, f in enumerate(observables):
        for d in shifts:
            case = {"kind": "gauge", "observable": j, "shift": list(d)}
            report.check(case, "gauge_residual", gauge_intertwine_check(f, rep, d).max_abs_coeff(),
                         tol["residual"])
            report.cases.append(case)
        for eps in twists:
            twisted = RepresentationParams(rep.lam, eps)
            reduced = twist_reduce(twisted)
            diff = quantize_affine(f, twisted) - quantize_affine(f, reduced)
            case = {"kind": "twist", "observable": j, "epsilon": list(eps),
                    "reduced_lambda": list(reduced.lam)}
            report.check(case, "twist_residual", diff.max_abs_coeff(), tol["residual"])
            report.cases.append(case)
    return report


def _holonomy_inputs(config: dict):
    m = config["dimension"]
    block = config["holonomy"]
    p = block["params"]
    try:
        spec = PerturbationSpec(m, tuple(block["a_indices"]), p)
        nodes = block["nodes"]
        if any(len(nd["xi"]) != p for nd in nodes):
            raise ConfigError(f"every node needs {p} parameter values")
        tables = [[[FourierSeries.from_records(s, m) for s in row] for row in nd["Lambda"]]
                  for nd in nodes]
        for table in tables:
            spec.validate(table)
        path = ParameterPath([nd["t"] for nd in nodes], [nd["xi"] for nd in nodes],
                             block.get("closed", False), tables)
        box = TruncationBox(tuple(block["box"]["radius"]), tuple(block["box"]["margin"]))
    except (PerturbationError, PathError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if box.dim != m:
        raise ConfigError(f"box vectors must have length {m}")
    return spec, path, box


def run_holonomy(config: dict) -> Report:
    if "holonomy" not in config:
        raise ConfigError("holonomy needs a 'holonomy' block")
    tol = _tolerances(config)
    report = Report("holonomy", config, tol)
    spec, path, box = _holonomy_inputs(config)
    rep = _rep(config)
    block = config["holonomy"]
    steps = block.get("steps", 100)
    try:
        U = evolve_U2(spec, path, rep, box, steps)
    except MarginError as exc:
        raise ConfigError(str(exc)) from None
    defect = interior_unitarity_defect(U, box)
    case = {"kind": "holonomy", "steps": steps}
    report.check(case, "interior_unitarity_defect", defect, tol["unitarity"])
    if all(is_angle_independent(t) for t in path.tables):
        C = abelian_closed_form(spec, path, rep, box)
        report.check(case, "abelian_closed_form", interior_deviation(U, C, box), tol["closed_form"])
    report.cases.append(case)
    if "refine" in block:
        n1, n2 = sorted(block["refine"])
        ref = evolve_U2(spec, path, rep, box, 10 * n2)
        errors = {n: float(np.linalg.norm(evolve_U2(spec, path, rep, box, n) - ref, 2)) for n in (n1, n2)}
        ratio = errors[n1] / errors[n2] if errors[n2] > 0 else float("inf")
        order = convergence_order(errors) if errors[n2] > 0 else float("inf")
        ref_case = {"kind": "refinement", "steps": [n1, n2], "reference_steps": 10 * n2,
                    "errors": [errors[n1], errors[n2]], "defect_ratio": ratio, "order": order}
        report.check_range(ref_case, "convergence_order", order, tol["order_min"], tol["order_max"])
        report.cases.append(ref_case)
    labels = box.labels()
    if block.get("emit_matrix", True):
        report.extra += [{"record": "u2_row", "label": labels[i].tolist(),
                          "re": U[i].real.tolist(), "im": U[i].imag.tolist()} for i in range(box.size)]
    report.summary = {"interior_unitarity_defect": defect, "steps": steps, "box": box.to_record()}
    return report


COMMANDS = {
    "spectrum": run_spectrum,
    "dirac-sweep": run_dirac_sweep,
    "equivalence": run_equivalence_checks,
    "holonomy": run_holonomy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusquant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a JSON run configuration")
        p.add_argument("--out", help="write JSON-lines records here (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
    return parser


def run(command: str, config: dict) -> Report:
    start = time.perf_counter()
    report = COMMANDS[command](config)
    report.wall_time = time.perf_counter() - start
    return report


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
            validate_config(config)
        report = run(args.command, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(report.to_jsonl())
        print(report.summary_table())
    else:
        sys.stdout.write(report.to_jsonl())
        print(report.summary_table(), file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
