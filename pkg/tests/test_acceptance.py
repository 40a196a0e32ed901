"""Acceptance criteria, one test each.

Every test records a verdict line before asserting; the lines are printed in
the terminal summary (see ``conftest.py``).
"""

import itertools
from pathlib import Path

import numpy as np

import acceptance_log
from loops import octagon_loop, one_axis_spec, quadratic_time, square_loop
from torusquant.cli import main
from torusquant.holonomy import (
    PerturbationSpec,
    TruncationBox,
    abelian_closed_form,
    commute_check,
    convergence_order,
    evolve_U2,
    interior_deviation,
    reparametrize_check,
)
from torusquant.prequantum import ConnectionParams, curvature_residual, prequant_dirac_residual
from torusquant.representation import (
    RepresentationParams,
    action_operator,
    adjoint,
    commutator,
    dirac_residual,
    gauge_intertwine_check,
    quantize_affine,
    twist_reduce,
)
from torusquant.sampling import random_affine, random_rep, random_series, random_taylor
from torusquant.spectra import (
    HamiltonianSpec,
    diagonal_band,
    hamiltonian_operator,
    quantize_hamiltonian,
    window_labels,
)


def check(number, title, value, tol):
    ok = bool(value <= tol)
    acceptance_log.record(number, title, ok, f"max {value:.3e} (tolerance {tol:.0e})")
    assert ok, f"criterion {number}: {value} > {tol}"


def random_polynomial(rng, dim, degree, n_terms=4, axes=None):
    axes = list(range(dim)) if axes is None else list(axes)
    terms = {}
    for _ in range(n_terms):
        powers = [0] * dim
        for _ in range(int(rng.integers(0, degree + 1))):
            powers[axes[int(rng.integers(0, len(axes)))]] += 1
        terms[tuple(powers)] = float(rng.uniform(-1, 1))
    return HamiltonianSpec(dim, terms)


def test_01_action_eigenvalue_law():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 4))
        rep = random_rep(rng, m)
        for k in range(m):
            band = action_operator(k, rep).band((0,) * m)
            for n in window_labels(m, 3):
                worst = max(worst, abs(band(n) - (n[k] + rep.eps[k] - rep.lam[k])))
    check(1, "action eigenvalue law", worst, 1e-14)


def test_02_dirac_polarized():
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(1, 4))
        rep = random_rep(rng, m)
        f, g = random_affine(rng, m, 3), random_affine(rng, m, 3)
        worst = max(worst, dirac_residual(f, g, rep).max_abs_coeff())
        comm = commutator(quantize_affine(f, rep), quantize_affine(g, rep))
        worst = max(worst, comm.max_abs_coeff(min_degree=2))
    check(2, "Dirac condition, polarized (incl. quadratic terms)", worst, 1e-12)


def test_03_dirac_prequantum():
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 4))
        lam = ConnectionParams(tuple(rng.uniform(-2, 2, m)))
        f, g, s = (random_taylor(rng, m, int(rng.integers(0, 3)), 2, max_degree=6) for _ in range(3))
        worst = max(worst, prequant_dirac_residual(f, g, lam, s).max_abs_coeff())
    check(3, "Dirac condition, prequantum", worst, 1e-12)


def test_04_hermiticity():
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 4))
        rep = random_rep(rng, m)
        P = quantize_affine(random_affine(rng, m, 3), rep)
        worst = max(worst, (adjoint(P) - P).max_abs_coeff())
    check(4, "Hermiticity of real observables", worst, 1e-12)


def test_05_curvature():
    rng = np.random.default_rng(105)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 4))
        worst = max(worst, curvature_residual(ConnectionParams(tuple(rng.uniform(-5, 5, m)))).max_abs_coeff())
    check(5, "curvature equals the symplectic form", worst, 0.0)


def test_06_gauge_conjugation():
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 4))
        d = tuple(int(x) for x in rng.integers(-2, 3, m))
        res = gauge_intertwine_check(random_affine(rng, m, 3), random_rep(rng, m), d)
        worst = max(worst, res.max_abs_coeff())
    check(6, "gauge conjugation", worst, 1e-12)


def test_07_twist_equivalence():
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 4))
        lam = tuple(rng.uniform(-2, 2, m))
        f = random_affine(rng, m, 3)
        for eps in itertools.product((0.0, 0.5), repeat=m):
            rep = RepresentationParams(lam, eps)
            diff = quantize_affine(f, rep) - quantize_affine(f, twist_reduce(rep))
            worst = max(worst, diff.max_abs_coeff())
    check(7, "twist equivalence over all patterns", worst, 1e-12)


def test_08_enveloping_consistency():
    rng = np.random.default_rng(108)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 4))
        H = random_polynomial(rng, m, 3)
        rep = random_rep(rng, m)
        band = diagonal_band(hamiltonian_operator(H, rep))
        D = quantize_hamiltonian(H, rep)
        worst = max(worst, max(abs(band(n) - D.eigenvalue(n)) for n in window_labels(m, 4)))
    check(8, "enveloping-algebra consistency (N=4)", worst, 1e-12)


def test_09_commutation():
    rng = np.random.default_rng(109)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(2, 4))
        perm = rng.permutation(m)
        cut = int(rng.integers(1, m))
        a_idx, b_idx = tuple(sorted(perm[:cut].tolist())), sorted(perm[cut:].tolist())
        H = random_polynomial(rng, m, 3, axes=b_idx)
        p = int(rng.integers(1, 3))
        spec = PerturbationSpec(m, a_idx, p)
        table = [[random_series(rng, m, 3, axes=a_idx) for _ in range(p)] for _ in a_idx]
        res = commute_check(H, spec, np.zeros(p), rng.uniform(-1, 1, p), random_rep(rng, m), table)
        worst = max(worst, res.max_abs_coeff())
    check(9, "perturbation commutes with the Hamiltonian", worst, 1e-12)


def test_10_holonomy_oracle():
    spec = one_axis_spec()
    rep = RepresentationParams((0.3,), (0.5,))
    results = []

    abelian = square_loop()
    box = TruncationBox.cube(1, 6, 1)
    U = evolve_U2(spec, abelian, rep, box, 200)
    closed = interior_deviation(U, abelian_closed_form(spec, abelian, rep, box), box)
    results.append(("abelian closed form @200", closed, closed <= 1e-10, "1e-10"))

    loop = octagon_loop(0.3)
    box = TruncationBox.cube(1, 6, 2)
    ref = evolve_U2(spec, loop, RepresentationParams((0.2,)), box, 2000)
    errs = {n: interior_deviation(evolve_U2(spec, loop, RepresentationParams((0.2,)), box, n), ref, box)
            for n in (10, 100)}
    order = convergence_order(errs)
    results.append(("midpoint order", order, 1.8 <= order <= 2.2, "[1.8, 2.2]"))

    square = square_loop(0.3)
    reparam = reparametrize_check(spec, square, quadratic_time(), rep, box, 1000)
    results.append(("reparametrization @1000", reparam, reparam <= 1e-8, "1e-8"))

    U = evolve_U2(spec, square, rep, box, 200)
    V = evolve_U2(spec, square.reversed(), rep, box, 200)
    back = interior_deviation(V @ U, np.eye(box.size), box)
    results.append(("reversed loop", back, back <= 1e-8, "1e-8"))

    ok = all(r[2] for r in results)
    detail = "; ".join(f"{name} {value:.3e} ({bound})" for name, value, _, bound in results)
    acceptance_log.record(10, "holonomy oracle", ok, detail)
    assert ok, detail


def test_11_determinism(tmp_path):
    configs = Path(__file__).resolve().parents[1] / "configs"
    identical = True
    for command, name in (("dirac-sweep", "dirac_sweep.json"), ("equivalence", "equivalence.json"),
                          ("holonomy", "holonomy_refine.json"), ("spectrum", "spectrum_2d.json")):
        outs = []
        for j in range(2):
            out = tmp_path / f"{command}-{j}.jsonl"
            main([command, str(configs / name), "--out", str(out), "--seed", "11"])
            outs.append(out.read_bytes())
        identical = identical and outs[0] == outs[1]
    acceptance_log.record(11, "determinism", identical,
                          "byte-identical reports" if identical else "reports differ")
    assert identical
