"""Acceptance criteria 1-12; each test records one summary line."""

import itertools
import json
import math
import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import circle_lipschitz_lp, sdp_sup
from toeplitz_triples.bounds import (
    ato0_bound,
    ato0_pairing_check,
    bto0_classify,
    bto0_limit_distance,
    build_bridge,
    check_bridge_pairings,
    check_lineq,
    check_seminorm_sandwich,
    dineq_divergence_check,
    gh_upper_bound_formula,
    lip_limit_spec,
)
from toeplitz_triples.cli import bundled_scenario, main
from toeplitz_triples.core import (
    Params,
    commutator_direct,
    commutator_ext,
    dirac_ext,
    random_element,
    sandwich_factors,
    scaling_identity_check,
    trace_identity_check,
)
from toeplitz_triples.instances import build_circle, build_compacts, check_axioms, even_doubling
from toeplitz_triples.states import (
    SplitState,
    connes_distance,
    delta_state,
    lip_a_spec,
    lip_ext_spec,
    random_state,
)

PARAMS3 = [Params(1, 1), Params(0.5, 1), Params(0.25, 2)]
PARAMS4 = PARAMS3 + [Params(1, 0.5)]


def record(k, ok, detail):
    ACCEPTANCE_LINES.append(f"#{k} {'PASS' if ok else 'FAIL'}: {detail}")


def test_criterion_01_trace_identity():
    start = time.perf_counter()
    worst = 0.0
    for n in (8, 16):
        c = build_circle(n)
        for p in PARAMS3:
            for s in (1, 2, 4):
                rep = trace_identity_check(c, p, s)
                worst = max(worst, abs(rep.context["trace_direct"] - rep.context["trace_formula"]))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    record(1, ok, f"trace identity max |lhs-rhs| = {worst:.2e} (tol 1e-10), {elapsed:.2f} s (limit 5 s)")
    assert ok


def test_criterion_02_block_formula():
    rng = np.random.default_rng(2)
    c = build_circle(8)
    worst = 0.0
    for p in PARAMS4:
        for _ in range(50):
            t = random_element(c, rng)
            worst = max(worst, float(np.max(np.abs(commutator_ext(c, t, p) - commutator_direct(c, t, p)))))
    ok = worst <= 1e-10
    record(2, ok, f"block formula vs direct commutator, 200 elements x 4 params: max dev {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_03_sandwich_and_lineq():
    rng = np.random.default_rng(3)
    c = build_circle(4)
    pairs = list(itertools.combinations(PARAMS4, 2))
    assert len(pairs) == 6
    worst = math.inf
    for _ in range(100):
        t = random_element(c, rng)
        for p, q in pairs:
            for rep in check_seminorm_sandwich(c, t, p, q) + check_lineq(c, t, p) + check_lineq(c, t, q):
                worst = min(worst, rep.slack)
    ok = worst >= -1e-9
    record(3, ok, f"sandwich + symbol/compact bounds, 100 elements x 6 pairs: min slack {worst:.3e} (tol -1e-9)")
    assert ok


def test_criterion_04_scaling_identity():
    c = build_circle(6)
    pairs = [(PARAMS4[i], PARAMS4[j]) for i, j in ((0, 1), (0, 2), (1, 2), (2, 3), (3, 0))]
    worst = max(scaling_identity_check(c, p, q).lhs for p, q in pairs)
    ok = worst <= 1e-10
    record(4, ok, f"scaling identity over 5 pairs: max dev {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_05_solver_vs_oracle():
    rng = np.random.default_rng(5)
    c = build_circle(2)
    spec = lip_ext_spec(c, Params(1, 1))
    assert spec.param.dim <= 9
    start = time.perf_counter()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i in range(10):
            if i < 2:
                phi = delta_state(c, 0.0)
                psi = delta_state(c, math.pi / (i + 1))
            else:
                phi, psi = random_state(c, rng), random_state(c, rng)
            got = connes_distance(phi, psi, spec).value
            f = spec.param.functional(phi) - spec.param.functional(psi)
            ref = sdp_sup(spec, f)
            worst = max(worst, abs(got - ref) / ref)
    elapsed = time.perf_counter() - start
    ok = worst <= 0.01 and elapsed < 60
    record(5, ok, f"solver vs SDP oracle, N=2, 10 pairs: max rel err {worst:.2e} (tol 1e-2), {elapsed:.1f} s (limit 60 s)")
    assert ok


_CIRCLE_CACHE = {}


def _circle_distance(n, theta):
    key = (n, theta)
    if key not in _CIRCLE_CACHE:
        c = build_circle(n)
        res = connes_distance(delta_state(c, 0.0), delta_state(c, theta), lip_a_spec(c),
                              restarts=2, init=[c.potential_coords(0.0, theta)])
        _CIRCLE_CACHE[key] = res.value
    return _CIRCLE_CACHE[key]


THETAS = (math.pi / 4, math.pi / 2, math.pi)


@pytest.mark.slow
def test_criterion_06_circle_geodesic():
    errs = {}
    for th in THETAS:
        oracle = circle_lipschitz_lp(0.0, th)
        assert oracle == pytest.approx(min(th, 2 * math.pi - th), rel=1e-9)
        errs[th] = abs(_circle_distance(32, th) - oracle) / oracle
    seq = [_circle_distance(n, math.pi) for n in (8, 16, 32)]
    mono = all(b >= a for a, b in zip(seq, seq[1:]))
    ok = max(errs.values()) <= 0.05 and mono
    detail = ", ".join(f"{th:.4f}: {e:.2%}" for th, e in errs.items())
    record(6, ok, f"circle N=32 rel err vs arc [{detail}] (tol 5%); "
                  f"delta_0/delta_pi over N=8,16,32 = {[round(x, 5) for x in seq]} nondecreasing={mono}")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="truncated commutators undercount the Lipschitz constant, so short arcs "
                                       "are approached from above as N grows")
def test_circle_monotone_for_short_arcs():
    for th in THETAS[:2]:
        seq = [_circle_distance(n, th) for n in (8, 16, 32)]
        assert all(b >= a for a, b in zip(seq, seq[1:])), (th, seq)


def test_criterion_07_beta_degeneration():
    rng = np.random.default_rng(7)
    c = build_circle(4)
    counts = {"equal": 0, "normal-differs": 0, "base-differs": 0}
    partition_ok = True
    for i in range(50):
        phi = random_state(c, rng)
        kind = i % 3
        if kind == 0:
            psi = phi
        elif kind == 1:
            psi = SplitState(c, phi.weight, phi.normal, random_state(c, rng).base)
        else:
            psi = random_state(c, rng)
        case = bto0_classify(phi, psi)
        fired = [
            phi.same_as(psi),
            np.max(np.abs(phi.normal_functional() - psi.normal_functional())) > 1e-10,
        ]
        fired.append(not fired[0] and not fired[1])
        partition_ok &= sum(fired) == 1
        counts[case] += 1
        val = bto0_limit_distance(phi, psi, lambda m, n: 1.0)
        partition_ok &= (case == "normal-differs") == math.isinf(val)
        if case == "normal-differs" and i < 12:
            partition_ok &= connes_distance(phi, psi, lip_limit_spec(c)).infinite
    phi, psi = random_state(c, rng), random_state(c, rng)
    res = dineq_divergence_check(c, phi, psi, [1.0, 0.5, 0.25, 0.125])
    dineq_ok = not res.degenerate and all(r.passed for r in res.reports) and len(res.reports) == 4
    ok = partition_ok and dineq_ok and min(counts.values()) > 0
    record(7, ok, f"beta->0 partition on 50 pairs {counts}; divergence gamma = {res.gamma:.5f}, "
                  f"bounds gamma/beta = {[round(r.lhs, 5) for r in res.reports]} all exact={dineq_ok}")
    assert ok


def test_criterion_08_alpha_degeneration():
    rng = np.random.default_rng(8)
    c = build_circle(4)
    sigma = delta_state(c, 0.0)
    diam_a, diam_c = 2 * math.pi, 2.0
    states = [random_state(c, rng) for _ in range(20)]
    alphas = (0.5, 0.1, 0.01)
    worst = math.inf
    for alpha in alphas:
        for phi in states:
            rep = ato0_pairing_check(c, phi, Params(alpha, 1), sigma, 1e6, diam_a, diam_c, rng=rng, pool_size=30)
            worst = min(worst, rep.slack)
    bounds = [ato0_bound(a, diam_a, diam_c) for a in alphas]
    linear = np.allclose(np.array(bounds) / np.array(alphas), diam_a + diam_c, rtol=1e-14)
    ok = worst >= -1e-9 and linear
    record(8, ok, f"alpha->0 pairing, 20 states x alpha {alphas}, M=1e6: min slack {worst:.3e}; "
                  f"bound {[round(b, 5) for b in bounds]} linear in alpha={linear}")
    assert ok


def test_criterion_09_bridge():
    rng = np.random.default_rng(9)
    c = build_circle(4)
    p, q = Params(1, 1), Params(0.5, 1)
    lo, hi = sandwich_factors(p, q)
    bridge = build_bridge(lip_ext_spec(c, p), lip_ext_spec(c, q), lo, hi, delta_state(c, 0.0), 1e3)
    reps = check_bridge_pairings(bridge, rng, samples=50)
    worst = max(r.lhs for r in reps)
    pts = [Params(a, b) for a, b in zip(rng.uniform(0.05, 1, 10), rng.uniform(0.05, 1, 10))]
    gh = [gh_upper_bound_formula(x, x, 3.0) for x in pts]
    ok = worst <= 1 + 1e-9 and all(g == 0.0 for g in gh)
    record(9, ok, f"bridge pairings on 50 inputs: max L = {worst:.12f} (limit 1+1e-9); gh(p,p) = 0 at 10 points: {all(g == 0.0 for g in gh)}")
    assert ok


def test_criterion_10_compacts_axioms():
    comp = build_compacts(np.arange(1.0, 33.0))
    rep = check_axioms(comp, samples=5)
    devs = dict(rep.deviations_items())
    prof = [s["tail_norms"] for s in rep.entries["2-order-one"]["samples"]]
    identities_ok = all(v <= 1e-12 for v in devs.values())
    decreasing = all(s["strictly_decreasing"] for s in rep.entries["2-order-one"]["samples"])
    ok = identities_ok and decreasing
    record(10, ok, f"compacts axioms: max identity dev {max(devs.values()):.1e} (tol 1e-12); "
                   f"order-one tail norms strictly decreasing over N=4,8,16 for 5 pairs={decreasing} "
                   f"(first: {[round(x, 4) for x in prof[0]]})")
    assert ok


def test_criterion_11_even_doubling():
    c = build_circle(4)
    worst_spec, worst_anti = 0.0, 0.0
    for p in PARAMS3:
        dbl = even_doubling(c, p)
        ev = np.linalg.eigvalsh(dirac_ext(c, p))
        want = np.sort(np.concatenate([ev, -ev]))
        worst_spec = max(worst_spec, float(np.max(np.abs(np.sort(np.linalg.eigvalsh(dbl.dirac)) - want))))
        worst_anti = max(worst_anti, dbl.anticommutator_defect())
    ok = worst_spec <= 1e-9 and worst_anti == 0.0
    record(11, ok, f"even doubling, 3 pairs: spectrum dev {worst_spec:.1e} (tol 1e-9), anticommutator {worst_anti}")
    assert ok


def test_criterion_12_determinism(tmp_path):
    with bundled_scenario("degeneration-sweep").open() as fh:
        scn = json.load(fh)
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(scn))
    codes = [main(["--scenario", str(path), "--out", str(tmp_path / d), "--seed", "42"]) for d in ("a", "b")]
    a = (tmp_path / "a" / "degeneration-sweep-report.json").read_bytes()
    b = (tmp_path / "b" / "degeneration-sweep-report.json").read_bytes()
    ok = a == b and codes == [0, 0]
    record(12, ok, f"degeneration-sweep twice with seed 42: byte-identical={a == b}, exit codes {codes}")
    assert ok
