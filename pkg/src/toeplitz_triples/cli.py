"""Command-line runner for scenario files.

Usage::

    toeplitz-triples --scenario path.json [--seed 0] [--out ./out]
                     [--tolerance-scale 1.0] [--allow-large]
    toeplitz-triples --list-experiments

Exit status is 0 when every check passes, 1 when a check fails and 2
when the scenario is malformed or names inadmissible parameters.
"""

import argparse
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import bounds, core, instances, states
from .core import Params, validate_params
from .linalg import ValidationError
from .reports import BoundReport, encode_value

EXPERIMENTS = {
    "seminorm": "commutator block formula, symbol/compact bounds and seminorm sandwich on random elements",
    "distance": "spectral distances between the scenario states",
    "sandwich": "distance comparison between parameter pairs on a shared witness pool",
    "bridge": "explicit bridge pairings and the GH bound at coincident parameters",
    "degeneration": "beta -> 0 classification and divergence, alpha -> 0 pairing",
    "sweep": "diameter lower bounds and GH bounds over a parameter grid (CSV)",
    "axioms": "reality/grading identities and order-one profile for the compacts",
    "trace-identity": "trace of |D|^-s against the closed form",
}

MAX_DIM = 400


def load_schema():
    text = resources.files("toeplitz_triples").joinpath("scenario.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


class ScenarioError(Exception):
    pass


def _params(pairs, where):
    out = []
    for i, (a, b) in enumerate(pairs):
        p = Params(float(a), float(b))
        bad = validate_params(p)
        if bad is None and not p.alpha > 0:
            bad = "alpha > 0 required here"
        if bad is not None:
            raise ScenarioError(f"{where}[{i}] = ({a}, {b}) violates {bad}")
        out.append(p)
    return out


def _instance(spec):
    try:
        return instances.instance_from_dict(spec)
    except (ValidationError, core.ParameterError) as exc:
        raise ScenarioError(f"instance: {exc}") from exc


def _matrix_dim(inst):
    if isinstance(inst, instances.CompactsInstance):
        return 2 * inst.n
    if isinstance(inst, instances.PodlesInstance):
        return inst.triple.dim_k
    return inst.dim_k


def _state_net(triple, spec, rng):
    net = []
    for pt in spec.get("deltas", []):
        if isinstance(pt, int):
            net.append(states.delta_state(triple, pt))
        else:
            net.append(states.delta_state(triple, float(pt)))
    for i in spec.get("vectors", []):
        net.append(states.vector_state(triple, int(i)))
    weights = spec.get("weights")
    for j in range(spec.get("random", 0)):
        w = None if not weights else weights[j % len(weights)]
        net.append(states.random_state(triple, rng, weight=w))
    return net


def _solver_kw(scn):
    s = scn.get("solver", {})
    return {"restarts": s.get("restarts", 8), "seed": s.get("seed", 0)}


def _exp_seminorm(triple, scn, exp, rng):
    out = []
    plist = scn["_params"]
    n = exp.get("samples", 20)
    for p in plist:
        worst = 0.0
        for _ in range(n):
            t = core.random_element(triple, rng)
            worst = max(worst, float(np.max(np.abs(core.commutator_ext(triple, t, p) - core.commutator_direct(triple, t, p)))))
            out.extend(bounds.check_lineq(triple, t, p))
        out.append(BoundReport("commutator block formula", worst, 0.0, 1e-10, "commutator-blocks",
                               {"alpha": p.alpha, "beta": p.beta, "samples": n}))
    for i, p in enumerate(plist):
        for q in plist[i + 1 :]:
            for _ in range(n):
                t = core.random_element(triple, rng)
                out.extend(bounds.check_seminorm_sandwich(triple, t, p, q))
            out.append(core.scaling_identity_check(triple, p, q))
    return out


def _spec_for(triple, kind, p):
    if kind == "lip_a":
        return states.lip_a_spec(triple)
    if kind == "lip_c":
        return states.lip_c_spec(triple)
    return states.lip_ext_spec(triple, p)


def _exp_distance(triple, scn, exp, rng):
    out = []
    net = scn["_net"]
    kind = exp.get("seminorm", "lip_ext")
    plist = scn["_params"] if kind == "lip_ext" else [None]
    kw = _solver_kw(scn)
    circle = isinstance(triple, instances.CircleInstance)
    for p in plist:
        spec = _spec_for(triple, kind, p)
        for i in range(len(net)):
            for j in range(i + 1, len(net)):
                init = None
                pts = (net[i].base.argmax(), net[j].base.argmax())
                both_delta = net[i].weight == 1.0 and net[j].weight == 1.0 and net[i].base.max() == 1.0 and net[j].base.max() == 1.0
                if circle and both_delta:
                    th = [float(triple.symbols.grid[k]) for k in pts]
                    if kind == "lip_a":
                        init = [triple.potential_coords(th[0], th[1])]
                res = states.connes_distance(net[i], net[j], spec, init=init, **kw)
                ctx = {"pair": [i, j], "seminorm": kind, "value": res.value, "gap_estimate": res.gap_estimate,
                       "restarts": res.restarts}
                if p is not None:
                    ctx.update(alpha=p.alpha, beta=p.beta)
                if res.infinite:
                    out.append(BoundReport("distance witness", 0.0, 0.0, 0.0, "spectral-distance", dict(ctx)))
                    continue
                out.append(BoundReport("distance witness seminorm", spec.value(res.coords), 1.0, 1e-8,
                                       "spectral-distance", dict(ctx)))
                if circle and both_delta and kind == "lip_a":
                    d = abs(th[0] - th[1]) % (2 * math.pi)
                    arc = min(d, 2 * math.pi - d)
                    rel = exp.get("arc_tolerance", 0.05)
                    out.append(BoundReport("distance below arc length", res.value, arc * (1 + rel), 0.0,
                                           "circle-geodesic", dict(ctx, arc=arc)))
    return out


def _pool(triple, spec_list, net, kw, rng, extra=8):
    pool = []
    for spec in spec_list:
        for i in range(len(net)):
            for j in range(i + 1, len(net)):
                res = states.connes_distance(net[i], net[j], spec, **kw)
                if not res.infinite:
                    pool.append(res.witness)
    pool.extend(core.random_element(triple, rng) for _ in range(extra))
    return pool


def _exp_sandwich(triple, scn, exp, rng):
    plist, net, kw = scn["_params"], scn["_net"], _solver_kw(scn)
    pool = _pool(triple, [states.lip_ext_spec(triple, p) for p in plist], net, kw, rng)
    out = []
    for a, p in enumerate(plist):
        for q in plist[a + 1 :]:
            for i in range(len(net)):
                for j in range(i + 1, len(net)):
                    for r in bounds.check_metric_sandwich(triple, net[i], net[j], p, q, pool):
                        r.context["pair"] = [i, j]
                        out.append(r)
    return out


def _exp_bridge(triple, scn, exp, rng):
    plist = scn["_params"]
    out = []
    sigma = scn["_net"][0] if scn["_net"] else states.delta_state(triple, 0)
    if sigma.weight != 1.0:
        sigma = states.singular_state(triple, sigma.base)
    for a, p in enumerate(plist):
        for q in plist[a + 1 :]:
            lo, hi = core.sandwich_factors(p, q)
            if not lo < hi:
                continue
            # lo L_q <= L_p <= hi L_q
            br = bounds.build_bridge(states.lip_ext_spec(triple, p), states.lip_ext_spec(triple, q),
                                     lo, hi, sigma, exp.get("penalty", 1e6))
            for r in bounds.check_bridge_pairings(br, rng, samples=exp.get("samples", 50)):
                r.context.update(p=[p.alpha, p.beta], q=[q.alpha, q.beta])
                out.append(r)
    for p in plist:
        out.append(BoundReport("GH bound at coincident parameters", bounds.gh_upper_bound_formula(p, p, 1.0), 0.0,
                               1e-12, "gh-bound", {"alpha": p.alpha, "beta": p.beta}))
    return out


def _exp_degeneration(triple, scn, exp, rng):
    out = []
    net, kw = scn["_net"], _solver_kw(scn)
    counts = {"equal": 0, "normal-differs": 0, "base-differs": 0}
    for i in range(len(net)):
        for j in range(len(net)):
            counts[bounds.bto0_classify(net[i], net[j])] += 1
    total = len(net) ** 2
    out.append(BoundReport("beta-limit classification partition", abs(sum(counts.values()) - total), 0.0, 0.0,
                           "beta-limit", {"counts": counts}))
    betas = exp.get("betas", [1.0, 0.5, 0.25, 0.125])
    for i in range(len(net)):
        for j in range(i + 1, len(net)):
            if bounds.bto0_classify(net[i], net[j]) != "normal-differs":
                continue
            res = bounds.dineq_divergence_check(triple, net[i], net[j], betas, **kw)
            for r in res.reports:
                r.context["pair"] = [i, j]
                out.append(r)
            break
    sigma = states.delta_state(triple, 0)
    diam_a = exp.get("diam_a", math.pi)
    for alpha in exp.get("alphas", [0.5, 0.1, 0.01]):
        p = Params(alpha, exp.get("beta", 1.0))
        for k, phi in enumerate(net):
            r = bounds.ato0_pairing_check(triple, phi, p, sigma, exp.get("penalty", 1e6), diam_a,
                                          rng=rng, pool_size=exp.get("pool", 30))
            r.context["state"] = k
            out.append(r)
    return out


def _exp_sweep(triple, scn, exp, rng, out_dir):
    grid = [tuple(g) for g in exp["grid"]]
    net, kw = scn["_net"], _solver_kw(scn)
    pool = [core.random_element(triple, rng) for _ in range(exp.get("pool", 10))]
    witness = None
    for i in range(len(net)):
        for j in range(i + 1, len(net)):
            if bounds.bto0_classify(net[i], net[j]) == "normal-differs":
                witness = bounds.dineq_divergence_check(triple, net[i], net[j], [], **kw)
                break
        if witness is not None:
            break
    rows = bounds.param_space_sweep(triple, grid, net, pool, gamma_witness=witness)
    name = scn.get("name", "scenario")
    bounds.write_sweep_csv(rows, out_dir / f"{name}-sweep.csv")
    out = []
    for row in rows:
        if "error" in row:
            continue
        if witness is not None:
            out.append(BoundReport("parameter-set divergence", witness.gamma / row["beta"], row["diam_lb"],
                                   1e-9 * max(1.0, row["diam_lb"]), "unbounded-vertical",
                                   {"alpha": row["alpha"], "beta": row["beta"]}))
    return out


def _exp_axioms(inst, scn, exp, rng):
    if not isinstance(inst, instances.CompactsInstance):
        raise ScenarioError("experiment 'axioms' needs a compacts instance")
    rep = instances.check_axioms(inst, samples=exp.get("samples", 5), seed=int(rng.integers(2**31)),
                                 truncations=tuple(exp.get("truncations", [4, 8, 16])))
    out = []
    for key, val in rep.deviations_items():
        out.append(BoundReport(f"axiom identity {key}", val, 0.0, 1e-12, "reality-axioms", {}))
    for k, sample in enumerate(rep.entries["2-order-one"]["samples"]):
        prof = sample["tail_norms"]
        worst = max((b - a for a, b in zip(prof, prof[1:])), default=-1.0)
        out.append(BoundReport("order-one tail decrease", worst, 0.0, 0.0, "order-one",
                               {"sample": k, "tail_norms": prof}))
    for key in ("4-orientability", "5-finiteness", "6-poincare-duality"):
        out.append(BoundReport(f"axiom {key}", 0.0, 0.0, 0.0, "axioms-undecided",
                               {"status": rep.entries[key]["status"]}))
    return out


def _exp_trace(triple, scn, exp, rng):
    out = []
    for p in scn["_params"]:
        for s in exp.get("s", [1, 2, 4]):
            out.append(core.trace_identity_check(triple, p, s))
    return out


def run_scenario(scn, seed=0, out_dir=Path("out"), tolerance_scale=1.0, allow_large=False):
    """Execute a parsed scenario; returns ``(report_dict, exit_code)``."""
    schema = load_schema()
    try:
        jsonschema.validate(scn, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ScenarioError(f"schema violation at {path}: {exc.message}") from exc

    inst = _instance(scn["instance"])
    dim = _matrix_dim(inst)
    if dim > MAX_DIM and not allow_large:
        raise ScenarioError(f"instance: matrix dimension {dim} exceeds {MAX_DIM} (use --allow-large)")
    triple = inst.triple if isinstance(inst, (instances.CompactsInstance, instances.PodlesInstance)) else inst

    work = dict(scn)
    work["_params"] = _params(scn.get("params", []), "params")
    for k, exp in enumerate(scn["experiments"]):
        if exp["type"] == "sweep":
            for i, (a, b) in enumerate(exp["grid"]):
                bad = validate_params(Params(float(a), float(b)))
                if bad is not None:
                    raise ScenarioError(f"experiments[{k}].grid[{i}] = ({a}, {b}) violates {bad}")
    rng = np.random.default_rng(seed)
    work["_net"] = _state_net(triple, scn.get("states", {}), rng)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for k, exp in enumerate(scn["experiments"]):
        kind = exp["type"]
        sub = np.random.default_rng([seed, k])
        if kind == "seminorm":
            reps = _exp_seminorm(triple, work, exp, sub)
        elif kind == "distance":
            reps = _exp_distance(triple, work, exp, sub)
        elif kind == "sandwich":
            reps = _exp_sandwich(triple, work, exp, sub)
        elif kind == "bridge":
            reps = _exp_bridge(triple, work, exp, sub)
        elif kind == "degeneration":
            reps = _exp_degeneration(triple, work, exp, sub)
        elif kind == "sweep":
            reps = _exp_sweep(triple, work, exp, sub, out_dir)
        elif kind == "axioms":
            reps = _exp_axioms(inst, work, exp, sub)
        else:
            reps = _exp_trace(triple, work, exp, sub)
        for r in reps:
            r.tolerance *= tolerance_scale
            d = r.to_dict()
            d["experiment"] = kind
            results.append(d)

    canon = json.dumps(scn, sort_keys=True, separators=(",", ":"))
    report = {
        "scenario_hash": hashlib.sha256(canon.encode("utf-8")).hexdigest(),
        "seed": seed,
        "results": results,
    }
    code = 0 if all(r["pass"] for r in results) else 1
    return report, code


def bundled_scenario(name):
    """Path-like handle to a scenario shipped with the package."""
    return resources.files("toeplitz_triples").joinpath("scenarios", f"{name}.json")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="toeplitz-triples", description=__doc__.split("\n")[0])
    ap.add_argument("--scenario", help="scenario JSON file")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="./out")
    ap.add_argument("--tolerance-scale", type=float, default=1.0)
    ap.add_argument("--allow-large", action="store_true")
    ap.add_argument("--list-experiments", action="store_true")
    args = ap.parse_args(argv)

    if args.list_experiments:
        for k, v in EXPERIMENTS.items():
            print(f"{k:15s} {v}")
        return 0
    if not args.scenario:
        print("error: --scenario is required", file=sys.stderr)
        return 2
    if not args.tolerance_scale > 0:
        print("error: --tolerance-scale must be positive", file=sys.stderr)
        return 2
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        scn = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    try:
        report, code = run_scenario(scn, seed=args.seed, out_dir=Path(args.out),
                                    tolerance_scale=args.tolerance_scale, allow_large=args.allow_large)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    name = scn.get("name", "scenario")
    path = out_dir / f"{name}-report.json"
    path.write_text(json.dumps(encode_value(report), sort_keys=True, indent=1) + "\n", encoding="utf-8")
    failed = [r for r in report["results"] if not r["pass"]]
    for r in failed:
        print(f"FAILED {r['name']} ({r['anchor']}): slack {r['slack']}", file=sys.stderr)
    print(f"{len(report['results']) - len(failed)}/{len(report['results'])} checks passed; report at {path}")
    return code


if __name__ == "__main__":
    sys.exit(main())
