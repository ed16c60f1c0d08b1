"""Verifiers for the comparison inequalities, bridges, GH bounds and degenerations.

Every check returns :class:`~toeplitz_triples.reports.BoundReport` objects.
Inequalities between exact norms use a ``1e-9`` tolerance.  Inequalities
between distances are checked on a shared pool of elements, each rescaled
into the relevant unit ball, so they hold by construction and any failure
points at a bug rather than at solver inaccuracy.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ExtElement,
    Params,
    lip_a,
    lip_c,
    lip_ext,
    require_params,
    sandwich_factors,
    validate_params,
)
from .linalg import ValidationError
from .reports import BoundReport
from .states import (
    SeminormSpec,
    SplitState,
    compact_diameter_bracket,
    evaluate,
    ext_parameterization,
    maximize_linear,
)

__all__ = [
    "check_lineq",
    "check_seminorm_sandwich",
    "pooled_distance",
    "check_metric_sandwich",
    "BridgeSeminorm",
    "build_bridge",
    "check_bridge_pairings",
    "gh_upper_bound_formula",
    "gh_bound_multiplicative",
    "gh_bound_one_point",
    "one_point_bridge_check",
    "ato0_bound",
    "ato0_pairing_check",
    "limit_dirac",
    "lip_limit_spec",
    "bto0_classify",
    "bto0_limit_distance",
    "DineqResult",
    "dineq_divergence_check",
    "toy_square_metric",
    "param_space_sweep",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]

NORM_TOL = 1e-9


def check_lineq(triple, t, p, tol=NORM_TOL):
    """``L_A(a) <= alpha L(t)`` and ``L_C(k) <= (1 + alpha beta)/beta L(t)``."""
    require_params(p)
    if not t.is_self_adjoint():
        raise ValidationError("element must be self-adjoint")
    lt = lip_ext(triple, t, p)
    ctx = {"alpha": p.alpha, "beta": p.beta, "lip_ext": lt}
    r1 = BoundReport("symbol seminorm bound", lip_a(triple, t.symbol), p.alpha * lt, tol, "lineq-symbol", dict(ctx))
    r2 = BoundReport(
        "compact seminorm bound",
        lip_c(triple, t.compact),
        (1.0 + p.alpha * p.beta) / p.beta * lt,
        tol,
        "lineq-compact",
        dict(ctx),
    )
    return r1, r2


def check_seminorm_sandwich(triple, t, p, q, tol=NORM_TOL):
    """``lo L_q(t) <= L_p(t) <= hi L_q(t)`` with the two scaling factors."""
    require_params(p)
    require_params(q)
    lo, hi = sandwich_factors(p, q)
    lp, lq = lip_ext(triple, t, p), lip_ext(triple, t, q)
    ctx = {"p": [p.alpha, p.beta], "q": [q.alpha, q.beta], "lo": lo, "hi": hi}
    scale = max(1.0, lp, hi * lq)
    return (
        BoundReport("seminorm sandwich lower", lo * lq, lp, tol * scale, "seminorm-sandwich", dict(ctx)),
        BoundReport("seminorm sandwich upper", lp, hi * lq, tol * scale, "seminorm-sandwich", dict(ctx)),
    )


def pooled_distance(phi, psi, pool, seminorm):
    """``max |(phi - psi)(t)| / L(t)`` over the pool; ``inf`` on a separating kernel element."""
    best = 0.0
    for t in pool:
        gap = abs(evaluate(phi, t) - evaluate(psi, t))
        lv = seminorm(t)
        if lv <= 1e-10:
            if gap > 1e-8:
                return math.inf
            continue
        best = max(best, gap / lv)
    return best


def check_metric_sandwich(triple, phi, psi, p, q, pool, tol=NORM_TOL, solver_values=None):
    """Distance comparison ``d_q / hi <= d_p <= d_q / lo`` on a shared pool."""
    require_params(p)
    require_params(q)
    pool = list(pool)
    if not pool:
        raise ValidationError("element pool is empty")
    lo, hi = sandwich_factors(p, q)
    dp = pooled_distance(phi, psi, pool, lambda t: lip_ext(triple, t, p))
    dq = pooled_distance(phi, psi, pool, lambda t: lip_ext(triple, t, q))
    ctx = {"p": [p.alpha, p.beta], "q": [q.alpha, q.beta], "pooled_p": dp, "pooled_q": dq, "pool": len(pool)}
    if solver_values:
        ctx["solver"] = solver_values
    scale = max(1.0, dp, dq / lo)
    return (
        BoundReport("metric sandwich lower", dq / hi, dp, tol * scale, "metric-sandwich", dict(ctx)),
        BoundReport("metric sandwich upper", dp, dq / lo, tol * scale, "metric-sandwich", dict(ctx)),
    )


@dataclass(eq=False)
class BridgeSeminorm:
    """``L(a, b) = max{L3(a), L2(b), R L3(a-b), R L2(a-b), M |sigma(a-b)|}``.

    ``L1`` and ``L2`` are seminorms on the same coordinate space with
    ``s L2 <= L1 <= r L2``; ``L3 = L1 / sqrt(r s)``.
    """

    spec1: SeminormSpec
    spec2: SeminormSpec
    s: float
    r: float
    sigma: SplitState
    penalty: float

    def __post_init__(self):
        if not 0 < self.s < self.r:
            raise ValidationError(f"bridge needs 0 < s < r, got s={self.s}, r={self.r}")
        if not self.penalty > 0:
            raise ValidationError("penalty M must be positive")
        self._sig = self.spec1.param.functional(self.sigma)

    @property
    def R(self):
        return math.sqrt(self.s) / (math.sqrt(self.r) - math.sqrt(self.s))

    @property
    def kappa(self):
        return math.sqrt(self.s / self.r)

    def l3(self, x):
        return self.spec1.value(x) / math.sqrt(self.r * self.s)

    def l2(self, x):
        return self.spec2.value(x)

    def sigma_of(self, x):
        return float(self._sig @ x)

    def terms(self, xa, xb):
        d = np.asarray(xa) - np.asarray(xb)
        return [
            self.l3(xa),
            self.l2(xb),
            self.R * self.l3(d),
            self.R * self.l2(d),
            self.penalty * abs(self.sigma_of(d)),
        ]

    def value(self, xa, xb):
        return max(self.terms(xa, xb))

    def pair_first(self, xa):
        """Partner ``b = kappa a + (1 - kappa) sigma(a) I`` of a first-summand element."""
        unit = self.spec1.param.unit
        return self.kappa * np.asarray(xa) + (1 - self.kappa) * self.sigma_of(xa) * unit

    def pair_second(self, xb):
        unit = self.spec1.param.unit
        return self.kappa * np.asarray(xb) + (1 - self.kappa) * self.sigma_of(xb) * unit


def build_bridge(spec1, spec2, s, r, sigma, penalty):
    if spec1.param.dim != spec2.param.dim:
        raise ValidationError("bridge components must share a coordinate space")
    return BridgeSeminorm(spec1, spec2, float(s), float(r), sigma, float(penalty))


def check_bridge_pairings(bridge, rng, samples=50, tol=NORM_TOL):
    """Both explicit pairings keep the bridge seminorm at most one."""
    m = bridge.spec1.param.dim
    worst1 = worst2 = 0.0
    for _ in range(samples):
        x = rng.standard_normal(m)
        l3 = bridge.l3(x)
        if l3 > 1e-12:
            xa = x / l3
            worst1 = max(worst1, bridge.value(xa, bridge.pair_first(xa)))
        y = rng.standard_normal(m)
        l2 = bridge.l2(y)
        if l2 > 1e-12:
            xb = y / l2
            worst2 = max(worst2, bridge.value(bridge.pair_second(xb), xb))
    ctx = {"s": bridge.s, "r": bridge.r, "R": bridge.R, "M": bridge.penalty, "samples": samples}
    return (
        BoundReport("bridge pairing (first summand)", worst1, 1.0, tol, "bridge-pairing", dict(ctx)),
        BoundReport("bridge pairing (second summand)", worst2, 1.0, tol, "bridge-pairing", dict(ctx)),
    )


def gh_upper_bound_formula(p, q, diam_p):
    """``(max{ab/cd, cd/ab} - 1 + |1 - b/d|) diam`` for ``p = (a, b)``, ``q = (c, d)``."""
    for x in (p, q):
        bad = validate_params(x)
        if bad is not None:
            raise ValidationError(str(bad))
    ratio = (p.alpha * p.beta) / (q.alpha * q.beta)
    return (max(ratio, 1.0 / ratio) - 1.0 + abs(1.0 - p.beta / q.beta)) * diam_p


def gh_bound_multiplicative(t_factor, diam):
    if not t_factor > 0:
        raise ValidationError("scale factor must be positive")
    return abs(1.0 - 1.0 / t_factor) * diam


def gh_bound_one_point(t_factor, diam):
    if not t_factor > 0:
        raise ValidationError("scale factor must be positive")
    return diam / t_factor


def one_point_bridge_check(spec, net, sigma, t_factor, penalty, pool_coords, diam, tol=NORM_TOL):
    """Sampled Hausdorff distance to the one-point space under ``max{tL(a), M|sigma(a) - s|}``.

    Each pooled ``a`` is paired with the best admissible ``s`` and
    rescaled into the unit ball.  The diameter is raised to cover the
    pooled ratios ``|(phi - sigma)(a)| / L(a)``, which makes the sampled
    value obey ``<= diam / t + 1 / M`` element by element.
    """
    sig = spec.param.functional(sigma)
    funcs = [spec.param.functional(phi) for phi in net]
    best, pooled_diam = 0.0, 0.0
    for x in pool_coords:
        lv = spec.value(x)
        if lv <= 1e-12:
            continue
        x = x / (t_factor * lv)
        sa = float(sig @ x)
        for f in funcs:
            fa = float(f @ x)
            pooled_diam = max(pooled_diam, abs(fa - sa) * t_factor)
            # best s within 1/M of sigma(a)
            best = max(best, abs(fa - sa) + 1.0 / penalty)
    d = max(diam, pooled_diam)
    return BoundReport(
        "one-point bridge",
        best,
        gh_bound_one_point(t_factor, d) + 1.0 / penalty,
        tol,
        "one-point-bound",
        {"t": t_factor, "M": penalty, "diam_given": diam, "diam_pooled": pooled_diam},
    )


def ato0_bound(alpha, diam_a, diam_c):
    return alpha * (diam_a + diam_c)


def _sym_value(state, a):
    return evaluate(state, ExtElement(a, np.zeros((state.triple.n_p, state.triple.n_p), dtype=complex)))


def _ato0_pool(triple, p, sigma, rng, size):
    """Tuples ``(a, k, h, s)`` from both induced-seminorm recipes plus random ones."""
    n_p = triple.n_p
    pool = []
    for i in range(size):
        coords = rng.standard_normal(triple.symbols.dim)
        a = triple.symbols.matrix(coords)
        g = rng.standard_normal((n_p, n_p)) + 1j * rng.standard_normal((n_p, n_p))
        k = 0.5 * (g + g.conj().T)
        kind = i % 3
        if kind == 0:
            h, s = k / (1.0 + p.alpha * p.beta), _sym_value(sigma, a)
        elif kind == 1:
            s = float(rng.standard_normal())
            a, h = s * np.eye(triple.dim_h), k
        else:
            g2 = rng.standard_normal((n_p, n_p)) + 1j * rng.standard_normal((n_p, n_p))
            h = 0.5 * (g2 + g2.conj().T)
            s = _sym_value(sigma, a) + float(rng.standard_normal()) * 1e-3
        pool.append((a, k, h, s))
    return pool


def _ato0_terms(triple, p, sigma, penalty, a, k, h, s):
    return [
        lip_ext(triple, ExtElement(a, k), p),
        p.beta * lip_c(triple, h),
        lip_a(triple, a) / p.alpha,
        lip_c(triple, k - h) / p.alpha,
        penalty * abs(_sym_value(sigma, a) - s),
    ]


def ato0_pairing_check(triple, phi, p, sigma, penalty, diam_a, diam_c=None, pool=None,
                       rng=None, pool_size=60, reverse_functional=None, tol=NORM_TOL):
    """Pairing inequality for the ``alpha -> 0`` limit on a pooled witness set.

    ``phi`` is paired with ``psi(h + sI) = Tr(F h) + s`` where ``F`` is the
    normal functional of ``phi``.  With ``reverse_functional`` set to a
    positive matrix ``F`` of trace at most one, ``phi`` is instead built
    from ``F`` and ``sigma``.  ``sigma`` must vanish on compacts (weight 1).
    """
    require_params(p)
    if sigma.weight != 1.0:
        raise ValidationError("sigma must vanish on compacts")
    if reverse_functional is not None:
        f = np.asarray(reverse_functional, dtype=complex)
        norm_f = float(np.trace(f).real)
        normal = f / norm_f if norm_f > 0 else sigma.normal
        phi = SplitState(triple, 1.0 - norm_f, normal, sigma.base)
        label = "reverse"
    else:
        f = phi.normal_functional()
        label = "forward"
    if diam_c is None:
        diam_c = compact_diameter_bracket(triple)[1]
    if pool is None:
        pool = _ato0_pool(triple, p, sigma, rng or np.random.default_rng(0), pool_size)

    lhs, pooled_da = 0.0, 0.0
    for a, k, h, s in pool:
        lv = max(_ato0_terms(triple, p, sigma, penalty, a, k, h, s))
        if lv <= 1e-12:
            continue
        a, k, h, s = a / lv, k / lv, h / lv, s / lv
        val = evaluate(phi, ExtElement(a, k)) - (float(np.trace(f @ h).real) + s)
        lhs = max(lhs, abs(val))
        la = lip_a(triple, a)
        if la > 1e-12:
            gap = abs(_sym_value(phi, a) - _sym_value(sigma, a))
            pooled_da = max(pooled_da, gap / la)
    da = max(diam_a, pooled_da)
    return BoundReport(
        f"alpha-limit pairing ({label})",
        lhs,
        ato0_bound(p.alpha, da, diam_c) + 1.0 / penalty,
        tol,
        "alpha-limit",
        {"alpha": p.alpha, "beta": p.beta, "M": penalty, "diam_a": da, "diam_a_given": diam_a,
         "diam_c": diam_c, "pool": len(pool)},
    )


def limit_dirac(triple, alpha):
    """``D_{alpha,0}``: the Dirac matrix with the off-diagonal coupling removed."""
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    n_p = triple.n_p
    out = np.zeros((triple.dim_k, triple.dim_k), dtype=complex)
    out[n_p:, n_p:] = np.diag(triple.dirac[triple.perm]) / alpha
    return out


def lip_limit_spec(triple, alpha=1.0):
    """``L_{alpha,0}`` on the extension coordinates (compacts lie in its kernel)."""
    from .core import represent

    param = ext_parameterization(triple)
    d = limit_dirac(triple, alpha)
    mats = []
    for e in param.basis_elements():
        pi = represent(triple, e)
        mats.append(d @ pi - pi @ d)
    return SeminormSpec("lip_limit", param, (np.array(mats),), {"alpha": alpha, "beta": 0.0})


def bto0_classify(phi, psi, tol=1e-10):
    if phi.same_as(psi, tol):
        return "equal"
    if np.max(np.abs(phi.normal_functional() - psi.normal_functional())) > tol:
        return "normal-differs"
    return "base-differs"


def bto0_limit_distance(phi, psi, base_distance_fn, tol=1e-10):
    """Limit distance at ``beta = 0``.

    ``base_distance_fn(mu, nu)`` receives the normalized base parts as
    states of weight one and returns their distance.
    """
    case = bto0_classify(phi, psi, tol)
    if case == "equal":
        return 0.0
    if case == "normal-differs":
        return math.inf
    mu = SplitState(phi.triple, 1.0, phi.normal, phi.base)
    nu = SplitState(psi.triple, 1.0, psi.normal, psi.base)
    return phi.weight * float(base_distance_fn(mu, nu))


@dataclass
class DineqResult:
    gamma: float
    witness: np.ndarray
    reports: list = field(default_factory=list)
    degenerate: bool = False


def dineq_divergence_check(triple, phi, psi, betas, alpha=1.0, tol=NORM_TOL, **solver_kw):
    """Constructive ``dist_{alpha,beta}(phi, psi) >= gamma / beta`` for each beta.

    ``gamma`` is the solver value of ``sup |(f - g)(k)|`` over ``L_C(k) <= 1``
    and ``k*`` its witness; ``k*/beta`` lies in every unit ball ``U_{alpha,beta}``.
    """
    from .states import lip_c_spec

    spec = lip_c_spec(triple)
    c = spec.param.functional(phi) - spec.param.functional(psi)
    res = maximize_linear(spec, c, **solver_kw)
    k_star = np.tensordot(res.coords, spec.param.compacts, axes=1)
    if res.value <= 1e-12:
        return DineqResult(0.0, k_star, [], degenerate=True)
    gamma = res.value
    reports = []
    for beta in betas:
        p = Params(alpha, beta)
        require_params(p)
        t = ExtElement(np.zeros((triple.dim_h, triple.dim_h), dtype=complex), k_star / beta)
        lv = lip_ext(triple, t, p)
        lower = abs(evaluate(phi, t) - evaluate(psi, t)) / max(lv, 1.0)
        reports.append(
            BoundReport(
                "divergence lower bound",
                gamma / beta,
                lower,
                tol * max(1.0, gamma / beta),
                "beta-divergence",
                {"alpha": alpha, "beta": beta, "gamma": gamma, "witness_seminorm": lv},
            )
        )
    return DineqResult(gamma, k_star, reports)


def toy_square_metric(pt1, pt2, p):
    """``alpha |x - s| + |y - t| / beta`` on the unit square; ``beta = 0`` is the limit metric."""
    (x, y), (s, t) = pt1, pt2
    for v in (x, y, s, t):
        if not 0.0 <= v <= 1.0:
            raise ValidationError("points must lie in the unit square")
    alpha, beta = p
    if beta == 0:
        return alpha * abs(x - s) if y == t else math.inf
    return alpha * abs(x - s) + abs(y - t) / beta


SWEEP_COLUMNS = ("alpha", "beta", "diam_lb", "gh_bound_to_neighbors", "ubset_gamma", "ubset_pass")


def param_space_sweep(triple, grid, net, pool, gamma_witness=None, tol=NORM_TOL):
    """Tabulate diameter lower bounds and GH bounds over a parameter grid.

    ``grid`` holds ``(alpha, beta)`` pairs, ``net`` states and ``pool``
    self-adjoint elements.  ``gamma_witness`` is a ``DineqResult`` whose
    witness is added to the pool as ``k*/beta`` at every point; the
    divergence column then checks ``diam_lb >= gamma / beta``.
    Invalid grid points get a row with ``error`` set.
    """
    rows, valid = [], []
    for a, b in sorted(grid):
        p = Params(a, b)
        bad = validate_params(p)
        if bad is not None or not a > 0:
            rows.append({"alpha": a, "beta": b, "error": str(bad) if bad else "alpha must be positive"})
            continue
        local = list(pool)
        if gamma_witness is not None and not gamma_witness.degenerate:
            local.append(ExtElement(np.zeros((triple.dim_h, triple.dim_h), dtype=complex), gamma_witness.witness / b))
        diam = 0.0
        for i in range(len(net)):
            for j in range(i + 1, len(net)):
                diam = max(diam, pooled_distance(net[i], net[j], local, lambda t: lip_ext(triple, t, p)))
        row = {"alpha": a, "beta": b, "diam_lb": diam}
        if gamma_witness is not None and not gamma_witness.degenerate:
            row["ubset_gamma"] = gamma_witness.gamma
            row["ubset_pass"] = bool(diam >= gamma_witness.gamma / b - tol * max(1.0, diam))
        else:
            row["ubset_gamma"] = ""
            row["ubset_pass"] = ""
        rows.append(row)
        valid.append((p, row))
    for p, row in valid:
        others = [q for q, _ in valid if q != p]
        if not others:
            row["gh_bound_to_neighbors"] = 0.0
            continue
        near = min(others, key=lambda q: (math.hypot(q.alpha - p.alpha, q.beta - p.beta), q.alpha, q.beta))
        row["gh_bound_to_neighbors"] = gh_upper_bound_formula(p, near, row["diam_lb"])
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(SWEEP_COLUMNS), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            if "error" in row:
                continue
            out = {}
            for k in SWEEP_COLUMNS:
                v = row.get(k, "")
                out[k] = repr(float(v)) if isinstance(v, float) else v
            w.writerow(out)
