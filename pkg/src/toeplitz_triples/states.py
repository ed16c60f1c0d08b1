"""States in split form and the spectral distance solver.

A state on the extension is stored as ``(1 - w) Tr(N .) + w mu``: a
density matrix ``N`` on ``PH`` (the normal part) and a probability
measure ``mu`` on the symbol grid (the part that only sees symbols).

Distances are suprema of a linear functional over the unit ball of a
seminorm of the form ``max_i ||sum_j x_j B_ij||``.  The solver works on
the affine slice ``{c . x = 1}`` and minimises the seminorm there, which is
the same problem: ``sup{c . x : L(x) <= 1} = 1 / min{L(x) : c . x = 1}``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import ExtElement, commutator_ext, require_params
from .linalg import ValidationError, operator_norm
from .reports import BoundReport

__all__ = [
    "SplitState",
    "delta_state",
    "vector_state",
    "singular_state",
    "random_state",
    "evaluate",
    "Parameterization",
    "symbol_parameterization",
    "compact_parameterization",
    "ext_parameterization",
    "SeminormSpec",
    "lip_a_spec",
    "lip_c_spec",
    "lip_ext_spec",
    "scaled_spec",
    "DistanceResult",
    "maximize_linear",
    "connes_distance",
    "diameter_estimate",
    "compact_diameter_bracket",
    "diamC_inequality_check",
]

KERNEL_TOL = 1e-10
INFINITY_OBJECTIVE = 1e-8
MU_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True, eq=False)
class SplitState:
    """``(1 - weight) Tr(normal .) + weight * base``."""

    triple: object
    weight: float
    normal: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        n_p = self.triple.n_p
        normal = np.asarray(self.normal, dtype=complex)
        base = np.asarray(self.base, dtype=float)
        if not 0.0 <= self.weight <= 1.0:
            raise ValidationError(f"weight must lie in [0, 1], got {self.weight}")
        if normal.shape != (n_p, n_p):
            raise ValidationError(f"normal part must be {n_p}x{n_p}")
        if np.max(np.abs(normal - normal.conj().T)) > 1e-10:
            raise ValidationError("normal part is not Hermitian")
        if abs(np.trace(normal).real - 1.0) > 1e-10:
            raise ValidationError(f"normal part must have trace one, got {np.trace(normal).real}")
        if np.linalg.eigvalsh(0.5 * (normal + normal.conj().T))[0] < -1e-10:
            raise ValidationError("normal part is not positive semidefinite")
        if base.shape != self.triple.symbols.grid.shape:
            raise ValidationError("base weights must match the symbol grid")
        if np.any(base < 0) or abs(base.sum() - 1.0) > 1e-12:
            raise ValidationError("base weights must be a probability vector")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "base", base)

    def normal_functional(self):
        """The positive functional ``(1 - weight) normal`` on compacts."""
        return (1.0 - self.weight) * self.normal

    def same_as(self, other, tol=1e-10):
        return (
            np.max(np.abs(self.normal_functional() - other.normal_functional())) <= tol
            and np.max(np.abs(self.weight * self.base - other.weight * other.base)) <= tol
        )


def _point_mass(size, j):
    w = np.zeros(size)
    w[j] = 1.0
    return w


def _default_normal(triple):
    n = np.zeros((triple.n_p, triple.n_p), dtype=complex)
    n[0, 0] = 1.0
    return n


def delta_state(triple, point):
    """Point evaluation of symbols at grid index ``point`` (angle for the circle)."""
    if isinstance(point, float) and hasattr(triple, "grid_index"):
        point = triple.grid_index(point)
    base = _point_mass(triple.symbols.grid.size, int(point))
    return SplitState(triple, 1.0, _default_normal(triple), base)


def singular_state(triple, base):
    return SplitState(triple, 1.0, _default_normal(triple), np.asarray(base, dtype=float))


def vector_state(triple, vec, weight=0.0, base=None):
    """Vector state on ``PH`` given by a basis index or a coordinate vector."""
    if np.ndim(vec) == 0:
        v = np.zeros(triple.n_p, dtype=complex)
        v[int(vec)] = 1.0
    else:
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
    if base is None:
        base = _point_mass(triple.symbols.grid.size, 0)
    return SplitState(triple, weight, np.outer(v, v.conj()), base)


def random_state(triple, rng, weight=None, rank=None, base_support=3):
    """Random split state: low-rank density matrix plus a sparse grid measure."""
    n_p = triple.n_p
    rank = min(n_p, 2) if rank is None else rank
    g = rng.standard_normal((n_p, rank)) + 1j * rng.standard_normal((n_p, rank))
    normal = g @ g.conj().T
    normal /= np.trace(normal).real
    size = triple.symbols.grid.size
    base = np.zeros(size)
    idx = rng.choice(size, size=min(base_support, size), replace=False)
    base[idx] = rng.random(idx.size) + 0.1
    base /= base.sum()
    w = float(rng.random()) if weight is None else weight
    return SplitState(triple, w, normal, base)


def _grid_functional(state, a):
    if state.weight == 0.0:
        return 0.0
    vals = state.triple.symbols.evaluate(a)
    return float(np.dot(state.base, vals))


def evaluate(state, t):
    """Value of ``state`` on a self-adjoint element ``t``."""
    if not t.is_self_adjoint():
        raise ValidationError("states are evaluated on self-adjoint elements only")
    triple = state.triple
    on_p = triple.compress(t.symbol) + t.compact
    normal_part = np.real(np.trace(state.normal @ on_p)) if state.weight < 1.0 else 0.0
    return float((1.0 - state.weight) * normal_part + state.weight * _grid_functional(state, t.symbol))


@dataclass(frozen=True, eq=False)
class Parameterization:
    """Linear coordinates ``x -> sum_j x_j (T(S_j) + K_j)`` on self-adjoint elements."""

    triple: object
    symbols: np.ndarray
    compacts: np.ndarray
    unit: np.ndarray
    name: str = ""

    @property
    def dim(self):
        return self.symbols.shape[0]

    def element(self, x):
        x = np.asarray(x, dtype=float)
        return ExtElement(np.tensordot(x, self.symbols, axes=1), np.tensordot(x, self.compacts, axes=1))

    def basis_elements(self):
        return [ExtElement(s, k) for s, k in zip(self.symbols, self.compacts)]

    def functional(self, state):
        """Coordinates of ``state`` restricted to this element space."""
        triple = self.triple
        out = np.zeros(self.dim)
        if state.weight < 1.0:
            pp = np.ix_(triple.p_idx, triple.p_idx)
            on_p = self.symbols[(slice(None),) + pp] + self.compacts
            out += (1.0 - state.weight) * np.real(np.einsum("ij,mji->m", state.normal, on_p))
        if state.weight > 0.0:
            for j, s in enumerate(self.symbols):
                if np.any(s):
                    out[j] += state.weight * _grid_functional(state, s)
        return out


def _zeros(m, n):
    return np.zeros((m, n, n), dtype=complex)


def symbol_parameterization(triple):
    sym = np.asarray(triple.symbols.basis)
    return Parameterization(triple, sym, _zeros(len(sym), triple.n_p), triple.symbols.unit.copy(), "symbols")


def compact_parameterization(triple):
    """Unit plus Hermitian compacts on ``PH``: the unitarized compacts."""
    kb = triple.compact_basis
    m = len(kb) + 1
    sym = _zeros(m, triple.dim_h)
    sym[0] = np.eye(triple.dim_h)
    comp = _zeros(m, triple.n_p)
    comp[1:] = kb
    unit = np.zeros(m)
    unit[0] = 1.0
    return Parameterization(triple, sym, comp, unit, "compacts")


def ext_parameterization(triple):
    sym_b = np.asarray(triple.symbols.basis)
    kb = triple.compact_basis
    ms, mk = len(sym_b), len(kb)
    sym = _zeros(ms + mk, triple.dim_h)
    sym[:ms] = sym_b
    comp = _zeros(ms + mk, triple.n_p)
    comp[ms:] = kb
    unit = np.zeros(ms + mk)
    unit[:ms] = triple.symbols.unit
    return Parameterization(triple, sym, comp, unit, "extension")


@dataclass(frozen=True, eq=False)
class SeminormSpec:
    """``L(x) = max_i ||sum_j x_j B_i[j]||`` over the terms ``B_i``.

    Absolute values of linear forms are terms with 1x1 blocks.
    """

    kind: str
    param: Parameterization
    terms: tuple
    info: dict = field(default_factory=dict)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return max(operator_norm(np.tensordot(x, b, axes=1)) for b in self.terms)

    def of(self, t):
        """Seminorm of an element expressed in this parameterization's span."""
        return self.value(self.coords(t))

    def coords(self, t):
        p = self.param
        a = np.concatenate([p.symbols.reshape(p.dim, -1), p.compacts.reshape(p.dim, -1)], axis=1).T
        b = np.concatenate([t.symbol.ravel(), t.compact.ravel()])
        x, *_ = np.linalg.lstsq(np.vstack([a.real, a.imag]), np.concatenate([b.real, b.imag]), rcond=None)
        return x


def lip_a_spec(triple):
    p = symbol_parameterization(triple)
    d = triple.dirac
    terms = (d[None, :, None] * p.symbols - p.symbols * d[None, None, :],)
    return SeminormSpec("lip_a", p, terms)


def lip_c_spec(triple):
    p = compact_parameterization(triple)
    terms = (triple.d_p[None, :, None] * p.compacts,)
    return SeminormSpec("lip_c", p, terms)


def lip_ext_spec(triple, params, param=None):
    require_params(params)
    p = ext_parameterization(triple) if param is None else param
    terms = (np.array([commutator_ext(triple, e, params) for e in p.basis_elements()]),)
    return SeminormSpec("lip_ext", p, terms, {"alpha": params.alpha, "beta": params.beta})


def scaled_spec(spec, factor):
    if not factor > 0:
        raise ValidationError("scale factor must be positive")
    terms = tuple(factor * b for b in spec.terms)
    return SeminormSpec("scaled", spec.param, terms, dict(spec.info, factor=factor, base=spec.kind))


@dataclass
class DistanceResult:
    value: float
    witness: object
    coords: np.ndarray
    iterations: int = 0
    restarts: int = 0
    gap_estimate: float = 0.0
    infinite: bool = False
    restart_values: list = field(default_factory=list)

    def to_dict(self):
        return {
            "value": "inf" if self.infinite else self.value,
            "infinite": self.infinite,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "gap_estimate": self.gap_estimate,
        }


def _flat_map(terms, m):
    blocks = [b.reshape(m, -1).T for b in terms]
    a = np.vstack(blocks)
    return np.vstack([a.real, a.imag])


def _soft_norm(x, terms, mu):
    """Log-sum-exp smoothing of the largest singular value and its gradient."""
    svals, parts = [], []
    for b in terms:
        c = np.tensordot(x, b, axes=1)
        u, s, vh = np.linalg.svd(c)
        svals.append(s)
        parts.append((b, u, s, vh))
    top = max(s[0] for s in svals)
    total = sum(np.sum(np.exp((s - top) / mu)) for s in svals)
    value = top + mu * math.log(total)
    grad = np.zeros(x.size)
    for b, u, s, vh in parts:
        w = np.exp((s - top) / mu) / total
        k = int(np.count_nonzero(w > 1e-14))
        if k == 0:
            continue
        g = (u[:, :k] * w[:k]) @ vh[:k]
        grad += np.real(np.einsum("rc,jrc->j", g.conj(), b))
    return value, grad


def _top_gradient(x, terms):
    best, grad = -1.0, None
    for b in terms:
        c = np.tensordot(x, b, axes=1)
        u, s, vh = np.linalg.svd(c)
        if s[0] > best:
            best = s[0]
            grad = np.real(np.einsum("r,jrc,c->j", u[:, 0].conj(), b, vh[0].conj()))
    return best, grad


def _supergradient(x, c, terms, iters):
    """Ascent on ``c.x / L(x)`` with radial retraction onto ``L = 1``."""
    lval, _ = _top_gradient(x, terms)
    x = x / lval
    best = (float(c @ x), x.copy())
    scale = np.linalg.norm(x)
    for k in range(1, iters + 1):
        lval, g = _top_gradient(x, terms)
        direction = c - (c @ x) * g
        nd = np.linalg.norm(direction)
        if nd == 0.0:
            break
        x = x + (0.5 * scale / math.sqrt(k)) * direction / nd
        lval, _ = _top_gradient(x, terms)
        x = x / max(lval, 1e-300)
        if c @ x > best[0]:
            best = (float(c @ x), x.copy())
    return best[1], iters


def _polish(x, c, terms, basis, x0, maxiter):
    """Smoothed minimisation of L on the hyperplane ``c.x = 1`` started at ``x``."""
    x = x / (c @ x)
    y = basis.T @ (x - x0)

    def f(y, mu):
        val, grad = _soft_norm(x0 + basis @ y, terms, mu)
        return val, basis.T @ grad

    def norm_at(y):
        return max(operator_norm(np.tensordot(x0 + basis @ y, b, axes=1)) for b in terms)

    lc = norm_at(y)
    its = 0
    for mu in MU_SCHEDULE:
        res = minimize(f, y, args=(mu * lc,), jac=True, method="L-BFGS-B", options={"maxiter": maxiter})
        its += int(res.nit)
        if norm_at(res.x) <= lc:
            y = res.x
            lc = norm_at(y)
    return x0 + basis @ y, its


def maximize_linear(spec, c, restarts=8, seed=0, init=None, method="smoothed",
                    sg_iters=None, maxiter=500):
    """``sup{c . x : spec(x) <= 1}`` with a feasible maximiser.

    Parameters
    ----------
    spec : SeminormSpec
    c : ndarray
        Objective in the coordinates of ``spec.param``.
    restarts : int
        Random starts; ``init`` coordinate vectors are tried in addition.
    method : {"smoothed", "supergradient"}
        ``"smoothed"`` runs a short supergradient warm start and then a
        log-sum-exp smoothing continuation with L-BFGS-B; ``"supergradient"``
        runs the ascent alone.

    Returns
    -------
    DistanceResult
        ``coords`` is the witness in parameter coordinates.
    """
    c = np.asarray(c, dtype=float)
    m = spec.param.dim
    if c.shape != (m,):
        raise ValidationError(f"objective has {c.size} coordinates, parameterization has {m}")
    terms = spec.terms
    if any(b.shape[0] != m for b in terms):
        raise ValidationError("seminorm terms do not match the parameterization")

    # seminorm kernel: directions the commutators cannot see
    a = _flat_map(terms, m)
    _, sv, vt = np.linalg.svd(a, full_matrices=True)
    sv = np.concatenate([sv, np.zeros(m - sv.size)]) if sv.size < m else sv
    big = sv[0] if sv.size else 0.0
    ker = vt[sv <= KERNEL_TOL * max(big, 1.0)].T
    rng_basis = vt[sv > KERNEL_TOL * max(big, 1.0)].T
    if ker.shape[1]:
        ck = ker.T @ c
        if np.linalg.norm(ck) > INFINITY_OBJECTIVE:
            x = ker @ ck / np.linalg.norm(ck)
            return DistanceResult(math.inf, spec.param.element(x), x, infinite=True)
    c_r = rng_basis.T @ c
    if np.linalg.norm(c_r) <= 1e-14 or rng_basis.shape[1] == 0:
        x = np.zeros(m)
        return DistanceResult(0.0, spec.param.element(x), x)

    # canonical sign so that c and -c follow mirrored paths
    lead = c_r[np.argmax(np.abs(c_r))]
    sign = 1.0 if lead > 0 else -1.0
    c_r = sign * c_r
    red = tuple(np.tensordot(rng_basis.T, b, axes=1) for b in terms)
    r = c_r.size

    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(c_r[:, None], mode="complete")
    hyper = q[:, 1:]
    x0 = c_r / (c_r @ c_r)
    if sg_iters is None:
        sg_iters = 2000 if method == "supergradient" else 100

    starts = []
    for v in init or []:
        v = sign * (rng_basis.T @ np.asarray(v, dtype=float))
        if c_r @ v > 1e-12:
            starts.append(v)
    for _ in range(restarts):
        starts.append(x0 + hyper @ (rng.standard_normal(r - 1) * (0.1 / math.sqrt(r))))

    values, best, total_its = [], None, 0
    for s in starts:
        x, its = _supergradient(s, c_r, red, sg_iters)
        total_its += its
        if method == "smoothed":
            x, its = _polish(x, c_r, red, hyper, x0, maxiter)
            total_its += its
        lval = max(operator_norm(np.tensordot(x, b, axes=1)) for b in red)
        x = x / lval
        val = float(c_r @ x)
        values.append(val)
        if best is None or val > best[0]:
            best = (val, x)
    val, xr = best
    x = sign * (rng_basis @ xr)
    return DistanceResult(
        float(c @ x),
        spec.param.element(x),
        x,
        iterations=total_its,
        restarts=len(starts),
        gap_estimate=float(max(values) - min(values)),
        restart_values=values,
    )


def connes_distance(phi, psi, spec, **kw):
    """Spectral distance between two split states under ``spec``.

    The value is a certified lower bound: the returned witness satisfies
    ``spec(witness) <= 1`` and ``(phi - psi)(witness) = value``.
    """
    c = spec.param.functional(phi) - spec.param.functional(psi)
    return maximize_linear(spec, c, **kw)


def diameter_estimate(spec, net, **kw):
    """Largest pairwise distance in ``net``; a lower bound on the diameter."""
    net = list(net)
    if not net:
        raise ValidationError("state net is empty")
    best = 0.0
    for i in range(len(net)):
        for j in range(i + 1, len(net)):
            res = connes_distance(net[i], net[j], spec, **kw)
            if res.infinite:
                return math.inf
            best = max(best, res.value)
    return best


def compact_diameter_bracket(triple):
    """``(lower, upper)`` for the diameter of the unitarized compacts under ``L_C``.

    A vector state at the smallest ``|d_p|`` and a state vanishing on
    compacts realize the lower value; ``|(f - g)(k)| <= 2 ||D_p^{-1}|| L_C(k)``
    gives the upper one.
    """
    dmin = float(np.min(np.abs(triple.d_p)))
    return 1.0 / dmin, 2.0 / dmin


def diamC_inequality_check(triple, f, compacts, diam_upper=None, tol=1e-9):
    """Sampled ``sup |f(k)|`` over ``L_C(k) <= 1`` against ``||f|| diam_C``.

    ``f`` is a positive semidefinite matrix acting by ``k -> Tr(f k)``;
    each sampled compact is rescaled to ``L_C = 1``.
    """
    f = np.asarray(f, dtype=complex)
    if np.linalg.eigvalsh(0.5 * (f + f.conj().T))[0] < -1e-10:
        raise ValidationError("functional must be positive")
    norm_f = float(np.trace(f).real)
    if diam_upper is None:
        diam_upper = compact_diameter_bracket(triple)[1]
    dp = triple.d_p
    lhs = 0.0
    for k in compacts:
        lc = operator_norm(dp[:, None] * k)
        if lc <= 0:
            continue
        lhs = max(lhs, abs(np.trace(f @ k).real) / lc)
    return BoundReport(
        "compact diameter inequality",
        lhs=lhs,
        rhs=norm_f * diam_upper,
        tolerance=tol,
        anchor="compact-diameter-lemma",
        context={"norm_f": norm_f, "diam_c_upper": diam_upper, "samples": len(compacts)},
    )
