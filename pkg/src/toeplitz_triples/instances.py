"""Concrete instances: circle, unitarized compacts, iterated construction, even doubling."""

from dataclasses import dataclass, field

import numpy as np

from .core import (
    ExtElement,
    Params,
    SymbolSpace,
    TruncatedTriple,
    dirac_ext,
    m_matrix,
    represent,
    require_params,
)
from .linalg import ValidationError, hermitian_eigen, operator_norm

__all__ = [
    "CircleInstance",
    "build_circle",
    "CompactsInstance",
    "build_compacts",
    "build_gamma_j",
    "check_axioms",
    "AxiomsReport",
    "PodlesInstance",
    "build_podles",
    "offdiag_profile",
    "EvenDoubling",
    "even_doubling",
    "instance_from_dict",
]

DEFAULT_GRID = 720


def _shift_power(labels, m):
    """Matrix of multiplication by e^{i m theta}: entry (n + m, n) is one."""
    n = labels.size
    out = np.zeros((n, n), dtype=complex)
    rows = np.arange(n) + m
    ok = (rows >= 0) & (rows < n)
    out[rows[ok], np.arange(n)[ok]] = 1.0
    return out


class CircleInstance(TruncatedTriple):
    """Fourier modes ``-N..N`` of L^2(S^1) with ``D = -i d/dtheta``.

    ``PH`` is spanned by the modes ``n >= 1``; the zero mode sits in ``H_q``.
    The symbol space is spanned by ``1, cos(m theta), sin(m theta)`` for
    ``m <= degree`` acting as banded multiplication matrices.
    """

    def __init__(self, n_max, degree=None, grid_size=DEFAULT_GRID):
        if n_max < 2:
            raise ValidationError(f"circle truncation needs n_max >= 2, got {n_max}")
        degree = n_max if degree is None else int(degree)
        if not 1 <= degree <= 2 * n_max:
            raise ValidationError(f"symbol degree must lie in [1, {2 * n_max}], got {degree}")
        if grid_size <= 2 * degree:
            raise ValidationError(
                f"evaluation grid of {grid_size} points aliases degree {degree} symbols"
            )
        self.n_max = n_max
        self.degree = degree
        self.labels = np.arange(-n_max, n_max + 1)
        grid = 2 * np.pi * np.arange(grid_size) / grid_size

        mats = [np.eye(self.labels.size, dtype=complex)]
        for m in range(1, degree + 1):
            up, down = _shift_power(self.labels, m), _shift_power(self.labels, -m)
            mats.append(0.5 * (up + down))
            mats.append(-0.5j * (up - down))
        unit = np.zeros(len(mats))
        unit[0] = 1.0
        symbols = SymbolSpace(
            basis=np.array(mats),
            grid=grid,
            evaluate=self._grid_values,
            unit=unit,
            name=f"trig-degree-{degree}",
        )
        super().__init__(
            self.labels.astype(float),
            self.labels >= 1,
            label=f"circle-N{n_max}",
            symbols=symbols,
        )

    def fourier_coefficients(self, a):
        """Mean of each band of ``a``; exact for banded multiplication matrices."""
        a = np.asarray(a)
        return {m: complex(np.mean(np.diagonal(a, offset=-m))) for m in range(-self.degree, self.degree + 1)}

    def _grid_values(self, a):
        coeffs = self.fourier_coefficients(a)
        theta = self.symbols.grid
        vals = np.zeros(theta.size, dtype=complex)
        for m, c in coeffs.items():
            if c != 0:
                vals += c * np.exp(1j * m * theta)
        return np.real(vals)

    def fourier_symbol(self, coeffs):
        """Multiplication matrix of ``sum_m c_m e^{i m theta}``; ``coeffs`` maps m to c_m."""
        out = np.zeros((self.dim_h, self.dim_h), dtype=complex)
        for m, c in coeffs.items():
            out += c * _shift_power(self.labels, int(m))
        return out

    def potential_coords(self, theta0, theta1):
        """Symbol coordinates of the truncated Fourier series of a 1-Lipschitz potential.

        The potential is ``min(dist(x, theta0), dist(theta0, theta1))``, which
        separates the point masses at ``theta0`` and ``theta1`` by their arc
        distance; it is a good starting guess for the distance solver.
        """
        grid = self.symbols.grid

        def arc(x, y):
            d = np.abs(x - y) % (2 * np.pi)
            return np.minimum(d, 2 * np.pi - d)

        g = np.minimum(arc(grid, theta0), arc(theta0, theta1))
        coords = [np.mean(g)]
        for m in range(1, self.degree + 1):
            coords.append(2 * np.mean(g * np.cos(m * grid)))
            coords.append(2 * np.mean(g * np.sin(m * grid)))
        return np.array(coords)

    def shift(self):
        return _shift_power(self.labels, 1)

    def grid_index(self, theta, tol=1e-9):
        grid = self.symbols.grid
        d = np.abs((grid - theta + np.pi) % (2 * np.pi) - np.pi)
        j = int(np.argmin(d))
        if d[j] > tol:
            raise ValidationError(f"angle {theta} is not on the {grid.size}-point grid")
        return j

    def to_dict(self):
        return {"kind": "circle", "n_max": self.n_max, "degree": self.degree, "grid_size": self.symbols.grid.size}


def build_circle(n_max, degree=None, grid_size=DEFAULT_GRID):
    return CircleInstance(n_max, degree=degree, grid_size=grid_size)


def scalar_symbols(dim_h):
    return SymbolSpace(
        basis=np.eye(dim_h, dtype=complex)[None],
        grid=np.zeros(1),
        evaluate=lambda a: np.array([np.real(a[0, 0])]),
        unit=np.ones(1),
        name="scalars",
    )


@dataclass(eq=False)
class CompactsInstance:
    """Unitarized compacts on ``H + H`` with ``D = [[0, T*], [T, 0]]``."""

    t_eigen: np.ndarray
    dirac: np.ndarray
    gamma: np.ndarray
    swap: np.ndarray
    triple: TruncatedTriple

    @property
    def n(self):
        return self.t_eigen.size

    def represent(self, k, c=0.0):
        """``pi(k + c I) = diag(k + c I, c I)``."""
        n = self.n
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, :n] = k + c * np.eye(n)
        out[n:, n:] = c * np.eye(n)
        return out

    def apply_j(self, x):
        """The anti-linear ``J``: conjugate coordinates, then swap the summands."""
        return self.swap @ np.conj(x)

    def conj_by_j(self, m):
        """``J m J`` as a (linear) matrix."""
        return self.swap @ np.conj(m) @ self.swap

    def smooth_compact(self, rng):
        """``|T|^{-1} G |T|^{-1}`` with Hermitian Gaussian ``G``."""
        n = self.n
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = 0.5 * (g + g.conj().T)
        w = 1.0 / np.abs(self.t_eigen)
        return w[:, None] * g * w[None, :]

    def summability(self, s):
        return float(np.sum(np.abs(self.t_eigen) ** (-s)))

    def to_dict(self):
        return {"kind": "compacts", "t_eigen": self.t_eigen.tolist()}


def build_compacts(t_eigen):
    t = np.asarray(t_eigen, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("t_eigen must be a non-empty list")
    if np.any(t == 0):
        raise ValidationError(f"T must be invertible; zero at indices {np.flatnonzero(t == 0).tolist()}")
    n = t.size
    tm = np.diag(t).astype(complex)
    d = np.zeros((2 * n, 2 * n), dtype=complex)
    d[:n, n:] = tm.conj().T
    d[n:, :n] = tm
    gamma = np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)
    swap = np.zeros((2 * n, 2 * n), dtype=complex)
    swap[:n, n:] = np.eye(n)
    swap[n:, :n] = np.eye(n)
    triple = TruncatedTriple(np.abs(t), np.ones(n, dtype=bool), label=f"compacts-{n}",
                             symbols=scalar_symbols(n), allow_full=True)
    return CompactsInstance(t, d, gamma, swap, triple)


def build_gamma_j(inst):
    """Return ``(gamma, J)``; ``J`` is a callable acting on vectors."""
    return inst.gamma, inst.apply_j


@dataclass
class AxiomsReport:
    entries: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(e.get("pass", True) for e in self.entries.values())

    def deviations_items(self):
        return sorted(self.entries["7-reality"]["deviations"].items())


def _order_one_defect(inst, ka, kb):
    d = inst.dirac
    pa = inst.represent(ka)
    comm = d @ pa - pa @ d
    jbj = inst.conj_by_j(inst.represent(kb.conj().T))
    return comm @ jbj - jbj @ comm


def check_axioms(inst, samples=5, seed=0, tol=1e-12, ref=None, truncations=(4, 8, 16)):
    """Run the axiom checklist on ``inst``.

    The order-one defect is measured against a reference truncation ``ref``
    (default: the instance size): for each smaller ``N`` we record the norm
    of the part of the defect living outside the first ``N`` modes of each
    summand.  A strictly decreasing profile is the finite signature of a
    compact operator.
    """
    rng = np.random.default_rng(seed)
    n = inst.n
    ref = n if ref is None else ref
    if ref > n or max(truncations) >= ref:
        raise ValidationError("truncations must be smaller than the reference size")
    d, g = inst.dirac, inst.gamma
    entries = {}

    svals = (0.5, 1.0, 2.0)
    half = n // 2
    entries["1-infinitesimal-order"] = {
        "sums": {str(s): inst.summability(s) for s in svals},
        "tail_sums": {str(s): float(np.sum(np.abs(inst.t_eigen[half:]) ** (-s))) for s in svals},
    }

    defects = []
    commute = 0.0
    smooth = []
    for _ in range(samples):
        ka, kb = inst.smooth_compact(rng), inst.smooth_compact(rng)
        la, lb = rng.standard_normal(2)
        x = _order_one_defect(inst, ka, kb)
        profile = []
        for m in truncations:
            keep = np.zeros(2 * n, dtype=bool)
            keep[:m] = True
            keep[n : n + m] = True
            inner = np.where(np.outer(keep, keep), x, 0.0)
            mask = np.zeros(2 * n, dtype=bool)
            mask[:ref] = True
            mask[n : n + ref] = True
            outer = np.where(np.outer(mask, mask), x, 0.0)
            profile.append(operator_norm(outer - inner))
        decreasing = all(b < a for a, b in zip(profile, profile[1:]))
        defects.append({"tail_norms": profile, "full_norm": operator_norm(x), "strictly_decreasing": decreasing})

        pa = inst.represent(ka, la)
        jbj = inst.conj_by_j(inst.represent(kb.conj().T, np.conj(lb)))
        commute = max(commute, float(np.max(np.abs(pa @ jbj - jbj @ pa))))

        absd = np.abs(d)
        cur = pa
        norms = []
        for _m in range(3):
            cur = absd @ cur - cur @ absd
            norms.append(operator_norm(cur))
        smooth.append(norms)

    entries["2-order-one"] = {
        "truncations": list(truncations),
        "reference": ref,
        "samples": defects,
        "pass": all(s["strictly_decreasing"] for s in defects),
    }
    entries["3-smoothness"] = {
        "delta_norms": smooth,
        "pass": bool(np.all(np.isfinite(smooth))),
    }
    for key in ("4-orientability", "5-finiteness", "6-poincare-duality"):
        entries[key] = {"status": "not decidable in this model"}

    v = rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)
    j2 = float(np.max(np.abs(inst.apply_j(inst.apply_j(v)) - v)))
    jd = float(np.max(np.abs(inst.conj_by_j(d) - d)))
    jg = float(np.max(np.abs(inst.conj_by_j(g) + g)))
    g2 = float(np.max(np.abs(g @ g - np.eye(2 * n))))
    gd = float(np.max(np.abs(g @ d + d @ g)))
    ident = {"J^2=I": j2, "JD=DJ": jd, "Jgamma=-gammaJ": jg, "gamma^2=I": g2,
             "gammaD=-Dgamma": gd, "[pi(a),Jpi(b*)J]=0": commute}
    entries["7-reality"] = {
        "deviations": ident,
        "tolerance": tol,
        "pass": all(val <= tol for val in ident.values()),
    }
    return AxiomsReport(entries)


@dataclass(eq=False)
class PodlesInstance:
    """Second-level extension built from a circle extension.

    The level-2 Hilbert space is ``K`` in an eigenbasis of ``D_{alpha,beta}``
    where the first ``2 n_p`` vectors span ``Q K = H_+ + H_+``.  Level-2
    symbols are the level-1 represented elements ``pi(T(a) + k)`` written in
    that basis, and a level-2 element adds an arbitrary compact on ``QK``.
    Relations of the quantum sphere generators (with parameters ``q`` and
    ``c`` in ``meta``) are recorded but not realized.
    """

    level1: CircleInstance
    p1: Params
    p2: Params
    unitary: np.ndarray
    triple: TruncatedTriple
    meta: dict = field(default_factory=dict)

    def level1_symbol(self, t):
        w = self.unitary
        return w.conj().T @ represent(self.level1, t) @ w

    def element(self, t, compact=None):
        """Level-2 element ``T_2(pi(t)) + compact``."""
        n = self.triple.n_p
        c = np.zeros((n, n), dtype=complex) if compact is None else compact
        return ExtElement(self.level1_symbol(t), c)

    def pair_blocks(self, e):
        """Diagonal pair ``(u, y)`` of a level-2 element in the level-1 basis.

        ``u`` acts on ``QK`` (Toeplitz part plus compact), ``y`` on all of ``K``.
        """
        w = self.unitary
        pq = self.triple.p_idx
        u = self.triple.compress(e.symbol) + e.compact
        wq = w[:, pq]
        return wq @ u @ wq.conj().T, w @ e.symbol @ w.conj().T

    def to_dict(self):
        return {
            "kind": "podles",
            "n_max": self.level1.n_max,
            "level1": [self.p1.alpha, self.p1.beta],
            "level2": [self.p2.alpha, self.p2.beta],
        }


def _podles_symbols(level1, w):
    mats = []
    zero_k = np.zeros((level1.n_p, level1.n_p), dtype=complex)
    for s in level1.symbols.basis:
        mats.append(w.conj().T @ represent(level1, ExtElement(s, zero_k)) @ w)
    zero_s = np.zeros((level1.dim_h, level1.dim_h), dtype=complex)
    for k in level1.compact_basis:
        mats.append(w.conj().T @ represent(level1, ExtElement(zero_s, k)) @ w)
    unit = np.zeros(len(mats))
    unit[: level1.symbols.dim] = level1.symbols.unit
    dim = mats[0].shape[0]
    return SymbolSpace(
        basis=np.array(mats),
        grid=np.arange(dim, dtype=float),
        evaluate=lambda a: np.real(np.diag(a)).copy(),
        unit=unit,
        name="level1-extension",
    )


def build_podles(n_max, p1, p2, q=0.5, c=0.0):
    require_params(p1)
    require_params(p2)
    level1 = build_circle(n_max)
    n_p, n_q = level1.n_p, level1.n_q
    m, m_eig = m_matrix(p1)
    _, m_vec = hermitian_eigen(m.astype(complex), method="lapack")
    dim_k = level1.dim_k
    w = np.zeros((dim_k, dim_k), dtype=complex)
    dirac2 = np.zeros(dim_k)
    # vectors (e_i, 0) and (0, e_i) in the two H_p copies span an M-invariant plane
    for i in range(n_p):
        for j in range(2):
            col = 2 * i + j
            w[i, col] = m_vec[0, j]
            w[n_p + i, col] = m_vec[1, j]
            dirac2[col] = level1.d_p[i] * m_eig[j]
    for i in range(n_q):
        col = 2 * n_p + i
        w[2 * n_p + i, col] = 1.0
        dirac2[col] = level1.d_q[i] / p1.alpha
    mask = np.zeros(dim_k, dtype=bool)
    mask[: 2 * n_p] = True
    d1 = dirac_ext(level1, p1)
    if np.max(np.abs(w.conj().T @ d1 @ w - np.diag(dirac2))) > 1e-10:
        raise RuntimeError("level-1 Dirac operator was not diagonalized")
    symbols = _podles_symbols(level1, w)
    triple = TruncatedTriple(dirac2, mask, label=f"podles-N{n_max}", symbols=symbols)
    meta = {
        "q": q,
        "c": c,
        "relations": ["A = A*", "BA = q^2 AB", "B*B = A - A^2 + cI", "BB* = q^2 A - q^4 A^2 + cI"],
        "realized": False,
    }
    return PodlesInstance(level1, p1, p2, w, triple, meta)


def offdiag_profile(d_p_fn, block_fn, sizes, growth_tol=1.05):
    """Norms of ``D_P v_N`` along truncations; flags unbounded growth.

    ``d_p_fn(N)`` returns the diagonal of ``D_P`` and ``block_fn(N)`` the
    compact block at truncation ``N``.  The block is in the admissible
    profile when the last norm ratio stays below ``growth_tol``.
    """
    norms = []
    for n in sizes:
        dp = np.asarray(d_p_fn(n))
        v = np.asarray(block_fn(n))
        norms.append(max(operator_norm(dp[:, None] * v), operator_norm(v * dp[None, :])))
    growth = norms[-1] / norms[-2] if len(norms) > 1 and norms[-2] > 0 else 1.0
    return {"sizes": list(sizes), "norms": norms, "growth": growth, "admissible": growth <= growth_tol}


@dataclass(eq=False)
class EvenDoubling:
    base: TruncatedTriple
    params: Params
    dirac: np.ndarray
    gamma: np.ndarray

    def represent(self, t):
        pi = represent(self.base, t)
        n = pi.shape[0]
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, :n] = pi
        out[n:, n:] = pi
        return out

    def lip(self, t):
        pi = self.represent(t)
        return operator_norm(self.dirac @ pi - pi @ self.dirac)

    def anticommutator_defect(self):
        return float(np.max(np.abs(self.gamma @ self.dirac + self.dirac @ self.gamma)))

    def grading_defect(self, t):
        pi = self.represent(t)
        return float(np.max(np.abs(self.gamma @ pi - pi @ self.gamma)))


def even_doubling(triple, p):
    require_params(p)
    d = dirac_ext(triple, p)
    n = d.shape[0]
    dhat = np.zeros((2 * n, 2 * n), dtype=complex)
    dhat[:n, n:] = d
    dhat[n:, :n] = d
    gamma = np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)
    return EvenDoubling(triple, p, dhat, gamma)


def instance_from_dict(spec):
    """Build a triple from its scenario description."""
    kind = spec["kind"]
    if kind == "circle":
        return build_circle(spec["n_max"], degree=spec.get("degree"), grid_size=spec.get("grid_size", DEFAULT_GRID))
    if kind == "compacts":
        return build_compacts(spec["t_eigen"])
    if kind == "podles":
        return build_podles(spec["n_max"], Params(*spec["level1"]), Params(*spec["level2"]))
    if kind == "custom":
        return TruncatedTriple(spec["dirac"], spec["p_mask"], label=spec.get("label", "custom"))
    raise ValidationError(f"unknown instance kind {kind!r}")
