"""Truncated Toeplitz-type quadruples and the extended spectral triples.

A :class:`TruncatedTriple` is a finite model of ``((A, H, D), P)``: the
Dirac operator is diagonal in the chosen basis, ``P`` is a boolean mask
on that basis, and a :class:`SymbolSpace` describes which self-adjoint
operators play the role of the algebra.  From it we build, for each
parameter pair ``(alpha, beta)``, the representation of the extension on
``K = H_p + H_p + H_q`` and the Dirac operator ``D_{alpha,beta}``.

Operators on ``K`` always use the block order ``[H_p (extension copy),
H_p, H_q]``; the lower copy of ``H`` is permuted so that its ``P`` part
comes first.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .linalg import ValidationError, hermitian_eigen, is_hermitian, operator_norm
from .reports import BoundReport

__all__ = [
    "ParameterError",
    "ParamViolation",
    "Params",
    "SymbolSpace",
    "TruncatedTriple",
    "ExtElement",
    "hermitian_basis",
    "matrix_unit_symbols",
    "validate_params",
    "require_params",
    "t_map",
    "theta",
    "represent",
    "dirac_ext",
    "commutator_ext",
    "commutator_direct",
    "lip_c",
    "lip_a",
    "lip_ext",
    "m_matrix",
    "scaling_matrix",
    "scaling_identity_check",
    "trace_identity_check",
    "sandwich_factors",
    "random_element",
]

ZERO_MODE_TOL = 1e-12


class ParameterError(ValueError):
    """A parameter pair lies outside the admissible set."""


@dataclass(frozen=True)
class ParamViolation:
    constraint: str
    value: float
    bound: float

    @property
    def excess(self):
        return self.value - self.bound

    def __str__(self):
        return f"{self.constraint}: got {self.value:g}, bound {self.bound:g}"


@dataclass(frozen=True)
class Params:
    """A point ``(alpha, beta)``; ``Params(0, inf)`` is the one-point limit."""

    alpha: float
    beta: float

    @property
    def product(self):
        if self.alpha == 0:
            return 0.0
        return self.alpha * self.beta

    def __iter__(self):
        return iter((self.alpha, self.beta))


def validate_params(p):
    """Return ``None`` when ``p`` is admissible, else a :class:`ParamViolation`."""
    alpha, beta = float(p.alpha), float(p.beta)
    if math.isnan(alpha) or math.isnan(beta):
        return ParamViolation("parameters must be numbers", math.nan, 0.0)
    if alpha < 0:
        return ParamViolation("alpha >= 0", alpha, 0.0)
    if alpha == 0 and math.isinf(beta) and beta > 0:
        return None
    if not beta > 0:
        return ParamViolation("beta > 0", beta, 0.0)
    if math.isinf(beta) or math.isinf(alpha):
        return ParamViolation("finite parameters (except the (0, inf) point)", math.inf, 0.0)
    if alpha > 0 and alpha * beta > 1.0 + 1e-12:
        return ParamViolation("alpha*beta <= 1", alpha * beta, 1.0)
    return None


def require_params(p, positive_alpha=True):
    bad = validate_params(p)
    if bad is not None:
        raise ParameterError(f"invalid parameters ({p.alpha}, {p.beta}): {bad}")
    if positive_alpha and not p.alpha > 0:
        raise ParameterError(
            "alpha = 0 has no Dirac matrix; it is the compacts limit space"
        )
    return p


def hermitian_basis(n):
    """Real basis of the n x n Hermitian matrices, shape ``(n*n, n, n)``."""
    out = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            out.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[i, j] = 1j
            f[j, i] = -1j
            out.append(f)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class SymbolSpace:
    """Self-adjoint symbols available to the solver, plus an evaluation grid.

    ``basis`` spans the symbol coordinates, ``evaluate(a)`` returns the
    values of the symbol ``a`` at every grid point (a probability vector
    of grid weights turns this into a state on the algebra), and ``unit``
    is the coordinate vector of the identity.
    """

    basis: np.ndarray
    grid: np.ndarray
    evaluate: Callable[[np.ndarray], np.ndarray]
    unit: np.ndarray
    name: str = "symbols"
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.basis.shape[0]

    def matrix(self, coords):
        return np.tensordot(np.asarray(coords, dtype=float), self.basis, axes=1)


def matrix_unit_symbols(dim_h):
    """All Hermitian matrices; grid points are the basis vector states."""
    basis = hermitian_basis(dim_h)
    unit = np.zeros(len(basis))
    unit[:dim_h] = 1.0
    return SymbolSpace(
        basis=basis,
        grid=np.arange(dim_h, dtype=float),
        evaluate=lambda a: np.real(np.diag(a)).copy(),
        unit=unit,
        name="matrix-units",
    )


class TruncatedTriple:
    """Finite model of a quadruple of Toeplitz type.

    Parameters
    ----------
    dirac : sequence of float
        Eigenvalues of ``D`` on the retained basis vectors.
    p_mask : sequence of bool
        Membership of each basis vector in ``PH``.
    label : str
    symbols : SymbolSpace, optional
        Defaults to all Hermitian matrices with vector-state grid points.
    allow_full : bool
        Permit ``p_mask`` to be all true (the compacts example).
    """

    def __init__(self, dirac, p_mask, label="", symbols=None, allow_full=False):
        dirac = np.asarray(dirac, dtype=float)
        p_mask = np.asarray(p_mask, dtype=bool)
        if dirac.ndim != 1 or dirac.size == 0:
            raise ValidationError("dirac must be a non-empty list of reals")
        if p_mask.shape != dirac.shape:
            raise ValidationError("p_mask and dirac must have the same length")
        if not p_mask.any():
            raise ValidationError("p_mask must contain at least one true entry")
        if p_mask.all() and not allow_full:
            raise ValidationError("p_mask must contain a false entry (nontrivial extension)")
        small = np.abs(dirac[p_mask]) <= ZERO_MODE_TOL
        if small.any():
            idx = np.flatnonzero(p_mask)[small]
            raise ValidationError(
                f"D restricted to PH must have trivial kernel; zero eigenvalue at indices {idx.tolist()}"
            )
        self.dirac = dirac
        self.p_mask = p_mask
        self.label = label
        self.symbols = symbols if symbols is not None else matrix_unit_symbols(dirac.size)
        if self.symbols.basis.shape[1:] != (dirac.size, dirac.size):
            raise ValidationError("symbol basis does not match dim_h")

    @property
    def dim_h(self):
        return self.dirac.size

    @cached_property
    def p_idx(self):
        return np.flatnonzero(self.p_mask)

    @cached_property
    def q_idx(self):
        return np.flatnonzero(~self.p_mask)

    @property
    def n_p(self):
        return self.p_idx.size

    @property
    def n_q(self):
        return self.q_idx.size

    @property
    def dim_k(self):
        return self.n_p + self.dim_h

    @cached_property
    def perm(self):
        return np.concatenate([self.p_idx, self.q_idx])

    @property
    def d_p(self):
        return self.dirac[self.p_idx]

    @property
    def d_q(self):
        return self.dirac[self.q_idx]

    @cached_property
    def D(self):
        return np.diag(self.dirac).astype(complex)

    @cached_property
    def P(self):
        return np.diag(self.p_mask.astype(float)).astype(complex)

    @cached_property
    def compact_basis(self):
        return hermitian_basis(self.n_p)

    def compress(self, a):
        """``T(a) = P a |PH`` as an ``n_p x n_p`` matrix."""
        return np.asarray(a)[np.ix_(self.p_idx, self.p_idx)]

    def blocks(self, a):
        a = np.asarray(a)
        p, q = self.p_idx, self.q_idx
        return a[np.ix_(p, p)], a[np.ix_(p, q)], a[np.ix_(q, p)], a[np.ix_(q, q)]

    def zero_element(self):
        return ExtElement(
            np.zeros((self.dim_h, self.dim_h), dtype=complex),
            np.zeros((self.n_p, self.n_p), dtype=complex),
        )

    def unit_element(self):
        return ExtElement(np.eye(self.dim_h, dtype=complex), np.zeros((self.n_p, self.n_p), dtype=complex))

    def compact_element(self, k):
        k = np.asarray(k, dtype=complex)
        if k.shape != (self.n_p, self.n_p):
            raise ValidationError(f"compact block must be {self.n_p}x{self.n_p}, got {k.shape}")
        return ExtElement(np.zeros((self.dim_h, self.dim_h), dtype=complex), k)

    def to_dict(self):
        return {
            "kind": "custom",
            "label": self.label,
            "dirac": self.dirac.tolist(),
            "p_mask": self.p_mask.tolist(),
        }

    def __repr__(self):
        return f"TruncatedTriple(label={self.label!r}, dim_h={self.dim_h}, n_p={self.n_p})"


@dataclass(frozen=True, eq=False)
class ExtElement:
    """An element ``T(a) + k`` of the extension: a symbol plus a compact block."""

    symbol: np.ndarray
    compact: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "symbol", np.asarray(self.symbol, dtype=complex))
        object.__setattr__(self, "compact", np.asarray(self.compact, dtype=complex))

    def is_self_adjoint(self):
        return is_hermitian(self.symbol) and is_hermitian(self.compact)

    def adjoint(self):
        return ExtElement(self.symbol.conj().T, self.compact.conj().T)

    def __add__(self, other):
        return ExtElement(self.symbol + other.symbol, self.compact + other.compact)

    def __sub__(self, other):
        return ExtElement(self.symbol - other.symbol, self.compact - other.compact)

    def __neg__(self):
        return ExtElement(-self.symbol, -self.compact)

    def __mul__(self, c):
        return ExtElement(c * self.symbol, c * self.compact)

    __rmul__ = __mul__


def _check_symbol(triple, a):
    a = np.asarray(a, dtype=complex)
    if a.shape != (triple.dim_h, triple.dim_h):
        raise ValidationError(f"symbol must be {triple.dim_h}x{triple.dim_h}, got {a.shape}")
    return a


def t_map(triple, a):
    """The Toeplitz map: the element with symbol ``a`` and no compact part."""
    a = _check_symbol(triple, a)
    return ExtElement(a, np.zeros((triple.n_p, triple.n_p), dtype=complex))


def theta(t):
    """Compact part of ``t``, i.e. ``t - T(rho(t))``."""
    return t.compact.copy()


def represent(triple, t):
    """Block-diagonal representation ``diag(T(a) + k, a)`` on ``K``."""
    a = _check_symbol(triple, t.symbol)
    n_p = triple.n_p
    out = np.zeros((triple.dim_k, triple.dim_k), dtype=complex)
    out[:n_p, :n_p] = triple.compress(a) + t.compact
    perm = triple.perm
    out[n_p:, n_p:] = a[np.ix_(perm, perm)]
    return out


def dirac_ext(triple, p):
    require_params(p)
    n_p, n_q = triple.n_p, triple.n_q
    dp = np.diag(triple.d_p)
    out = np.zeros((triple.dim_k, triple.dim_k), dtype=complex)
    out[:n_p, n_p : 2 * n_p] = p.beta * dp
    out[n_p : 2 * n_p, :n_p] = p.beta * dp
    out[n_p : 2 * n_p, n_p : 2 * n_p] = dp / p.alpha
    if n_q:
        out[2 * n_p :, 2 * n_p :] = np.diag(triple.d_q) / p.alpha
    return out


def commutator_direct(triple, t, p):
    d = dirac_ext(triple, p)
    pi = represent(triple, t)
    return d @ pi - pi @ d


def commutator_ext(triple, t, p):
    """``[D_{alpha,beta}, pi(t)]`` assembled block by block.

    The beta part only touches the first block row and column; the
    1/alpha part is ``[D, a]`` on the lower copy of ``H``.
    """
    require_params(p)
    a = _check_symbol(triple, t.symbol)
    k = t.compact
    n_p = triple.n_p
    dp = np.diag(triple.d_p)
    a_pp, a_pq, a_qp, _ = triple.blocks(a)
    comm_pp = dp @ a_pp - a_pp @ dp

    out = np.zeros((triple.dim_k, triple.dim_k), dtype=complex)
    out[:n_p, n_p : 2 * n_p] = p.beta * (comm_pp - k @ dp)
    out[n_p : 2 * n_p, :n_p] = p.beta * (comm_pp + dp @ k)
    if triple.n_q:
        out[:n_p, 2 * n_p :] = p.beta * (dp @ a_pq)
        out[2 * n_p :, :n_p] = -p.beta * (a_qp @ dp)
    perm = triple.perm
    d = triple.dirac[perm]
    ap = a[np.ix_(perm, perm)]
    out[n_p:, n_p:] += (d[:, None] * ap - ap * d[None, :]) / p.alpha
    return out


def lip_c(triple, k):
    """``L_C(k + lambda I) = ||D_p k||``; the scalar part never enters."""
    k = np.asarray(k, dtype=complex)
    return operator_norm(triple.d_p[:, None] * k)


def lip_a(triple, a):
    a = _check_symbol(triple, a)
    d = triple.dirac
    return operator_norm(d[:, None] * a - a * d[None, :])


def lip_ext(triple, t, p):
    return operator_norm(commutator_ext(triple, t, p))


def m_matrix(p):
    """The 2x2 matrix governing ``D_{alpha,beta}`` on each ``(e_i, e_i)`` plane."""
    if not p.alpha > 0:
        raise ParameterError("m_matrix needs alpha > 0")
    m = np.array([[0.0, p.beta], [p.beta, 1.0 / p.alpha]])
    root = math.sqrt(1.0 + 4.0 * (p.alpha * p.beta) ** 2)
    eig = np.array([(1.0 - root), (1.0 + root)]) / (2.0 * p.alpha)
    return m, eig


def sandwich_factors(p, q):
    """``(min, max)`` of ``{gamma/alpha, alpha beta^2 / (gamma delta^2)}`` for p=(alpha,beta), q=(gamma,delta)."""
    a = q.alpha / p.alpha
    b = p.alpha * p.beta**2 / (q.alpha * q.beta**2)
    return min(a, b), max(a, b)


def scaling_matrix(triple, p, q):
    """Diagonal ``S`` with ``D_p = S D_q S`` (first block scaled differently)."""
    first = math.sqrt(p.alpha / q.alpha) * (p.beta / q.beta)
    rest = math.sqrt(q.alpha / p.alpha)
    diag = np.full(triple.dim_k, rest)
    diag[: triple.n_p] = first
    return np.diag(diag)


def scaling_identity_check(triple, p, q, tol=1e-10):
    require_params(p)
    require_params(q)
    s = scaling_matrix(triple, p, q)
    lhs = dirac_ext(triple, p)
    rhs = s @ dirac_ext(triple, q) @ s
    dev = float(np.max(np.abs(lhs - rhs)))
    return BoundReport(
        "scaling identity",
        lhs=dev,
        rhs=0.0,
        tolerance=tol,
        anchor="dirac-rescaling",
        context={"p": [p.alpha, p.beta], "q": [q.alpha, q.beta], "triple": triple.label},
    )


def trace_identity_check(triple, p, s, tol=1e-10):
    """Compare ``Tr|D_{alpha,beta}|^{-s}`` with its closed form.

    Both sides skip zero modes of ``D`` on ``H_q``; their number is kept
    in the report context.
    """
    require_params(p)
    eig, _ = hermitian_eigen(dirac_ext(triple, p))
    scale = max(np.max(np.abs(eig)), 1.0)
    nonzero = np.abs(eig) > ZERO_MODE_TOL * scale
    lhs = float(np.sum(np.abs(eig[nonzero]) ** (-s)))

    _, m_eig = m_matrix(p)
    dq = triple.d_q
    dq_nonzero = dq[np.abs(dq) > ZERO_MODE_TOL * scale]
    rhs = float(
        np.sum(np.abs(m_eig) ** (-s)) * np.sum(np.abs(triple.d_p) ** (-s))
        + p.alpha**s * np.sum(np.abs(dq_nonzero) ** (-s))
    )
    return BoundReport(
        "trace identity",
        lhs=abs(lhs - rhs),
        rhs=0.0,
        tolerance=tol * max(1.0, abs(rhs)),
        anchor="summability-trace",
        context={
            "p": [p.alpha, p.beta],
            "s": s,
            "trace_direct": lhs,
            "trace_formula": rhs,
            "zero_modes_skipped": int(np.count_nonzero(~nonzero)),
            "triple": triple.label,
        },
    )


def random_element(triple, rng, compact_scale=1.0, symbol_scale=1.0):
    """Random self-adjoint ``T(a) + k`` with Gaussian coordinates."""
    coords = rng.standard_normal(triple.symbols.dim) * symbol_scale
    a = triple.symbols.matrix(coords)
    g = rng.standard_normal((triple.n_p, triple.n_p)) + 1j * rng.standard_normal((triple.n_p, triple.n_p))
    k = 0.5 * compact_scale * (g + g.conj().T)
    return ExtElement(a, k)
