"""Numerical versions of the h -> H -> j conversions and their converse.

* ``build_H_from_h``: H = int e^{-H1} with H1 = int h, tabulated.
* ``build_H_from_j``: j1 = C1 - 2 int j, j2 = int 1/sqrt(j1) on the
  positivity interval J0, and H = j2^{-1}(s + C2) on I1 = j2(J0) - C2.
* ``check_linkage``: j(H) = -H'' and h = -H''/H' on a table.
* ``g_from_H``: g = sign1 * int H'/sqrt(H'^2 + sign2 C^2) + D.
* ``forward_direction``: u = H(f) is harmonic and solves the modified
  equation with j(u) = h(K(u)) H'(K(u)).
* ``estimate_k``: the weakened-equation constant from samples.

All quadrature is adaptive Simpson, vectorised over panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import elliptic as el
from . import families as fm
from . import transforms as tr
from .errors import (
    BranchError,
    DomainError,
    EmptyDomainError,
    NonIntegrableError,
    ValidationError,
)
from .report import ResidualReport
from .wirtinger import DEFAULT_ODE_STEP, jet_arrays_adaptive, log_second_derivative

__all__ = [
    "adaptive_simpson",
    "DiffeoTable",
    "CharacteristicPair",
    "JTable",
    "build_H_from_h",
    "build_H_from_j",
    "JSpec",
    "closed_form_j",
    "check_linkage",
    "g_from_H",
    "forward_direction",
    "estimate_k",
    "weakened_terms",
]

QUAD_TOL = 1e-10
POLE_BOUND = 1e8
MIN_INTERVALS = 2000
INVERSE_TOL = 1e-12
MAX_PANELS = 1 << 20

Fn = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(fn: Fn, a, b, tol: float = QUAD_TOL, max_depth: int = 50,
                     min_depth: int = 2) -> np.ndarray:
    """Integrals of ``fn`` over [a_i, b_i], vectorised over the pairs.

    Each panel is split until the two-halves Simpson estimate agrees with
    the whole-panel estimate to 15 * tol (tolerance halves per split);
    accepted panels add the Richardson-corrected value.  ``fn`` must accept
    arrays.  Non-finite panel values propagate as NaN.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = np.broadcast(a, b).shape
    lo = np.broadcast_to(a, shape).ravel().copy()
    hi = np.broadcast_to(b, shape).ravel().copy()
    out = np.zeros(lo.size)
    owner = np.arange(lo.size)
    mid = 0.5 * (lo + hi)
    f3 = np.asarray(fn(np.concatenate([lo, mid, hi])), dtype=float)
    flo, fm_, fhi = np.split(f3, 3)
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fm_ + fhi)
    tols = np.full(lo.size, float(tol))
    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f2 = np.asarray(fn(np.concatenate([lm, rm])), dtype=float)
        flm, frm = np.split(f2, 2)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fm_)
        right = (hi - mid) / 6.0 * (fm_ + 4.0 * frm + fhi)
        delta = left + right - whole
        floor = 64.0 * np.finfo(float).eps * (np.abs(left) + np.abs(right))
        done = ((np.abs(delta) <= np.maximum(15.0 * tols, floor)) | ~np.isfinite(delta)
                | (depth == max_depth) | (lo.size > MAX_PANELS))
        if depth < min_depth:
            done &= ~np.isfinite(delta)
        np.add.at(out, owner[done], (left + right + delta / 15.0)[done])
        k = ~done
        lo, mid, hi = (np.concatenate([lo[k], mid[k]]), np.concatenate([lm[k], rm[k]]),
                       np.concatenate([mid[k], hi[k]]))
        flo, fm_, fhi = (np.concatenate([flo[k], fm_[k]]), np.concatenate([flm[k], frm[k]]),
                         np.concatenate([fm_[k], fhi[k]]))
        whole = np.concatenate([left[k], right[k]])
        tols = np.concatenate([tols[k], tols[k]]) * 0.5
        owner = np.concatenate([owner[k], owner[k]])
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def _integral(fn: Fn, a: float, b: float, tol: float = QUAD_TOL) -> float:
    """Scalar integral; an infinite endpoint is mapped onto (0, 1]."""
    if a == b:
        return 0.0
    if math.isinf(a) and math.isinf(b):
        return _integral(fn, a, 0.0, tol) + _integral(fn, 0.0, b, tol)
    if math.isinf(a) or math.isinf(b):
        sgn = 1.0 if math.isinf(b) else -1.0    # infinite end lies at sgn * inf
        c = a if math.isinf(b) else b

        def mapped(v):
            v = np.asarray(v, dtype=float)
            out = np.zeros(v.shape)
            ok = v > 0
            vv = v[ok]
            out[ok] = np.asarray(fn(c + sgn * (1.0 - vv) / vv), dtype=float) / (vv * vv)
            return out

        val = adaptive_simpson(mapped, 0.0, 1.0, tol)
        # a < b always; the sign of the mapped orientation
        return float(val)
    return float(adaptive_simpson(fn, a, b, tol))


class _Primitive:
    """P(s) = P(ref) + int_ref^s fn, tabulated on ``nodes`` and refined by quadrature."""

    def __init__(self, fn: Fn, nodes: np.ndarray, ref_index: int, ref_value: float,
                 tol: float = QUAD_TOL):
        self.fn = fn
        self.nodes = np.asarray(nodes, dtype=float)
        self.tol = tol
        panels = adaptive_simpson(fn, self.nodes[:-1], self.nodes[1:], tol / max(1, self.nodes.size))
        cum = np.concatenate([[0.0], np.cumsum(panels)])
        self.values = cum - cum[ref_index] + ref_value

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, s), 1, self.nodes.size - 1)
        near = np.where(np.abs(s - self.nodes[k - 1]) <= np.abs(self.nodes[k] - s), k - 1, k)
        base = self.nodes[near]
        extra = adaptive_simpson(self.fn, base, s, self.tol * 1e-3)
        return self.values[near] + extra

    def hermite(self, s) -> np.ndarray:
        """Cubic Hermite interpolant using the integrand as exact slope."""
        if not hasattr(self, "_slopes"):
            self._slopes = np.asarray(self.fn(self.nodes), dtype=float)
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, s, side="right") - 1, 0, self.nodes.size - 2)
        h = self.nodes[k + 1] - self.nodes[k]
        t = (s - self.nodes[k]) / h
        t2, t3 = t * t, t * t * t
        return ((2 * t3 - 3 * t2 + 1) * self.values[k] + (t3 - 2 * t2 + t) * h * self._slopes[k]
                + (-2 * t3 + 3 * t2) * self.values[k + 1] + (t3 - t2) * h * self._slopes[k + 1])


def _guarded(h: Fn, bound: float = POLE_BOUND) -> Fn:
    def wrapped(s):
        v = np.asarray(h(np.asarray(s, dtype=float)), dtype=float)
        if np.any(~np.isfinite(v)) or np.any(np.abs(v) > bound):
            raise NonIntegrableError(f"|h| exceeds {bound:g} inside the interval: pole")
        return np.broadcast_to(v, np.shape(s)).astype(float)

    return wrapped


def _d_uniform(v: np.ndarray, step: float) -> np.ndarray:
    """Fourth-order first derivative of samples on a uniform grid."""
    n = v.size
    if n < 5:
        return np.gradient(v, step)
    d = np.empty(n)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * step)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * step)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * step)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * step)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * step)
    return d


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class DiffeoTable:
    """Increasing diffeomorphism H tabulated on a uniform grid.

    Evaluation is cubic Hermite on (values, derivs).  ``second`` is H''
    obtained by differentiating the tabulated H' (fourth order).
    """

    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = np.asarray(self.nodes, dtype=float)
        if n.ndim != 1 or n.size < 5:
            raise ValidationError("a table needs at least 5 nodes")
        if not np.all(np.diff(n) > 0):
            raise ValidationError("table nodes must be strictly increasing")
        if not np.all(np.diff(self.values) > 0):
            raise ValidationError("table values are not strictly increasing")
        if not np.all(self.derivs > 1e-12):
            raise ValidationError("table derivative is not bounded away from 0")

    @property
    def step(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    @property
    def range(self) -> tuple[float, float]:
        return float(self.values[0]), float(self.values[-1])

    def _cell(self, s):
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.nodes, s, side="right") - 1, 0, self.nodes.size - 2)
        h = self.nodes[k + 1] - self.nodes[k]
        t = (s - self.nodes[k]) / h
        return s, k, h, t

    def __call__(self, s):
        s, k, h, t = self._cell(s)
        y0, y1 = self.values[k], self.values[k + 1]
        d0, d1 = self.derivs[k] * h, self.derivs[k + 1] * h
        t2, t3 = t * t, t * t * t
        out = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0
               + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1)
        lo, hi = self.domain
        out = np.where((s >= lo) & (s <= hi), out, np.nan)
        return float(out) if out.ndim == 0 else out

    def deriv(self, s):
        s, k, h, t = self._cell(s)
        y0, y1 = self.values[k], self.values[k + 1]
        d0, d1 = self.derivs[k] * h, self.derivs[k + 1] * h
        t2 = t * t
        out = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * d0
               + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * d1) / h
        lo, hi = self.domain
        out = np.where((s >= lo) & (s <= hi), out, np.nan)
        return float(out) if out.ndim == 0 else out

    def second_at_nodes(self) -> np.ndarray:
        return _d_uniform(np.asarray(self.derivs, dtype=float), self.step)

    def second(self, s):
        """H'' by differentiating the tabulated H', interpolated linearly."""
        s = np.asarray(s, dtype=float)
        out = np.interp(s, self.nodes, self.second_at_nodes(), left=np.nan, right=np.nan)
        return float(out) if out.ndim == 0 else out

    def characteristic_at_nodes(self) -> np.ndarray:
        """h = -H''/H' on the nodes."""
        return -self.second_at_nodes() / self.derivs

    def inverse(self, t):
        """K = H^{-1}: bracketed bisection on the interpolant, then one Newton step."""
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        lo_v, hi_v = self.range
        ok = (flat >= lo_v) & (flat <= hi_v)
        k = np.clip(np.searchsorted(self.values, flat, side="right") - 1, 0, self.nodes.size - 2)
        a = self.nodes[k].copy()
        b = self.nodes[k + 1].copy()
        n_iter = max(1, int(math.ceil(math.log2(self.step / INVERSE_TOL))) + 1)
        for _ in range(n_iter):
            m = 0.5 * (a + b)
            below = self(m) < flat
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        s = 0.5 * (a + b)
        s = s - (self(s) - flat) / self.deriv(s)
        s = np.where(ok, np.clip(s, *self.domain), np.nan).reshape(t.shape)
        return float(s) if s.ndim == 0 else s


def _n_nodes(n: int | None) -> int:
    n = MIN_INTERVALS * 2 + 1 if n is None else int(n)
    if n < MIN_INTERVALS + 1:
        raise ValidationError(f"need at least {MIN_INTERVALS + 1} nodes")
    return n


def build_H_from_h(h: Fn, interval: tuple[float, float], anchor: float,
                   n: int | None = None) -> DiffeoTable:
    """H(s) = int_anchor^s exp(-int_anchor^t h), tabulated on ``interval``."""
    a, b = map(float, interval)
    anchor = float(anchor)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValidationError("interval must be finite with a < b")
    if not a <= anchor <= b:
        raise ValidationError("anchor must lie in the interval")
    hg = _guarded(h)
    nodes = np.linspace(a, b, _n_nodes(n))
    hg(np.concatenate([nodes, 0.5 * (nodes[1:] + nodes[:-1])]))   # pole scan
    H1 = _Primitive(hg, nodes, 0, 0.0)
    h1_anchor = float(H1(np.array(anchor)))

    def integrand(s):
        return np.exp(-(H1(s) - h1_anchor))

    Hp = _Primitive(integrand, nodes, 0, 0.0)
    values = Hp.values - float(Hp(np.array(anchor)))
    derivs = np.exp(-(H1.values - h1_anchor))
    return DiffeoTable(nodes, values, derivs, {"source": "h", "anchor": anchor})


# ---------------------------------------------------------------------------
# converse direction


@dataclass(frozen=True)
class CharacteristicPair:
    """First and second characteristic functions linked by C1, C2 and J0."""

    h: Fn
    j: Fn
    C1: float = 0.0
    C2: float = 0.0
    J0: tuple[float, float] | None = None


@dataclass(frozen=True)
class JTable:
    """Result of ``build_H_from_j``."""

    table: DiffeoTable
    J0: tuple[float, float]
    I1: tuple[float, float]
    s0: float
    root: float | None

    def __iter__(self):
        return iter((self.table, self.J0, self.I1))


def _sign_of(j: Fn, lo: float, hi: float) -> int:
    probe = np.linspace(lo, hi, 2003)[1:-1]
    v = np.asarray(j(probe), dtype=float)
    if np.any(~np.isfinite(v)):
        raise DomainError("j is not finite on J")
    if np.all(v > 0):
        return 1
    if np.all(v < 0):
        return -1
    raise ValidationError("j must be nonvanishing and sign-definite on J")


def build_H_from_j(j: Fn, J: tuple[float, float], C1: float, C2: float,
                   s0: float | None = None, base: float = 0.0, span: float = 20.0,
                   trim: float = 1e-3, n: int | None = None) -> JTable:
    """Tabulate H = j2^{-1}(s + C2) from a sign-definite j.

    ``j1(s) = C1 - 2 int_base^s j`` (``base`` may be +-inf when j decays
    there).  j1 is monotone because j has one sign, so the positivity set
    J0 is one interval whose only possible sqrt end is the root of j1.
    ``j2`` is anchored by j2(s0) = 0; ``s0`` defaults to the maximiser of
    j1, an end of J0.  Infinite ends of J are cut ``span`` away from the
    nearest finite reference.  The table covers I1 with a fraction
    ``trim`` removed at the sqrt end, where H' vanishes.
    """
    lo, hi = map(float, J)
    C1, C2, base = float(C1), float(C2), float(base)
    if not lo < hi:
        raise ValidationError("J must have lo < hi")
    ref = base if math.isfinite(base) else (lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0))
    lo_w = lo if math.isfinite(lo) else min(ref, hi if math.isfinite(hi) else ref) - span
    hi_w = hi if math.isfinite(hi) else max(ref, lo if math.isfinite(lo) else ref) + span
    sgn = _sign_of(j, lo_w, hi_w)

    def j1_at(p: float) -> float:
        v = C1 - 2.0 * _integral(j, base, p) if base <= p else C1 + 2.0 * _integral(j, p, base)
        if not math.isfinite(v):
            raise NonIntegrableError("int j diverges between base and J")
        return v

    j1_lo, j1_hi = j1_at(lo_w), j1_at(hi_w)
    # j > 0: j1 decreasing, positive on the left; j < 0: mirrored
    top, bottom = (lo_w, hi_w) if sgn == 1 else (hi_w, lo_w)
    j1_top, j1_bottom = (j1_lo, j1_hi) if sgn == 1 else (j1_hi, j1_lo)
    if not j1_top > 0:
        raise EmptyDomainError("j1 <= 0 on all of J: choose a larger C1")
    root = None
    if j1_bottom <= 0:
        # every j1 value is integrated from base, so a large |j| far from
        # base cannot cancel against the root's neighbourhood
        grid = np.linspace(lo_w, hi_w, 129)
        j1_grid = np.array([j1_at(float(x)) for x in grid])
        idx = np.flatnonzero((j1_grid[:-1] > 0) != (j1_grid[1:] > 0))
        if idx.size == 0:
            raise EmptyDomainError("could not bracket the root of j1")
        x0, x1 = grid[idx[0]], grid[idx[0] + 1]
        pos0 = j1_grid[idx[0]] > 0
        for _ in range(200):
            m = 0.5 * (x0 + x1)
            if m in (x0, x1):
                break
            if (j1_at(m) > 0) == pos0:
                x0 = m
            else:
                x1 = m
        root = 0.5 * (x0 + x1)
        root += j1_at(root) / (2.0 * float(j(np.array(root))))
    p, q = (top, root if root is not None else bottom) if sgn == 1 else (root if root is not None else bottom, top)
    if not p < q:
        raise EmptyDomainError("empty positivity interval J0")
    L = q - p

    # regularising map v in [0, 1] -> s; the sqrt end becomes regular
    if root is None:
        def s_of(v): return p + L * v
        def ds_of(v): return L + 0.0 * v
        def v_of(s): return (s - p) / L
    elif sgn == 1:       # root at q
        def s_of(v): return q - L * (1.0 - v) ** 2
        def ds_of(v): return 2.0 * L * (1.0 - v)
        def v_of(s): return 1.0 - np.sqrt(np.clip((q - s) / L, 0.0, 1.0))
    else:                # root at p
        def s_of(v): return p + L * v * v
        def ds_of(v): return 2.0 * L * v
        def v_of(s): return np.sqrt(np.clip((s - p) / L, 0.0, 1.0))

    nv = _n_nodes(n)
    vgrid = np.linspace(0.0, 1.0, nv)
    snodes = s_of(vgrid)
    snodes[0], snodes[-1] = p, q
    neg_j = lambda s: -2.0 * np.asarray(j(s), dtype=float)  # noqa: E731
    if root is None:
        j1 = _Primitive(neg_j, snodes, 0, j1_at(p))
    else:
        j1 = _Primitive(neg_j, snodes, nv - 1 if sgn == 1 else 0, 0.0)
    root_limit = None if root is None else math.sqrt(2.0 * L / abs(float(j(np.array(root)))))

    def G(v):
        v = np.asarray(v, dtype=float)
        out = np.empty(v.shape)
        at_root = np.zeros(v.shape, bool)
        if root is not None:
            # within 1e-6 of the root in v the relative error of the limit is O(1e-12)
            at_root = (v >= 1.0 - 1e-6) if sgn == 1 else (v <= 1e-6)
            out[at_root] = root_limit
        rest = ~at_root
        s = s_of(v[rest])
        out[rest] = ds_of(v[rest]) / np.sqrt(np.maximum(j1.hermite(s), 0.0))
        return out

    j2 = _Primitive(G, vgrid, 0, 0.0)
    if s0 is None:
        s0 = p if sgn == 1 else q
    s0 = float(s0)
    slack = 1e-9 * max(1.0, abs(p), abs(q))
    if not p - slack <= s0 <= q + slack:
        raise ValidationError(f"s0 = {s0} is outside J0 = ({p}, {q})")
    s0 = min(max(s0, p), q)
    shift = float(j2(np.array(float(v_of(np.array(s0))))))
    j2v = j2.values - shift
    I1 = (float(j2v[0]) - C2, float(j2v[-1]) - C2)

    t_lo, t_hi = I1
    width = t_hi - t_lo
    if root is not None:
        if sgn == 1:
            t_hi -= trim * width
        else:
            t_lo += trim * width
    tnodes = np.linspace(t_lo, t_hi, _n_nodes(n))
    target = tnodes + C2 + shift        # j2 values before the anchor shift
    k = np.clip(np.searchsorted(j2.values, target) - 1, 0, nv - 2)
    va, vb = vgrid[k], vgrid[k + 1]
    fa, fb = j2.values[k], j2.values[k + 1]
    v = va + (target - fa) / (fb - fa) * (vb - va)
    for _ in range(8):
        resid = j2.values[k] + adaptive_simpson(G, va, v, QUAD_TOL * 1e-3) - target
        step = resid / G(v)
        v = np.clip(v - step, va, vb)
        if np.max(np.abs(step)) <= 1e-16:
            break
    Hs = s_of(v)
    Hp = np.sqrt(np.maximum(j1(Hs), 0.0))
    table = DiffeoTable(tnodes, Hs, Hp, {"source": "j", "C1": C1, "C2": C2, "s0": s0,
                                         "J0": (p, q), "root": root})
    return JTable(table, (p, q), I1, s0, root)


@dataclass(frozen=True)
class JSpec:
    """Arguments of ``build_H_from_j`` that reproduce a family's h (H'(s0) = 1)."""

    j: Fn
    J: tuple[float, float]
    C1: float
    C2: float
    base: float
    s0: float

    def build(self, **kw) -> JTable:
        return build_H_from_j(self.j, self.J, self.C1, self.C2, s0=self.s0, base=self.base, **kw)


def closed_form_j(fam: fm.Family) -> JSpec:
    """Second characteristic function j = h(K) H'(K) of a family, in closed form.

    H' = e^{-int h} is normalised to 1 at its maximum, so C1 = 1.  J is
    the part of the family's range of values on which j keeps one sign
    (the upper half for Scherk); wall intervals stop short of the
    degenerate end where j and j1 vanish together.
    """
    if fam.harmonic:
        raise ValidationError(f"{fam.name} has h = 0 and no second characteristic function")
    if isinstance(fam, fm.Scherk):
        a2 = fam.abs_a**2
        return JSpec(lambda t: a2 * np.asarray(t, dtype=float), (0.0, math.inf), 1.0, fam.C2, 0.0, 0.0)
    if isinstance(fam, fm.Catenoid):
        lam, e = fam.lam, fam.eps0
        return JSpec(lambda t: -e * lam * np.exp(-2.0 * e * lam * np.asarray(t, dtype=float)),
                     (-math.inf, math.inf), 1.0, fam.C2, e * math.inf, 0.0)
    if isinstance(fam, fm.Pillars):
        g, gp, q, e = fam.gamma.k, fam.gamma.kprime, fam.scale, fam.eps2
        kk = el.complete_k(fam.gamma)

        def jp(t):
            t = np.asarray(t, dtype=float)
            return (q / (4.0 * g)) * (np.exp(2 * q * g * t) - gp**4 * np.exp(-2 * q * g * t))

        t0, tk = math.log(1.0 - g) / (g * q), math.log(gp) / (g * q)
        lo, hi = t0 - 1.0, tk
        J = (lo, hi) if e == 1 else (-hi, -lo)
        return JSpec(lambda t: e * jp(e * np.asarray(t, dtype=float)), J, 1.0,
                     fam.C2 - e * kk / q, e * tk, e * tk)
    if isinstance(fam, (fm.GreatWall, fm.ThickWall, fm.SharpWall)):
        c, e = fam.root, fam.eps2
        if isinstance(fam, fm.GreatWall):
            amp, freq, end = c / 2.0, 2.0 * c, 0.9
        elif isinstance(fam, fm.ThickWall):
            g = fam.gamma.k
            amp, freq, end = c / (2.0 * g), 2.0 * g * c, 0.99
        else:
            g = fam.gamma.k
            amp, freq, end = g * c / 2.0, 2.0 * c / g, 0.9
        top = end * math.pi / freq
        J = (0.0, top) if e == 1 else (-top, 0.0)
        return JSpec(lambda t: amp * np.sin(freq * np.asarray(t, dtype=float)), J, 1.0, fam.C2, 0.0, 0.0)
    raise ValidationError(f"no closed-form j for {fam.name}")


# ---------------------------------------------------------------------------
# checks and constructions


def check_linkage(pair: CharacteristicPair, table: DiffeoTable, tol: float = 1e-5) -> ResidualReport:
    """max |j(H) + H''| and |h + H''/H'| over the nodes."""
    s = table.nodes
    Hs = table.values
    jv = np.asarray(pair.j(Hs), dtype=float)
    inner = jv[1:-1]     # J is open: j may vanish at the end values of H
    if not (np.all(inner > 0) or np.all(inner < 0)) or np.any(jv * inner[0] < 0):
        raise ValidationError("j must be nonvanishing and sign-definite on the table range")
    H2 = table.second_at_nodes()
    r_j = np.abs(jv + H2)
    r_h = np.abs(np.asarray(pair.h(s), dtype=float) + H2 / table.derivs)
    both = np.maximum(r_j, r_h)
    rep = ResidualReport.from_residuals("linkage", both, s, tol,
                                        {"maxJResidual": float(np.max(r_j)),
                                         "maxHResidual": float(np.max(r_h))})
    rep.passed = bool(rep.max_residual <= tol)
    return rep


def g_from_H(table: DiffeoTable, C: float, sign1: int, sign2: int, D: float,
             anchor: float | None = None) -> tr.Transformation:
    """g = sign1 * int_anchor^s H'/sqrt(H'^2 + sign2 C^2) + D.

    For sign2 = -1 the domain is the run of nodes where H'^2 > C^2 that
    contains ``anchor`` (default: the longest run; anchor then defaults to
    its left end).
    """
    sign1 = fm._check_sign("sign1", sign1)
    sign2 = fm._check_sign("sign2", sign2)
    C, D = float(C), float(D)
    rad = table.derivs**2 + sign2 * C * C
    pos = rad > 0
    if not np.any(pos):
        raise EmptyDomainError("1 +- (C/H')^2 is nonpositive on the whole table")
    edges = np.flatnonzero(np.diff(np.concatenate([[0], pos.astype(int), [0]])))
    runs = list(zip(edges[::2], edges[1::2] - 1))
    if anchor is not None:
        k = int(np.clip(np.searchsorted(table.nodes, anchor), 0, table.nodes.size - 1))
        runs = [r for r in runs if r[0] <= k <= r[1]]
        if not runs:
            raise EmptyDomainError("anchor is outside the admissible part of the table")
    i0, i1 = max(runs, key=lambda r: r[1] - r[0])
    if i1 - i0 < 4:
        raise EmptyDomainError("admissible part of the table is too short")
    nodes = table.nodes[i0:i1 + 1]
    lo, hi = float(nodes[0]), float(nodes[-1])
    anchor = lo if anchor is None else float(anchor)
    if not lo <= anchor <= hi:
        raise EmptyDomainError("anchor is outside the admissible part of the table")

    def integrand(s):
        d = table.deriv(s)
        return sign1 * d / np.sqrt(d * d + sign2 * C * C)

    prim = _Primitive(integrand, nodes, 0, 0.0)
    gvals = prim.values - float(prim(np.array(anchor))) + D
    gd = integrand(nodes)
    sub = DiffeoTable.__new__(DiffeoTable)
    object.__setattr__(sub, "nodes", nodes)
    object.__setattr__(sub, "values", gvals)
    object.__setattr__(sub, "derivs", gd)
    object.__setattr__(sub, "meta", {})

    def fn(s):
        return DiffeoTable.__call__(sub, s)

    def d2(s):
        d = table.deriv(s)
        return sign1 * table.second(s) * sign2 * C * C / (d * d + sign2 * C * C) ** 1.5

    return tr.Transformation(fn, integrand, d2, (lo, hi), "nmgNumeric", "gFromH",
                             {"C": C, "sign1": sign1, "sign2": sign2, "D": D,
                              "anchor": anchor, "fdDerivatives": True})


def forward_direction(fam: fm.Family, x, y, tol: float = 1e-5) -> ResidualReport:
    """u = H(f) with H built from the family's h; harmonicity and modified-equation residuals."""
    if fam.harmonic:
        raise ValidationError(f"{fam.name} has h = 0; the forward direction needs h != 0")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    fv = np.asarray(fam.height(x, y), dtype=float)
    if np.any(~np.isfinite(fv)):
        raise DomainError("samples must lie in the family's domain")
    a, b = float(np.min(fv)), float(np.max(fv))
    width = max(b - a, 1e-6)
    table = None
    for pad in (0.02, 0.002, 0.0):
        try:
            table = build_H_from_h(fam.characteristic, (a - pad * width, b + pad * width), 0.5 * (a + b))
            break
        except NonIntegrableError:
            continue
    if table is None:
        raise NonIntegrableError("h has a pole inside the sampled range of f")

    def u_field(xx, yy):
        return table(fam.height(xx, yy))

    jet, _ = jet_arrays_adaptive(u_field, x, y)
    harm = np.abs(jet.laplacian)
    u = jet.f
    K = table.inverse(u)
    j_u = np.asarray(fam.characteristic(K), dtype=float) * table.deriv(K)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = (jet.fz**2 * jet.fzbzb + jet.fzbar**2 * jet.fzz) / (jet.fz * jet.fzbar)
    mod = np.abs(lhs - j_u)
    both = np.maximum(harm, mod)
    pts = x + 1j * y
    rep = ResidualReport.from_residuals(f"forward:{fam.name}", both, pts, tol,
                                        {"maxHarmonic": float(np.nanmax(harm)),
                                         "maxModified": float(np.nanmax(mod)),
                                         "interval": list(table.domain)})
    rep.passed = bool(rep.max_residual <= tol)
    return rep


def weakened_terms(fam: fm.Family, z, step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """([ln A']_zz, A') at each point; NaN where the stencil meets a pole or a branch jump.

    The default step is 1e-3 min(1, |A'|^-1/2).  Near a simple pole |A'|
    is the inverse distance r; truncation grows like h^4/r^6 and roundoff
    like 1/h^2, and the square-root scaling keeps both under 1e-7 for
    r >= 0.1.
    """
    z = np.asarray(z, dtype=complex).ravel()
    with np.errstate(all="ignore"):
        a = np.asarray(fam.aprime(z), dtype=complex)
    if step is None:
        steps = DEFAULT_ODE_STEP * np.minimum(1.0, 1.0 / np.sqrt(np.where(np.isfinite(a), np.abs(a), np.inf)))
    else:
        steps = np.full(z.shape, float(step))
    try:
        d2 = log_second_derivative(fam.aprime, z, steps)
    except (DomainError, BranchError):
        d2 = np.empty(z.shape, complex)
        for i, zi in enumerate(z):
            try:
                d2[i] = log_second_derivative(fam.aprime, zi, steps[i])
            except (DomainError, BranchError):
                d2[i] = np.nan
    return np.asarray(d2, dtype=complex), a


def estimate_k(fam: fm.Family, x, y, step: float | None = None) -> tuple[float, float, np.ndarray]:
    """Median of Re([ln A']_zz / A'^2) over the samples.

    Returns ``(k, spread, ratios)`` with spread the largest deviation of the
    per-point complex ratio from the median.  Points whose stencil meets a
    pole or a branch jump have NaN ratios and are left out.
    """
    z = np.asarray(x, dtype=float).ravel() + 1j * np.asarray(y, dtype=float).ravel()
    d2, a = weakened_terms(fam, z, step)
    with np.errstate(all="ignore"):
        ratios = d2 / (a * a)
    ok = np.isfinite(ratios)
    if not np.any(ok):
        raise DomainError("no sample admits a finite weakened-equation ratio")
    k = float(np.median(ratios[ok].real))
    spread = float(np.max(np.abs(ratios[ok] - k)))
    return k, spread, ratios
