"""Finite-difference Wirtinger derivatives and the PDE residuals built on them.

A *field* is any callable ``f(x, y)`` that accepts numpy arrays of equal
shape and returns real heights, with NaN (or a raised ``DomainError``)
outside its domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchError, DegenerateGradientError, DomainError, EvaluationDomainError

__all__ = [
    "ComplexPoint",
    "WirtingerJet",
    "jet",
    "jet_arrays",
    "jet_arrays_adaptive",
    "mse_residual",
    "ratio_residual",
    "log_second_derivative",
    "weakened_ode_residual",
    "DEFAULT_STEP",
    "DEFAULT_ODE_STEP",
]

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_STEP = 1e-4
DEFAULT_ODE_STEP = 1e-3
_DEGENERATE_FZ = 1e-10


@dataclass(frozen=True)
class ComplexPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("ComplexPoint components must be finite")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexPoint":
        return cls(float(z.real), float(z.imag))


@dataclass(frozen=True)
class WirtingerJet:
    """Value and Wirtinger derivatives up to second order.

    Entries are scalars for :func:`jet` and arrays for :func:`jet_arrays`.
    """

    f: float | np.ndarray
    fz: complex | np.ndarray
    fzbar: complex | np.ndarray
    fzz: complex | np.ndarray
    fzbzb: complex | np.ndarray
    fzzb: complex | np.ndarray

    @property
    def laplacian(self):
        return 4.0 * np.real(self.fzzb)

    @property
    def grad_sq(self):
        """|grad f|^2 = 4 f_z f_zbar."""
        return 4.0 * np.real(self.fz * self.fzbar)


# stencil offsets in units of the step
_OFFSETS = np.array(
    [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    dtype=float,
)


def _eval_stencil(field: Field, x: np.ndarray, y: np.ndarray, step: float) -> np.ndarray:
    """Field values on the 9-point stencils at step and 2*step.

    Returns an array of shape (2, 9, *x.shape).
    """
    scales = np.array([step, 2.0 * step])
    dx = scales[:, None] * _OFFSETS[None, :, 0]
    dy = scales[:, None] * _OFFSETS[None, :, 1]
    xs = x[None, None, ...] + dx.reshape(dx.shape + (1,) * x.ndim)
    ys = y[None, None, ...] + dy.reshape(dy.shape + (1,) * y.ndim)
    try:
        vals = field(xs, ys)
    except DomainError as exc:
        raise EvaluationDomainError(str(exc)) from exc
    return np.asarray(vals, dtype=float).reshape(xs.shape)


def _partials(v: np.ndarray, h: float) -> tuple[np.ndarray, ...]:
    f0, fe, fw, fn, fs, fne, fse, fnw, fsw = v
    fx = (fe - fw) / (2 * h)
    fy = (fn - fs) / (2 * h)
    fxx = (fe - 2 * f0 + fw) / (h * h)
    fyy = (fn - 2 * f0 + fs) / (h * h)
    fxy = (fne - fse - fnw + fsw) / (4 * h * h)
    return fx, fy, fxx, fyy, fxy


def jet_arrays(field: Field, x, y, step: float = DEFAULT_STEP) -> WirtingerJet:
    """Vectorised :func:`jet`; points whose stencil is undefined give NaN."""
    if not step > 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    vals = _eval_stencil(field, x, y, step)
    coarse = _partials(vals[1], 2 * step)
    fine = _partials(vals[0], step)
    fx, fy, fxx, fyy, fxy = ((4.0 * a - b) / 3.0 for a, b in zip(fine, coarse))
    bad = ~np.all(np.isfinite(vals), axis=(0, 1))
    fz = np.array(0.5 * (fx - 1j * fy), dtype=complex)
    fzbar = np.array(0.5 * (fx + 1j * fy), dtype=complex)
    fzz = np.array(0.25 * (fxx - fyy - 2j * fxy), dtype=complex)
    fzbzb = np.array(0.25 * (fxx - fyy + 2j * fxy), dtype=complex)
    fzzb = np.array(0.25 * (fxx + fyy), dtype=complex)
    f0 = np.array(vals[0, 0], dtype=float)
    if np.any(bad):
        for arr in (fz, fzbar, fzz, fzbzb, fzzb):
            arr[bad] = np.nan
        f0[bad] = np.nan
    return WirtingerJet(f0, fz, fzbar, fzz, fzbzb, fzzb)


def _jet_from_partials(f0, fx, fy, fxx, fyy, fxy) -> WirtingerJet:
    return WirtingerJet(
        np.array(f0, dtype=float),
        np.array(0.5 * (fx - 1j * fy), dtype=complex),
        np.array(0.5 * (fx + 1j * fy), dtype=complex),
        np.array(0.25 * (fxx - fyy - 2j * fxy), dtype=complex),
        np.array(0.25 * (fxx - fyy + 2j * fxy), dtype=complex),
        np.array(0.25 * (fxx + fyy), dtype=complex),
    )


def jet_arrays_adaptive(field: Field, x, y, max_step: float = 1e-2, levels: int = 10):
    """Jets with a per-point step picked from the ladder max_step * 2^-i.

    Each rung is the Richardson combination of two neighbouring stencils.
    The chosen rung is the one that agrees best with the next finer rung,
    which balances truncation (large steps) against roundoff (small steps).
    The residuals never enter the choice.  Returns ``(jet, steps)``.
    """
    if not max_step > 0 or levels < 4:
        raise ValueError("need max_step > 0 and at least 4 levels")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    x, y = np.broadcast_to(x, shape).ravel(), np.broadcast_to(y, shape).ravel()
    hs = max_step * 2.0 ** -np.arange(levels)
    xs = x[None, None, :] + hs[:, None, None] * _OFFSETS[None, :, 0, None]
    ys = y[None, None, :] + hs[:, None, None] * _OFFSETS[None, :, 1, None]
    try:
        vals = np.asarray(field(xs, ys), dtype=float).reshape(xs.shape)
    except DomainError as exc:
        raise EvaluationDomainError(str(exc)) from exc
    raw = np.array([_partials(vals[i], hs[i]) for i in range(levels)])
    rich = (4.0 * raw[1:] - raw[:-1]) / 3.0          # rung i has step hs[i+1]
    finite = np.all(np.isfinite(vals), axis=1)
    rung_ok = finite[1:] & finite[:-1]
    diff = np.abs(rich[1:] - rich[:-1])
    err = diff[:, :2].max(axis=1) + diff[:, 2:].max(axis=1)
    err = np.where(rung_ok[1:] & rung_ok[:-1], err, np.inf)
    pick = np.argmin(err, axis=0)
    idx = np.arange(x.size)
    best = rich[pick, :, idx].T
    bad = ~np.isfinite(err[pick, idx])
    best[:, bad] = np.nan
    f0 = np.where(bad, np.nan, vals[0, 0])
    j = _jet_from_partials(f0, *best)
    j = WirtingerJet(*(np.reshape(getattr(j, n), shape) for n in ("f", "fz", "fzbar", "fzz", "fzbzb", "fzzb")))
    return j, np.reshape(hs[pick + 1], shape)


def jet(field: Field, p: ComplexPoint, step: float = DEFAULT_STEP) -> WirtingerJet:
    """Wirtinger jet of ``field`` at ``p``.

    Central differences at ``step`` and ``2*step`` combined by one level
    of Richardson extrapolation, then mapped to f_z = (f_x - i f_y)/2 and
    f_zbar = (f_x + i f_y)/2.
    """
    j = jet_arrays(field, np.array(p.x), np.array(p.y), step)
    if not np.isfinite(j.f) or not np.isfinite(j.fzz):
        raise EvaluationDomainError(f"stencil around ({p.x}, {p.y}) leaves the field's domain")
    return WirtingerJet(
        float(j.f), complex(j.fz), complex(j.fzbar), complex(j.fzz), complex(j.fzbzb), complex(j.fzzb)
    )


def mse_residual(j: WirtingerJet):
    """Normalised complex minimal-surface residual.

    |f_zz f_zbar^2 + f_zbzb f_z^2 - f_zzb (1 + 2 f_z f_zbar)| / (1 + |f_z|)^3
    """
    r = j.fzz * j.fzbar**2 + j.fzbzb * j.fz**2 - j.fzzb * (1.0 + 2.0 * j.fz * j.fzbar)
    out = np.abs(r) / (1.0 + np.abs(j.fz)) ** 3
    return float(out) if np.ndim(out) == 0 else out


def ratio_residual(j: WirtingerJet, h: Callable, fval=None):
    """|f_zzb / (f_z f_zbar) - h(f)|.

    ``fval`` defaults to the jet's own height.  Scalar jets raise
    :class:`DegenerateGradientError` when |f_z| <= 1e-10; array jets give NaN
    at such points.
    """
    fval = j.f if fval is None else fval
    mag = np.abs(j.fz)
    degenerate = ~(mag > _DEGENERATE_FZ)
    if np.ndim(mag) == 0:
        if degenerate:
            raise DegenerateGradientError("gradient vanishes; characteristic ratio undefined")
        return float(abs(j.fzzb / (j.fz * j.fzbar) - h(fval)))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(j.fzzb / (j.fz * j.fzbar) - h(fval))
    out = np.asarray(out, dtype=float)
    out[degenerate] = np.nan
    return out


def _as_complex(z) -> np.ndarray:
    if isinstance(z, ComplexPoint):
        return np.asarray(z.z)
    return np.asarray(z, dtype=complex)


def log_second_derivative(aprime: Callable, z, step: float = DEFAULT_ODE_STEP):
    """d^2/dz^2 ln A'(z) by central differences along Re z.

    Log differences are taken as logs of ratios between neighbouring
    stencil nodes, so the principal branch cut never enters.  A ratio whose
    argument exceeds pi/2 means the stencil is too coarse for the local
    phase variation and raises :class:`BranchError`.
    """
    zc = _as_complex(z)
    step = np.asarray(step, dtype=float)     # scalar or one step per point
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]).reshape((5,) + (1,) * zc.ndim) * step
    nodes = zc[None, ...] + offs
    a = np.asarray(aprime(nodes), dtype=complex)
    if np.any(~np.isfinite(a)) or np.any(a == 0):
        raise DomainError("A' must be finite and nonzero on the stencil")
    ratios = a[1:] / a[:-1]
    if np.any(np.abs(np.angle(ratios)) > math.pi / 2):
        raise BranchError("argument of A' jumps by more than pi/2 between stencil nodes")
    logs = np.log(ratios)
    m1 = -logs[1]          # ln A(z-h) - ln A(z)
    m2 = m1 - logs[0]      # ln A(z-2h) - ln A(z)
    p1 = logs[2]
    p2 = p1 + logs[3]
    fine = (p1 + m1) / step**2
    coarse = (p2 + m2) / (4.0 * step**2)
    d2 = (4.0 * fine - coarse) / 3.0
    return complex(d2) if d2.ndim == 0 else d2


def weakened_ode_residual(aprime: Callable, z, k: float, step: float = DEFAULT_ODE_STEP):
    """|[ln A'(z)]_zz - k A'(z)^2| for a holomorphic A'."""
    zc = _as_complex(z)
    d2 = log_second_derivative(aprime, zc, step)
    a0 = np.asarray(aprime(zc), dtype=complex)
    out = np.abs(d2 - k * a0 * a0)
    return float(out) if np.ndim(out) == 0 else out
