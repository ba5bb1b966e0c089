"""Real-argument Jacobi elliptic functions and the incomplete integral F.

Everything is built on the descending Landen (AGM) recursion.  Functions
accept scalars or numpy arrays for the argument; the modulus is always a
single :class:`Modulus`.  Scalar input gives a Python float back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError, PoleError, ValidationError

__all__ = [
    "Modulus",
    "JacobiTriple",
    "complete_k",
    "elliptic_f",
    "jacobi_am",
    "sncndn",
    "jacobi_triple",
    "jacobi_derived",
    "inv_sn",
    "inv_cn",
    "inv_dn",
    "inv_sd",
    "inv_nd",
    "inv_cd",
    "inv_sech",
    "DERIVED_NAMES",
]

_LANDEN_STOP = 1e-15
_MAX_LANDEN = 60
_POLE_THRESHOLD = 1e-14
_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus ``k`` with its complement ``kprime = sqrt(1 - k^2)``.

    Pass only ``k`` in the common case.  When ``k`` is close to one it is
    more accurate to build the value from the complement with
    :meth:`from_complement`.
    """

    k: float
    kprime: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        k = float(self.k)
        if not (0.0 <= k <= 1.0):
            raise ValidationError(f"modulus k must lie in [0, 1], got {k!r}")
        kp = float(self.kprime)
        if math.isnan(kp):
            kp = math.sqrt((1.0 - k) * (1.0 + k))
        elif not (0.0 <= kp <= 1.0) or abs(k * k + kp * kp - 1.0) > 1e-15:
            raise ValidationError(f"inconsistent modulus pair k={k!r}, k'={kp!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kprime", kp)

    @classmethod
    def from_complement(cls, kprime: float) -> "Modulus":
        kp = float(kprime)
        if not (0.0 <= kp <= 1.0):
            raise ValidationError(f"complementary modulus must lie in [0, 1], got {kp!r}")
        return cls(math.sqrt((1.0 - kp) * (1.0 + kp)), kp)

    @property
    def m(self) -> float:
        """Parameter m = k^2."""
        return self.k * self.k


@dataclass(frozen=True)
class JacobiTriple:
    u: float
    sn: float
    cn: float
    dn: float
    modulus: Modulus


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


@lru_cache(maxsize=512)
def _agm_sequence(k: float, kp: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Return the AGM sequences (a_n, c_n) started from (1, k', k)."""
    a, b, c = 1.0, kp, k
    a_seq, c_seq = [a], [c]
    n = 0
    while c / a >= _LANDEN_STOP and n < _MAX_LANDEN:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
        n += 1
    return tuple(a_seq), tuple(c_seq)


def complete_k(m: Modulus) -> float:
    """Quarter period K(k); infinite at k = 1."""
    if m.kprime == 0.0:
        return math.inf
    a_seq, _ = _agm_sequence(m.k, m.kprime)
    return math.pi / (2.0 * a_seq[-1])


def _f_reduced(phi: np.ndarray, m: Modulus) -> np.ndarray:
    """F(phi, k) for phi in [0, pi/2] by the Landen doubling of the angle."""
    a, b = 1.0, m.kprime
    c = m.k
    p = phi.copy()
    scale = 1.0
    n = 0
    while c / a >= _LANDEN_STOP and n < _MAX_LANDEN:
        step = np.arctan((b / a) * np.tan(p))
        # choose the lift of arctan closest to p so the angle doubles smoothly
        p = p + step + math.pi * np.round((p - step) / math.pi)
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        scale *= 2.0
        n += 1
    return p / (scale * a)


def elliptic_f(phi, m: Modulus):
    """Incomplete elliptic integral of the first kind F(phi, k).

    Odd in ``phi``.  Arguments beyond the first quadrant are reduced with
    F(phi + n*pi) = F(phi) + 2nK.  At ``k = 1`` only |phi| < pi/2 converges.
    """
    arr, scalar = _as_array(phi)
    if not np.all(np.isfinite(arr)):
        raise DomainError("elliptic_f needs a finite amplitude")
    if m.k == 0.0:
        return _out(arr.copy(), scalar)
    if m.kprime == 0.0:
        if np.any(np.abs(arr) >= math.pi / 2):
            raise DivergenceError("F(phi, 1) diverges for |phi| >= pi/2")
        return _out(np.arcsinh(np.tan(arr)), scalar)
    n = np.round(arr / math.pi)
    r = arr - n * math.pi
    res = np.sign(r) * _f_reduced(np.abs(r), m)
    res = np.where(n != 0, res + 2.0 * n * complete_k(m), res)
    return _out(res, scalar)


def _am_array(u: np.ndarray, m: Modulus) -> np.ndarray:
    if m.k == 0.0:
        return u.copy()
    if m.kprime == 0.0:
        return 2.0 * np.arctan(np.tanh(0.5 * u))
    a_seq, c_seq = _agm_sequence(m.k, m.kprime)
    big_n = len(a_seq) - 1
    phi = (2.0**big_n) * a_seq[big_n] * u
    for j in range(big_n, 0, -1):
        phi = 0.5 * (phi + np.arcsin((c_seq[j] / a_seq[j]) * np.sin(phi)))
    return phi


def jacobi_am(u, m: Modulus):
    """Jacobi amplitude, the inverse of ``phi -> F(phi, k)``."""
    arr, scalar = _as_array(u)
    return _out(_am_array(arr, m), scalar)


def sncndn(u, m: Modulus):
    """Vectorised (sn, cn, dn) at argument ``u``."""
    arr, scalar = _as_array(u)
    if m.kprime == 0.0:
        sn = np.tanh(arr)
        cn = 1.0 / np.cosh(arr)
        dn = cn.copy()
    else:
        phi = _am_array(arr, m)
        sn = np.sin(phi)
        cn = np.cos(phi)
        # k'^2 + k^2 cn^2 equals 1 - k^2 sn^2 but avoids cancellation
        dn = np.sqrt(m.kprime**2 + m.k**2 * cn * cn)
    if scalar:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def jacobi_triple(u: float, m: Modulus) -> JacobiTriple:
    sn, cn, dn = sncndn(float(u), m)
    return JacobiTriple(u=float(u), sn=sn, cn=cn, dn=dn, modulus=m)


_RATIOS: dict[str, tuple[str | None, str]] = {
    "ns": (None, "sn"),
    "nc": (None, "cn"),
    "nd": (None, "dn"),
    "sc": ("sn", "cn"),
    "sd": ("sn", "dn"),
    "cd": ("cn", "dn"),
    "cs": ("cn", "sn"),
    "ds": ("dn", "sn"),
    "dc": ("dn", "cn"),
}
DERIVED_NAMES = tuple(_RATIOS)


def jacobi_derived(name: str, u, m: Modulus):
    """One of the nine quotient functions, e.g. ``sd = sn/dn``.

    Raises :class:`PoleError` when the denominator is below 1e-14 in
    magnitude at any requested argument.
    """
    try:
        num_name, den_name = _RATIOS[name]
    except KeyError:
        raise ValueError(f"unknown Jacobi function {name!r}") from None
    arr, scalar = _as_array(u)
    sn, cn, dn = sncndn(arr, m)
    parts = {"sn": sn, "cn": cn, "dn": dn}
    den = parts[den_name]
    if np.any(np.abs(den) < _POLE_THRESHOLD):
        raise PoleError(f"{name} has a pole: {den_name} vanishes")
    num = 1.0 if num_name is None else parts[num_name]
    return _out(num / den, scalar)


# ---------------------------------------------------------------------------
# inverses on the principal branch


def _check_range(arr: np.ndarray, lo: float, hi: float, what: str) -> np.ndarray:
    bad = ~((arr >= lo - _RANGE_SLACK) & (arr <= hi + _RANGE_SLACK))
    if np.any(bad):
        raise DomainError(f"{what}: argument outside [{lo}, {hi}]")
    return np.clip(arr, lo, hi)


def _inverse(x, m: Modulus, lo: float, hi: float, what: str,
             angle: Callable[[np.ndarray], np.ndarray]):
    arr, scalar = _as_array(x)
    arr = _check_range(arr, lo, hi, what)
    return _out(np.asarray(elliptic_f(angle(arr), m)), scalar)


def inv_sn(x, m: Modulus):
    """sn^-1 with values in [-K, K]."""
    return _inverse(x, m, -1.0, 1.0, "inv_sn", np.arcsin)


def inv_cn(x, m: Modulus):
    """cn^-1; values in [0, K] for x in [0, 1] and up to 2K for negative x."""
    def angle(v):
        return np.arctan2(np.sqrt((1.0 - v) * (1.0 + v)), v)

    return _inverse(x, m, -1.0, 1.0, "inv_cn", angle)


def inv_dn(x, m: Modulus):
    """dn^-1 on [k', 1] with values in [0, K]."""
    kp = m.kprime

    def angle(v):
        return np.arctan2(np.sqrt((1.0 - v) * (1.0 + v)), np.sqrt((v - kp) * (v + kp)))

    return _inverse(x, m, kp, 1.0, "inv_dn", angle)


def inv_sd(x, m: Modulus):
    """sd^-1 on [-1/k', 1/k'] with values in [-K, K]."""
    kp = m.kprime
    bound = math.inf if kp == 0.0 else 1.0 / kp

    def angle(v):
        return np.arctan2(v, np.sqrt(np.maximum(1.0 - (kp * v) ** 2, 0.0)))

    return _inverse(x, m, -bound, bound, "inv_sd", angle)


def inv_nd(x, m: Modulus):
    """nd^-1 on [1, 1/k'] with values in [0, K]."""
    kp = m.kprime
    bound = math.inf if kp == 0.0 else 1.0 / kp

    def angle(v):
        return np.arctan2(np.sqrt((v - 1.0) * (v + 1.0)), np.sqrt(np.maximum(1.0 - (kp * v) ** 2, 0.0)))

    return _inverse(x, m, 1.0, bound, "inv_nd", angle)


def inv_cd(x, m: Modulus):
    """cd^-1 with values in [0, K] for x in [0, 1]."""
    kp = m.kprime

    def angle(v):
        return np.arctan2(np.sqrt((1.0 - v) * (1.0 + v)), v * kp)

    return _inverse(x, m, -1.0, 1.0, "inv_cd", angle)


def inv_sech(x):
    """sech^-1 on (0, 1].

    Near 1 it is written as 2 artanh(sqrt((1-x)/(1+x))) so the square-root
    behaviour is resolved; for small x, arcosh(1/x) is better conditioned.
    """
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0.0)) or np.any(arr > 1.0 + _RANGE_SLACK):
        raise DomainError("inv_sech: argument outside (0, 1]")
    arr = np.minimum(arr, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        near_one = 2.0 * np.arctanh(np.sqrt((1.0 - arr) / (1.0 + arr)))
        small = np.arccosh(1.0 / arr)
    return _out(np.where(arr >= 0.5, near_one, small), scalar)
