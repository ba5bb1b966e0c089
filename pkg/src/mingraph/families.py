"""The eight closed-form families of minimal graphs admitting nontrivial
graph transformations.

Every family is a frozen dataclass.  Its vectorised ``height(x, y)``
returns NaN off the natural domain.  ``characteristic(s)`` is the first
characteristic function h with Delta f / |grad f|^2 = h(f).
:meth:`Family.in_domain` applies a margin measured on the value of the
family's implicit function.  The module-level functions
:func:`eval_height`, :func:`eval_characteristic`, :func:`in_domain` and
:func:`singular_curves` are the checked scalar entry points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, fields
from typing import Callable, ClassVar

import numpy as np

from . import elliptic as el
from .elliptic import Modulus
from .errors import DomainError, PoleError, SingularError, ValidationError
from .wirtinger import ComplexPoint

__all__ = [
    "SingularCurveSpec",
    "Family",
    "Plane",
    "Helicoid",
    "Scherk",
    "Catenoid",
    "Pillars",
    "GreatWall",
    "ThickWall",
    "SharpWall",
    "FAMILIES",
    "draw_params",
    "figure_params",
    "make_family",
    "eval_height",
    "eval_characteristic",
    "in_domain",
    "singular_curves",
    "ctanh",
]

Array = np.ndarray
_POLE = 1e-14


# ---------------------------------------------------------------------------
# helpers


def ctanh(w) -> Array:
    """Complex tanh through exponentials of non-positive real part.

    Never overflows, and keeps relative accuracy near zero via expm1.
    """
    w = np.asarray(w, dtype=complex)
    sgn = np.where(w.real >= 0, 1.0, -1.0)
    e = np.expm1(-2.0 * sgn * w)
    return sgn * (-e / (2.0 + e))


def _masked(fn: Callable, x: Array, ok: Array) -> Array:
    out = np.full(x.shape, np.nan)
    if np.any(ok):
        out[ok] = fn(x[ok])
    return out


def _check_sign(name: str, v) -> int:
    if v not in (1, -1):
        raise ValidationError(f"{name} must be +1 or -1, got {v!r}")
    return int(v)


def _check_real(name: str, v) -> float:
    try:
        out = float(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be real, got {v!r}") from None
    if not math.isfinite(out):
        raise ValidationError(f"{name} must be finite")
    return out


def _check_complex(name: str, v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        v = complex(float(v[0]), float(v[1]))
    try:
        out = complex(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be complex, got {v!r}") from None
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ValidationError(f"{name} must be finite")
    return out


def _check_modulus(name: str, v) -> Modulus:
    m = v if isinstance(v, Modulus) else Modulus(_check_real(name, v))
    if not (0.0 < m.k < 1.0):
        raise ValidationError(f"{name} must satisfy 0 < {name} < 1, got {m.k!r}")
    return m


@dataclass(frozen=True)
class SingularCurveSpec:
    """A level set ``implicit_fn = level`` on which the graph breaks down.

    ``crossing_fn`` changes sign across the curve.  When the level is an
    extreme value of ``implicit_fn`` (so the level set is touched, not
    crossed), a different signed function with the same zero set is
    supplied.  Otherwise it defaults to ``implicit_fn - level``.
    """

    implicit_fn: Callable[[Array, Array], Array]
    level: float
    label: str
    crossing_fn: Callable[[Array, Array], Array] | None = None

    def crossing(self, x, y) -> Array:
        if self.crossing_fn is not None:
            return self.crossing_fn(x, y)
        return self.implicit_fn(x, y) - self.level

    def __call__(self, p: ComplexPoint) -> float:
        return float(self.implicit_fn(np.asarray(p.x), np.asarray(p.y)))


# ---------------------------------------------------------------------------
# base class


class Family:
    """Common interface of the eight families."""

    name: ClassVar[str]
    #: sign of the constant k in [ln A']_zz = k A'^2 (None when h = 0)
    k_sign: ClassVar[int | None] = None
    harmonic: ClassVar[bool] = False

    def height(self, x, y) -> Array:
        raise NotImplementedError

    def characteristic(self, s) -> Array:
        raise NotImplementedError

    def in_domain(self, x, y, margin: float = 1e-2) -> Array:
        raise NotImplementedError

    def singular_curves(self) -> list[SingularCurveSpec]:
        return []

    def aprime(self, z) -> Array:
        """Holomorphic A'(z) of the harmonic decomposition, with |k| = 1."""
        raise DomainError(f"{self.name} has h = 0 and no weakened equation")

    @property
    def k_normalised(self) -> float:
        if self.k_sign is None:
            raise DomainError(f"{self.name} has no weakened equation")
        return float(self.k_sign)

    def params(self) -> dict:
        """Parameter record with complex values as [re, im] pairs."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, Modulus):
                v = v.k
            out[f.name] = v
        return out

    def to_dict(self) -> dict:
        return {"family": self.name, "params": self.params()}

    def field(self) -> Callable[[Array, Array], Array]:
        return self.height


# ---------------------------------------------------------------------------
# h = 0


@dataclass(frozen=True)
class Plane(Family):
    alpha: float
    beta: float
    gamma: float

    name: ClassVar[str] = "plane"
    harmonic: ClassVar[bool] = True

    def __post_init__(self):
        for n in ("alpha", "beta", "gamma"):
            object.__setattr__(self, n, _check_real(n, getattr(self, n)))

    def height(self, x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        return self.alpha * x + self.beta * y + self.gamma

    def characteristic(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def in_domain(self, x, y, margin=1e-2):
        return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)


@dataclass(frozen=True)
class Helicoid(Family):
    """f = -(2/alpha) atan2(y + gamma, x + beta) + delta.

    The quadrant-aware arctangent reproduces the single-argument form on
    x + beta > 0.  The principal layer has a jump of 4 pi/|alpha| across the
    ray x + beta < 0, y = -gamma, so that ray is excluded along with the
    axis point.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    name: ClassVar[str] = "helicoid"
    harmonic: ClassVar[bool] = True

    def __post_init__(self):
        for n in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, n, _check_real(n, getattr(self, n)))
        if self.alpha == 0.0:
            raise ValidationError("helicoid needs alpha != 0")

    def height(self, x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        u, v = x + self.beta, y + self.gamma
        out = -(2.0 / self.alpha) * np.arctan2(v, u) + self.delta
        return np.where((u == 0) & (v == 0), np.nan, out)

    def characteristic(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def in_domain(self, x, y, margin=1e-2):
        x, y = np.asarray(x, float), np.asarray(y, float)
        u, v = x + self.beta, y + self.gamma
        off_axis = np.hypot(u, v) > margin
        off_cut = (u > 0) | (np.abs(v) > margin)
        return off_axis & off_cut


# ---------------------------------------------------------------------------
# k = 0


@dataclass(frozen=True)
class Scherk(Family):
    """f = asin(2 Re(e^{az+b}/a) / C3^2) / |a| - C2 with h = |a| tan(|a|(s+C2))."""

    a: complex
    b: complex
    C2: float
    C3sq: float

    name: ClassVar[str] = "scherk"
    k_sign: ClassVar[int] = 0

    def __post_init__(self):
        object.__setattr__(self, "a", _check_complex("a", self.a))
        object.__setattr__(self, "b", _check_complex("b", self.b))
        object.__setattr__(self, "C2", _check_real("C2", self.C2))
        object.__setattr__(self, "C3sq", _check_real("C3sq", self.C3sq))
        if self.a == 0:
            raise ValidationError("scherk needs a != 0")
        if not self.C3sq > 0:
            raise ValidationError("scherk needs C3sq > 0")

    @property
    def abs_a(self) -> float:
        return abs(self.a)

    def implicit(self, x, y):
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        with np.errstate(over="ignore", invalid="ignore"):
            return 2.0 * np.real(np.exp(self.a * z + self.b) / self.a) / self.C3sq

    def height(self, x, y):
        v = self.implicit(x, y)
        ok = np.abs(v) <= 1.0
        return _masked(np.arcsin, v, ok) / self.abs_a - self.C2

    def characteristic(self, s):
        s = np.asarray(s, dtype=float)
        return self.abs_a * np.tan(self.abs_a * (s + self.C2))

    def in_domain(self, x, y, margin=1e-2):
        return np.abs(self.implicit(x, y)) < 1.0 - margin

    def singular_curves(self):
        return [
            SingularCurveSpec(self.implicit, 1.0, "2Re(e^(az+b)/a)/C3^2 = 1"),
            SingularCurveSpec(self.implicit, -1.0, "2Re(e^(az+b)/a)/C3^2 = -1"),
        ]

    def aprime(self, z):
        return np.exp(self.a * np.asarray(z, dtype=complex) + self.b)

    def reflect(self, z: complex) -> complex:
        """Mirror point with the same height when b = 0 (reflection in the
        (Re az, Im az) plane that fixes the line Im az = arg a)."""
        theta = cmath.phase(self.a)
        return ((self.a * z).conjugate() + 2j * theta) / self.a


# ---------------------------------------------------------------------------
# k > 0


@dataclass(frozen=True)
class Catenoid(Family):
    """f = (eps0/lambda) arcosh(lambda |c1 + z|) - C2 with h = -2 lambda csch(2 lambda (s+C2))."""

    lam: float
    c1: complex
    C2: float
    eps0: int

    name: ClassVar[str] = "catenoid"
    k_sign: ClassVar[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_real("lambda", self.lam))
        object.__setattr__(self, "c1", _check_complex("c1", self.c1))
        object.__setattr__(self, "C2", _check_real("C2", self.C2))
        object.__setattr__(self, "eps0", _check_sign("eps0", self.eps0))
        if not self.lam > 0:
            raise ValidationError("catenoid needs lambda > 0")

    def implicit(self, x, y):
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        return self.lam * np.abs(self.c1 + z)

    def height(self, x, y):
        r = self.implicit(x, y)
        return self.eps0 * _masked(np.arccosh, r, r >= 1.0) / self.lam - self.C2

    def characteristic(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return -2.0 * self.lam / np.sinh(2.0 * self.lam * (s + self.C2))

    def in_domain(self, x, y, margin=1e-2):
        return self.implicit(x, y) > 1.0 + margin

    def singular_curves(self):
        return [SingularCurveSpec(self.implicit, 1.0, "lambda |c1 + z| = 1")]

    def aprime(self, z):
        # k normalised to 1
        return -self.eps0 / (self.c1 + np.asarray(z, dtype=complex))


def _sqrt_c0(c0: complex) -> complex:
    return cmath.sqrt(c0)


@dataclass(frozen=True)
class Pillars(Family):
    """f = eps2 (gamma'/sqrt|c0|) cn^-1((gamma'/gamma) sqrt((cosh(2 ln|T|) - 1)/2), gamma) - C2

    with T = tanh(sqrt(c0)(z + c1)/2).  Since cosh(2 ln r) = (r^2 + r^-2)/2,
    the argument equals (gamma'/(2 gamma)) | |T| - 1/|T| |.
    """

    c0: complex
    c1: complex
    C2: float
    eps2: int
    gamma: Modulus

    name: ClassVar[str] = "pillars"
    k_sign: ClassVar[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "c0", _check_complex("c0", self.c0))
        object.__setattr__(self, "c1", _check_complex("c1", self.c1))
        object.__setattr__(self, "C2", _check_real("C2", self.C2))
        object.__setattr__(self, "eps2", _check_sign("eps2", self.eps2))
        object.__setattr__(self, "gamma", _check_modulus("gamma", self.gamma))
        if self.c0 == 0:
            raise ValidationError("pillars needs c0 != 0")

    @classmethod
    def from_derivation(cls, k: float, c0, c1, C1: float, C2: float, eps2: int) -> "Pillars":
        """Build from the constants (k, c0, c1, C1, C2, eps2) of the derivation
        form -(2 eps2/(beta sqrt k)) sn^-1((1/alpha) sqrt(C1 - (2|c0|/k) cosh(2 ln|T|)), gamma) - C2."""
        k = _check_real("k", k)
        C1 = _check_real("C1", C1)
        c0 = _check_complex("c0", c0)
        if not k > 0:
            raise ValidationError("pillars derivation needs k > 0")
        alpha_sq = C1 - 2 * abs(c0) / k
        beta_sq = C1 + 2 * abs(c0) / k
        if not alpha_sq > 0:
            raise ValidationError("pillars derivation needs C1 > 2|c0|/k")
        gamma = Modulus(math.sqrt(alpha_sq / beta_sq), math.sqrt((beta_sq - alpha_sq) / beta_sq))
        return cls(c0, c1, C2, -_check_sign("eps2", eps2), gamma)

    @property
    def scale(self) -> float:
        """q = sqrt|c0| / gamma'."""
        return math.sqrt(abs(self.c0)) / self.gamma.kprime

    def abs_t(self, x, y) -> Array:
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        return np.abs(ctanh(_sqrt_c0(self.c0) * (z + self.c1) / 2.0))

    def argument(self, x, y) -> Array:
        r = self.abs_t(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.gamma.kprime / (2.0 * self.gamma.k)) * np.abs(r - 1.0 / r)

    @property
    def radii(self) -> tuple[float, float]:
        """|T| on the two outer singular branches (product equals 1)."""
        g, gp = self.gamma.k, self.gamma.kprime
        d = g / gp  # | r - 1/r | = 2 gamma / gamma'
        r_plus = d + math.sqrt(d * d + 1.0)
        return 1.0 / r_plus, r_plus

    def height(self, x, y):
        xarg = self.argument(x, y)
        ok = xarg <= 1.0
        v = _masked(lambda t: el.inv_cn(t, self.gamma), xarg, ok)
        return self.eps2 * v / self.scale - self.C2

    def characteristic(self, s):
        q = self.scale
        sn, cn, dn = el.sncndn(q * (np.asarray(s, dtype=float) + self.C2), self.gamma)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -q * cn * dn / sn

    def in_domain(self, x, y, margin=1e-2):
        r = self.abs_t(x, y)
        lo, hi = self.radii
        return (r > lo + margin) & (r < hi - margin) & (np.abs(r - 1.0) > margin)

    def singular_curves(self):
        lo, hi = self.radii
        return [
            SingularCurveSpec(self.abs_t, lo, "|T|^2 + |T|^-2 = (2 + 2 gamma^2)/gamma'^2, inner branch"),
            SingularCurveSpec(self.abs_t, hi, "|T|^2 + |T|^-2 = (2 + 2 gamma^2)/gamma'^2, outer branch"),
            SingularCurveSpec(self.abs_t, 1.0, "|T| = 1"),
        ]

    def aprime(self, z):
        # k normalised to 1, eps1 = +1
        r = _sqrt_c0(self.c0)
        return r / np.sinh(r * (np.asarray(z, dtype=complex) + self.c1))


# ---------------------------------------------------------------------------
# k < 0


@dataclass(frozen=True)
class _Wall(Family):
    """Shared machinery of the three wall families.

    W = tanh(sqrt(c0)(z+c1)/2) coth(conj(sqrt(c0)(z+c1)/2)) has |W| = 1, so
    with T = tanh(sqrt(c0)(z+c1)/2) and theta = arg T we get Re W = cos(2 theta)
    and X = sqrt((1 + Re W)/2) = |Re T| / |T|.
    """

    k_sign: ClassVar[int] = -1

    def _common_checks(self):
        object.__setattr__(self, "c0", _check_complex("c0", self.c0))
        object.__setattr__(self, "c1", _check_complex("c1", self.c1))
        object.__setattr__(self, "C2", _check_real("C2", self.C2))
        object.__setattr__(self, "eps2", _check_sign("eps2", self.eps2))
        if self.c0 == 0:
            raise ValidationError(f"{self.name} needs c0 != 0")

    @property
    def root(self) -> float:
        """sqrt|c0|."""
        return math.sqrt(abs(self.c0))

    def t_value(self, x, y) -> Array:
        z = np.asarray(x, float) + 1j * np.asarray(y, float)
        return ctanh(_sqrt_c0(self.c0) * (z + self.c1) / 2.0)

    def re_w(self, x, y) -> Array:
        t = self.t_value(x, y)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (t.real**2 - t.imag**2) / (t.real**2 + t.imag**2)

    def x_value(self, x, y) -> Array:
        t = self.t_value(x, y)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.abs(t.real) / np.abs(t)

    def folded_angle(self, x, y) -> Array:
        """psi = arg T folded into [0, pi/2], so that X = cos(psi).

        Working with psi avoids the cancellation in 1 - X^2 near X = 1.
        """
        t = self.t_value(x, y)
        return np.arctan2(np.abs(t.imag), np.abs(t.real))

    def _im_t(self, x, y):
        t = self.t_value(x, y)
        return t.imag / np.abs(t)

    def _re_t(self, x, y):
        t = self.t_value(x, y)
        return t.real / np.abs(t)

    def _curve_plus(self):
        return SingularCurveSpec(self.re_w, 1.0, "Re[tanh coth] = 1", crossing_fn=self._im_t)

    def _curve_minus(self):
        return SingularCurveSpec(self.re_w, -1.0, "Re[tanh coth] = -1", crossing_fn=self._re_t)

    def aprime(self, z):
        # k normalised to -1, eps1 = +1
        r = _sqrt_c0(self.c0)
        return 1j * r / np.sinh(r * (np.asarray(z, dtype=complex) + self.c1))


@dataclass(frozen=True)
class GreatWall(_Wall):
    """f = (eps2/sqrt|c0|) sech^-1(X) - C2 with h = sqrt|c0| tanh(sqrt|c0|(s+C2))."""

    c0: complex
    c1: complex
    C2: float
    eps2: int

    name: ClassVar[str] = "great_wall"

    def __post_init__(self):
        self._common_checks()

    def height(self, x, y):
        # sech^-1(cos psi) = asinh(tan psi)
        t = self.t_value(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.arcsinh(np.abs(t.imag) / np.abs(t.real))
        v = np.where(np.isfinite(v), v, np.nan)
        return self.eps2 * v / self.root - self.C2

    def characteristic(self, s):
        c = self.root
        return c * np.tanh(c * (np.asarray(s, dtype=float) + self.C2))

    def in_domain(self, x, y, margin=1e-2):
        r = self.re_w(x, y)
        return (r > -1.0 + margin) & (r < 1.0 - margin)

    def singular_curves(self):
        return [self._curve_plus(), self._curve_minus()]


@dataclass(frozen=True)
class ThickWall(_Wall):
    """f = (eps2/sqrt|c0|) dn^-1(X, gamma) - C2 with
    h = sqrt|c0| sc(sqrt|c0|(s+C2), gamma) dn(sqrt|c0|(s+C2), gamma)."""

    c0: complex
    c1: complex
    C2: float
    eps2: int
    gamma: Modulus

    name: ClassVar[str] = "thick_wall"

    def __post_init__(self):
        self._common_checks()
        object.__setattr__(self, "gamma", _check_modulus("gamma", self.gamma))

    @property
    def lower_level(self) -> float:
        return 2.0 * self.gamma.kprime**2 - 1.0

    def height(self, x, y):
        # dn^-1(cos psi) has amplitude asin(sin(psi)/gamma)
        ratio = np.sin(self.folded_angle(x, y)) / self.gamma.k
        v = _masked(lambda r: el.elliptic_f(np.arcsin(r), self.gamma), ratio, ratio <= 1.0)
        return self.eps2 * v / self.root - self.C2

    def characteristic(self, s):
        c = self.root
        sn, cn, dn = el.sncndn(c * (np.asarray(s, dtype=float) + self.C2), self.gamma)
        with np.errstate(divide="ignore", invalid="ignore"):
            return c * sn / cn * dn

    def in_domain(self, x, y, margin=1e-2):
        r = self.re_w(x, y)
        return (r > self.lower_level + margin) & (r < 1.0 - margin)

    def singular_curves(self):
        low = SingularCurveSpec(self.re_w, self.lower_level, "Re[tanh coth] = 2 gamma'^2 - 1")
        return [self._curve_plus(), low]


@dataclass(frozen=True)
class SharpWall(_Wall):
    """f = eps2 (gamma/sqrt|c0|) cn^-1(X, gamma) - C2 with
    h = gamma sqrt|c0| sd(u, gamma) cn(u, gamma), u = (sqrt|c0|/gamma)(s+C2)."""

    c0: complex
    c1: complex
    C2: float
    eps2: int
    gamma: Modulus

    name: ClassVar[str] = "sharp_wall"

    def __post_init__(self):
        self._common_checks()
        object.__setattr__(self, "gamma", _check_modulus("gamma", self.gamma))

    def height(self, x, y):
        # cn^-1(cos psi) = F(psi)
        psi = self.folded_angle(x, y)
        v = _masked(lambda a: el.elliptic_f(a, self.gamma), psi, np.isfinite(psi))
        return self.eps2 * self.gamma.k * v / self.root - self.C2

    def characteristic(self, s):
        c, g = self.root, self.gamma.k
        sn, cn, dn = el.sncndn((c / g) * (np.asarray(s, dtype=float) + self.C2), self.gamma)
        return g * c * sn / dn * cn

    def in_domain(self, x, y, margin=1e-2):
        r = self.re_w(x, y)
        return (r > -1.0 + margin) & (r < 1.0 - margin)

    def singular_curves(self):
        return [self._curve_plus(), self._curve_minus()]


# ---------------------------------------------------------------------------
# registry and checked entry points

FAMILIES: dict[str, type[Family]] = {
    cls.name: cls
    for cls in (Plane, Helicoid, Scherk, Catenoid, Pillars, GreatWall, ThickWall, SharpWall)
}

_ALIASES = {"lambda": "lam"}


def make_family(name: str, **params) -> Family:
    """Construct a family by registry name; ``lambda`` is accepted for ``lam``.

    ``pillars`` also accepts the derivation constants ``k`` and ``C1`` in
    place of ``gamma``.
    """
    try:
        cls = FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    params = {_ALIASES.get(k, k): v for k, v in params.items()}
    if cls is Pillars and "gamma" not in params and {"k", "C1"} <= set(params):
        try:
            return Pillars.from_derivation(**params)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None
    names = {f.name for f in fields(cls)}
    unknown = set(params) - names
    missing = names - set(params)
    if unknown or missing:
        raise ValidationError(
            f"{name}: unknown parameters {sorted(unknown)}; missing {sorted(missing)}"
        )
    return cls(**params)


def eval_height(params: Family, p: ComplexPoint, margin: float = 0.0) -> float:
    """Height at ``p``; raises outside the domain or inside a singular band."""
    x, y = np.asarray(p.x), np.asarray(p.y)
    v = float(params.height(x, y))
    if not math.isfinite(v):
        raise DomainError(f"{params.name}: ({p.x}, {p.y}) is outside the domain")
    if margin > 0 and not bool(params.in_domain(x, y, margin)):
        raise SingularError(f"{params.name}: ({p.x}, {p.y}) lies within {margin} of a singular curve")
    return v


def eval_characteristic(params: Family, s: float) -> float:
    """h(s); raises :class:`PoleError` at poles of tan/csch/elliptic ratios."""
    s = float(s)
    if isinstance(params, Scherk):
        if abs(math.cos(params.abs_a * (s + params.C2))) < _POLE:
            raise PoleError("tan pole")
    elif isinstance(params, Catenoid):
        if abs(math.sinh(2 * params.lam * (s + params.C2))) < _POLE:
            raise PoleError("csch pole")
    elif isinstance(params, Pillars):
        sn, _, _ = el.sncndn(params.scale * (s + params.C2), params.gamma)
        if abs(sn) < _POLE:
            raise PoleError("cs pole")
    elif isinstance(params, ThickWall):
        _, cn, _ = el.sncndn(params.root * (s + params.C2), params.gamma)
        if abs(cn) < _POLE:
            raise PoleError("sc pole")
    return float(params.characteristic(np.asarray(s)))


def in_domain(params: Family, p: ComplexPoint, margin: float = 1e-2) -> bool:
    if margin < 0:
        raise ValueError("margin must be non-negative")
    return bool(params.in_domain(np.asarray(p.x), np.asarray(p.y), margin))


def singular_curves(params: Family) -> list[SingularCurveSpec]:
    return params.singular_curves()


def _draw_c0(rng) -> complex:
    return cmath.rect(rng.uniform(0.3, 2.0), rng.uniform(-math.pi, math.pi))


def _draw_c1(rng) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))


def draw_params(name: str, rng) -> Family:
    """Admissible random parameters; ``rng`` needs ``uniform`` and ``sign``."""
    if name == "plane":
        return Plane(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
    if name == "helicoid":
        return Helicoid(rng.sign() * rng.uniform(0.5, 3.0), rng.uniform(-1, 1),
                        rng.uniform(-1, 1), rng.uniform(-1, 1))
    if name == "scherk":
        a = cmath.rect(rng.uniform(0.5, 1.5), rng.uniform(-math.pi, math.pi))
        b = complex(rng.uniform(-0.5, 0.5), rng.uniform(-math.pi, math.pi))
        return Scherk(a, b, rng.uniform(-1, 1), rng.uniform(0.5, 3.0))
    if name == "catenoid":
        return Catenoid(rng.uniform(0.5, 2.0), _draw_c1(rng), rng.uniform(-1, 1), rng.sign())
    if name == "pillars":
        return Pillars(_draw_c0(rng), _draw_c1(rng), rng.uniform(-1, 1), rng.sign(),
                       rng.uniform(0.2, 0.8))
    if name == "great_wall":
        return GreatWall(_draw_c0(rng), _draw_c1(rng), rng.uniform(-1, 1), rng.sign())
    if name in ("thick_wall", "sharp_wall"):
        return FAMILIES[name](_draw_c0(rng), _draw_c1(rng), rng.uniform(-1, 1), rng.sign(),
                              rng.uniform(0.2, 0.8))
    raise ValidationError(f"unknown family {name!r}")


def figure_params() -> dict[str, Family]:
    """Parameter sets of the published figures."""
    return {
        "pillars": Pillars.from_derivation(k=1, c0=1, c1=0, C1=10, C2=0, eps2=-1),
        "great_wall": GreatWall(1, 0, 0, 1),
        "thick_wall": ThickWall(0.25, 0, 0, 1, 0.2),
        "sharp_wall": SharpWall(2, 0, 0, 1, 0.8),
    }
