"""Minimal graph transformations g and the surfaces g o f they produce.

``trivial`` gives the universal maps t -> +-t + C and constants.
``nmg_for`` gives the closed-form nontrivial map of a family for a
chosen case and constants, and ``transformed_surface`` returns the family
record of g o f.  Every :class:`Transformation` evaluates g, g' and g'' on
numpy arrays and returns NaN outside its domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import elliptic as el
from . import families as fm
from .elliptic import Modulus
from .errors import MismatchError, TrivialLocusError, ValidationError

__all__ = [
    "Transformation",
    "trivial",
    "nmg_for",
    "transformed_surface",
    "nmg_ode_residual",
    "compose",
    "custom",
    "family_cases",
    "draw_constants",
    "WALL_CASES",
    "WALL_IMAGE",
]

Fn = Callable[[np.ndarray], np.ndarray]

KINDS = ("trivialConstant", "trivialAffine", "nmgClosedForm", "nmgNumeric")

WALL_CASES = {
    "great_wall": ("1.1", "1.2"),
    "thick_wall": ("2.1", "2.2", "2.3"),
    "sharp_wall": ("3.1", "3.2", "3.3"),
}
WALL_IMAGE = {
    "1.1": "sharp_wall", "1.2": "thick_wall",
    "2.1": "great_wall", "2.2": "sharp_wall", "2.3": "thick_wall",
    "3.1": "great_wall", "3.2": "sharp_wall", "3.3": "thick_wall",
}
_TRIVIAL_LOCUS = 1e-10


@dataclass(frozen=True)
class Transformation:
    """A real map g on ``domain`` with closed-form first and second derivatives."""

    fn: Fn
    d1: Fn
    d2: Fn
    domain: tuple[float, float]
    kind: str
    case: str = ""
    params: dict = field(default_factory=dict)
    source: fm.Family | None = None
    image: fm.Family | None = None
    trivial: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown transformation kind {self.kind!r}")
        lo, hi = self.domain
        if not lo < hi:
            raise ValidationError(f"empty transformation domain {self.domain}")

    def contains(self, s, closed: bool = False) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        lo, hi = self.domain
        if closed:
            return (s >= lo) & (s <= hi)
        return (s > lo) & (s < hi)

    def _masked(self, fn: Fn, s, closed: bool = False):
        s = np.asarray(s, dtype=float)
        ok = self.contains(s, closed)
        out = np.full(s.shape, np.nan)
        if np.any(ok):
            with np.errstate(invalid="ignore", divide="ignore"):
                out[ok] = np.broadcast_to(fn(s[ok]), s[ok].shape)
        return float(out) if out.ndim == 0 else out

    def eval(self, s):
        """g(s) on the closed domain; derivatives use the open one."""
        return self._masked(self.fn, s, closed=True)

    def deriv1(self, s):
        return self._masked(self.d1, s)

    def deriv2(self, s):
        return self._masked(self.d2, s)

    __call__ = eval

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "case": self.case,
            "params": dict(self.params),
            "domain": [self.domain[0], self.domain[1]],
            "trivial": self.trivial,
            "image": None if self.image is None else self.image.to_dict(),
        }


def compose(t: Transformation, fam: fm.Family) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """The field (x, y) -> g(f(x, y))."""

    def field(x, y):
        return t.eval(fam.height(x, y))

    return field


# ---------------------------------------------------------------------------
# trivial maps


def _negated(f: fm.Family, C: float, eps: int) -> fm.Family:
    """Family record of eps * f + C for eps = +-1."""
    if isinstance(f, fm.Plane):
        return fm.Plane(eps * f.alpha, eps * f.beta, eps * f.gamma + C)
    if isinstance(f, fm.Helicoid):
        return fm.Helicoid(eps * f.alpha, f.beta, f.gamma, eps * f.delta + C)
    if isinstance(f, fm.Scherk):
        b = f.b if eps == 1 else f.b + 1j * math.pi
        return fm.Scherk(f.a, b, eps * f.C2 - C, f.C3sq)
    if isinstance(f, fm.Catenoid):
        return fm.Catenoid(f.lam, f.c1, eps * f.C2 - C, eps * f.eps0)
    if isinstance(f, fm.Pillars):
        return fm.Pillars(f.c0, f.c1, eps * f.C2 - C, eps * f.eps2, f.gamma)
    if isinstance(f, fm.GreatWall):
        return fm.GreatWall(f.c0, f.c1, eps * f.C2 - C, eps * f.eps2)
    return type(f)(f.c0, f.c1, eps * f.C2 - C, eps * f.eps2, f.gamma)


def trivial(epsilon: int, C: float) -> Transformation:
    """g(t) = epsilon * t + C with epsilon in {+1, -1, 0}."""
    if epsilon not in (1, -1, 0):
        raise ValidationError("epsilon must be +1, -1 or 0")
    C = float(C)
    e = float(epsilon)
    kind = "trivialConstant" if epsilon == 0 else "trivialAffine"
    return Transformation(
        fn=lambda s: e * s + C,
        d1=lambda s: np.full(np.shape(s), e),
        d2=lambda s: np.zeros(np.shape(s)),
        domain=(-math.inf, math.inf),
        kind=kind,
        case="trivial",
        params={"epsilon": int(epsilon), "C": C},
        trivial=True,
    )


# ---------------------------------------------------------------------------
# h = 0: affine maps


def _affine(f: fm.Family, a: float, b: float) -> Transformation:
    a, b = float(a), float(b)
    if a == 0:
        raise ValidationError("affine map needs a != 0 (a = 0 is the constant map)")
    if isinstance(f, fm.Plane):
        image = fm.Plane(a * f.alpha, a * f.beta, a * f.gamma + b)
    else:
        image = fm.Helicoid(f.alpha / a, f.beta, f.gamma, a * f.delta + b)
    return Transformation(
        fn=lambda s: a * s + b,
        d1=lambda s: np.full(np.shape(s), a),
        d2=lambda s: np.zeros(np.shape(s)),
        domain=(-math.inf, math.inf),
        kind="nmgClosedForm",
        case="affine",
        params={"a": a, "b": b},
        source=f,
        image=image,
        trivial=abs(a) == 1.0,
    )


# ---------------------------------------------------------------------------
# Scherk


def _scherk(f: fm.Scherk, sign: int, C5sq: float, D: float) -> Transformation:
    sign = fm._check_sign("sign", sign)
    q = float(C5sq)
    D = float(D)
    if not q > 0:
        raise ValidationError("scherk map needs C5sq > 0")
    A, C2 = f.abs_a, f.C2
    if q >= 1:
        domain = (-math.inf, math.inf)
    else:
        half = math.asin(q) / A
        domain = (-C2 - half, -C2 + half)

    def fn(s):
        th = A * (s + C2)
        return sign / A * np.arcsin(np.clip(np.sin(th) / q, -1, 1)) + D

    def d1(s):
        th = A * (s + C2)
        return sign * np.cos(th) / np.sqrt(q * q - np.sin(th) ** 2)

    def d2(s):
        th = A * (s + C2)
        sn = np.sin(th)
        return sign * A * sn * (1 - q * q) / (q * q - sn * sn) ** 1.5

    b = f.b if sign == 1 else f.b + 1j * math.pi
    image = fm.Scherk(f.a, b, -D, f.C3sq * q)
    return Transformation(fn, d1, d2, domain, "nmgClosedForm", "scherk",
                          {"sign": sign, "C5sq": q, "D": D}, f, image, trivial=q == 1.0)


# ---------------------------------------------------------------------------
# catenoid


def _catenoid(f: fm.Catenoid, sign: int, mu: float, D: float) -> Transformation:
    sign = fm._check_sign("sign", sign)
    mu, D = float(mu), float(D)
    if not mu > 0:
        raise ValidationError("catenoid map needs mu > 0")
    lam, C2 = f.lam, f.C2
    start = 0.0 if mu >= 1 else math.acosh(1 / mu) / lam
    domain = (-C2 + start, math.inf) if f.eps0 == 1 else (-math.inf, -C2 - start)

    def fn(s):
        th = lam * (s + C2)
        return sign / (lam * mu) * np.arccosh(np.maximum(mu * np.cosh(th), 1.0)) + D

    def d1(s):
        th = lam * (s + C2)
        return sign * np.sinh(th) / np.sqrt((mu * np.cosh(th)) ** 2 - 1)

    def d2(s):
        th = lam * (s + C2)
        c = np.cosh(th)
        return sign * lam * c * (mu * mu - 1) / ((mu * c) ** 2 - 1) ** 1.5

    image = fm.Catenoid(lam * mu, f.c1, -D, sign)
    return Transformation(fn, d1, d2, domain, "nmgClosedForm", "catenoid",
                          {"sign": sign, "mu": mu, "D": D}, f, image, trivial=mu == 1.0)


# ---------------------------------------------------------------------------
# Pillars


def _pillars(f: fm.Pillars, sign: int, Lambda, D: float) -> Transformation:
    sign = fm._check_sign("sign", sign)
    lm = Lambda if isinstance(Lambda, Modulus) else Modulus(float(Lambda))
    if not 0 < lm.k < 1:
        raise ValidationError("pillars map needs 0 < Lambda < 1")
    D = float(D)
    g = f.gamma
    c = math.sqrt(abs(f.c0))
    q = f.scale
    kappa = g.k / (g.kprime * lm.k)
    K = el.complete_k(g)
    # sd^-1(x, Lambda) needs |x| <= 1/Lambda', and |x| <= kappa |cn|
    bound = 1.0 / (lm.kprime * kappa)
    if bound >= 1:
        lo, hi = sorted((-f.C2, -f.C2 + f.eps2 * 2 * K / q))
        domain = (lo, hi)
    else:
        domain = _pillars_restricted(f, bound, q, K)

    def xs(s):
        sn, cn, dn = el.sncndn(q * (np.asarray(s) + f.C2), g)
        return sn, cn, dn, kappa * cn

    def Q(x):
        return (1 - (lm.kprime * x) ** 2) * (1 + (lm.k * x) ** 2)

    def fn(s):
        _, _, _, x = xs(s)
        return sign * lm.kprime / c * el.inv_sd(x, lm) + D

    def d1(s):
        sn, cn, dn, x = xs(s)
        xp = -kappa * q * sn * dn
        return sign * lm.kprime / c * xp / np.sqrt(Q(x))

    def d2(s):
        sn, cn, dn, x = xs(s)
        xp = -kappa * q * sn * dn
        xpp = -kappa * q * q * cn * (dn * dn - g.m * sn * sn)
        dq = -2 * lm.kprime**2 * x * (1 + lm.m * x * x) + 2 * lm.m * x * (1 - lm.kprime**2 * x * x)
        Qx = Q(x)
        return sign * lm.kprime / c * (xpp / np.sqrt(Qx) - xp * xp * dq / (2 * Qx**1.5))

    image = fm.Pillars(f.c0, f.c1, -(D + sign * lm.kprime * el.complete_k(lm) / c), -sign, lm)
    return Transformation(fn, d1, d2, domain, "nmgClosedForm", "pillars",
                          {"sign": sign, "Lambda": lm.k, "D": D}, f, image)


def _pillars_restricted(f: fm.Pillars, bound: float, q: float, K: float) -> tuple[float, float]:
    """Interval where |cn| <= bound on the eps2 side, inside the first period."""
    u0 = float(el.inv_cn(bound, f.gamma))       # cn = bound
    u1 = 2 * K - u0                              # cn = -bound
    if f.eps2 == 1:
        return (-f.C2 + u0 / q, -f.C2 + u1 / q)
    return (-f.C2 - u1 / q, -f.C2 - u0 / q)


# ---------------------------------------------------------------------------
# walls


@dataclass(frozen=True)
class _Inner:
    """y(t) with w = sqrt(1 - y^2), P = -y'/w and P' on the side t > 0."""

    y: Fn
    w: Fn
    P: Fn
    dP: Fn
    dy: Fn


def _inner_sech(c: float) -> _Inner:
    return _Inner(
        y=lambda t: 1 / np.cosh(c * t),
        w=lambda t: np.abs(np.tanh(c * t)),
        P=lambda t: c * np.sign(t) / np.cosh(c * t),
        dP=lambda t: -c * c * np.sign(t) * np.tanh(c * t) / np.cosh(c * t),
        dy=lambda t: -c * np.tanh(c * t) / np.cosh(c * t),
    )


def _inner_dn(c: float, g: Modulus) -> _Inner:
    def parts(t):
        return el.sncndn(c * np.asarray(t), g)

    return _Inner(
        y=lambda t: parts(t)[2],
        w=lambda t: g.k * np.abs(parts(t)[0]),
        P=lambda t: c * g.k * parts(t)[1] * np.sign(parts(t)[0]),
        dP=lambda t: -c * c * g.k * parts(t)[0] * parts(t)[2] * np.sign(parts(t)[0]),
        dy=lambda t: -c * g.m * parts(t)[0] * parts(t)[1],
    )


def _inner_cn(c: float, g: Modulus) -> _Inner:
    r = c / g.k

    def parts(t):
        return el.sncndn(r * np.asarray(t), g)

    return _Inner(
        y=lambda t: parts(t)[1],
        w=lambda t: np.abs(parts(t)[0]),
        P=lambda t: r * parts(t)[2] * np.sign(parts(t)[0]),
        dP=lambda t: -c * c * parts(t)[0] * parts(t)[1] * np.sign(parts(t)[0]),
        dy=lambda t: -r * parts(t)[0] * parts(t)[2],
    )


def _outer(kind: str, G: Modulus | None):
    """(value from (y, w), R(y), dR/dy) with outer'(y) = -1/(w R)."""
    if kind == "sech":
        return (lambda y, w: np.arcsinh(w / y), lambda y: y, lambda y: np.ones_like(y))
    if kind == "cn":
        def val(y, w):
            return el.elliptic_f(np.arctan2(w, y), G)

        def R(y):
            return np.sqrt(G.kprime**2 + G.m * y * y)

        return val, R, lambda y: G.m * y / R(y)

    def val_dn(y, w):
        return el.elliptic_f(np.arcsin(np.minimum(w / G.k, 1.0)), G)

    def R_dn(y):
        return np.sqrt(np.maximum((y - G.kprime) * (y + G.kprime), 0.0))

    return val_dn, R_dn, lambda y: y / R_dn(y)


def _wall(f: fm.Family, case: str, sign: int, C4, C3: float) -> Transformation:
    sign = fm._check_sign("sign", sign)
    C3 = float(C3)
    c = f.root
    needs_c4 = case not in ("2.1", "3.1")
    if needs_c4:
        if C4 is None:
            raise ValidationError(f"case {case} needs C4")
        C4 = float(C4)
        if not (math.isfinite(C4) and C4 > 0):
            raise ValidationError("C4 must be positive")
    elif C4 is not None:
        raise ValidationError(f"case {case} takes no C4")

    g = getattr(f, "gamma", None)
    K = el.complete_k(g) if g is not None else math.inf
    G: Modulus | None = None
    if case == "1.1":
        G = Modulus(1 / math.sqrt(1 + C4 * C4), C4 / math.sqrt(1 + C4 * C4))
        inner, outer, end = _inner_sech(c), "cn", math.inf
    elif case == "1.2":
        if not C4 < 1:
            raise ValidationError("case 1.2 needs 0 < C4 < 1")
        G = Modulus.from_complement(C4)
        inner, outer, end = _inner_sech(c), "dn", math.acosh(1 / C4) / c
    elif case == "2.1":
        inner, outer, end = _inner_dn(c, g), "sech", K / c
    elif case == "2.2":
        if not C4 * g.k > 1:
            raise ValidationError("case 2.2 needs C4 > 1/gamma")
        G = Modulus(1 / (g.k * C4))
        inner, outer, end = _inner_dn(c, g), "cn", K / c
    elif case == "2.3":
        if not C4 * g.k < 1:
            raise ValidationError("case 2.3 needs C4 < 1/gamma")
        G = Modulus(C4 * g.k)
        end = K / c if G.kprime <= g.kprime else float(el.inv_dn(G.kprime, g)) / c
        inner, outer = _inner_dn(c, g), "dn"
    elif case == "3.1":
        inner, outer, end = _inner_cn(c, g), "sech", g.k * K / c
    elif case == "3.2":
        if not C4 > 1:
            raise ValidationError("case 3.2 needs C4 > 1")
        G = Modulus(1 / C4)
        inner, outer, end = _inner_cn(c, g), "cn", 2 * g.k * K / c
    elif case == "3.3":
        if not C4 < 1:
            raise ValidationError("case 3.3 needs 0 < C4 < 1")
        G = Modulus(C4)
        inner, outer = _inner_cn(c, g), "dn"
        end = g.k * float(el.inv_cn(G.kprime, g)) / c
    else:
        raise ValidationError(f"unknown wall case {case!r}")

    val, R, dR = _outer(outer, G)
    scale = (G.k if outer == "cn" else 1.0) / c
    C2 = f.C2
    side = f.eps2
    lo, hi = sorted((-C2, -C2 + side * end))

    def t_of(s):
        return np.asarray(s) + C2

    def fn(s):
        t = t_of(s)
        return sign * scale * val(inner.y(t), inner.w(t)) + C3

    def d1(s):
        t = t_of(s)
        return sign * scale * inner.P(t) / R(inner.y(t))

    def d2(s):
        t = t_of(s)
        y = inner.y(t)
        Rv = R(y)
        return sign * scale * (inner.dP(t) / Rv - inner.P(t) * dR(y) * inner.dy(t) / (Rv * Rv))

    image_name = WALL_IMAGE[case]
    if image_name == "great_wall":
        image = fm.GreatWall(f.c0, f.c1, -C3, sign)
    else:
        image = fm.FAMILIES[image_name](f.c0, f.c1, -C3, sign, G)
    params = {"sign": sign, "C3": C3}
    if needs_c4:
        params["C4"] = C4
    return Transformation(fn, d1, d2, (lo, hi), "nmgClosedForm", case, params, f, image)


# ---------------------------------------------------------------------------
# public entry points


def nmg_for(f: fm.Family, case: str | None = None, **consts) -> Transformation:
    """Closed-form nontrivial transformation of family ``f``.

    Constants per family:

    * plane, helicoid: ``a``, ``b`` (g = a t + b)
    * scherk: ``sign``, ``C5sq``, ``D``
    * catenoid: ``sign``, ``mu``, ``D``
    * pillars: ``sign``, ``Lambda``, ``D``
    * walls: ``case`` in WALL_CASES[name], ``sign``, ``C4`` (not for x.1), ``C3``
    """
    try:
        if isinstance(f, (fm.Plane, fm.Helicoid)):
            return _affine(f, consts.pop("a"), consts.pop("b", 0.0), **consts)
        if isinstance(f, fm.Scherk):
            return _scherk(f, **consts)
        if isinstance(f, fm.Catenoid):
            return _catenoid(f, **consts)
        if isinstance(f, fm.Pillars):
            return _pillars(f, **consts)
        cases = WALL_CASES[f.name]
        if case not in cases:
            raise ValidationError(f"{f.name} cases are {cases}, got {case!r}")
        return _wall(f, case, consts.pop("sign", 1), consts.pop("C4", None), consts.pop("C3", 0.0), **consts)
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"bad transformation constants for {f.name}: {exc}") from None


def transformed_surface(f: fm.Family, t: Transformation) -> fm.Family:
    """Family record of g o f."""
    if t.kind in ("trivialAffine", "trivialConstant"):
        eps = t.params["epsilon"]
        if eps == 0:
            return fm.Plane(0.0, 0.0, t.params["C"])
        return _negated(f, t.params["C"], eps)
    if t.source is None or t.image is None or t.source != f:
        raise MismatchError(f"transformation was not built for {f.name} with these parameters")
    return t.image


def family_cases(name: str) -> tuple[str | None, ...]:
    """Implemented g-cases of a family; ``None`` where the family has one."""
    if name not in fm.FAMILIES:
        raise ValidationError(f"unknown family {name!r}")
    return WALL_CASES.get(name, (None,))


def draw_constants(f: fm.Family, case: str | None, rng) -> dict:
    """Admissible random constants for ``nmg_for(f, case, **consts)``."""
    if isinstance(f, (fm.Plane, fm.Helicoid)):
        return {"a": rng.sign() * rng.uniform(0.5, 2.0), "b": rng.uniform(-1, 1)}
    out = {"sign": rng.sign()}
    if isinstance(f, fm.Scherk):
        out.update(C5sq=rng.uniform(0.6, 1.6), D=rng.uniform(-1, 1))
    elif isinstance(f, fm.Catenoid):
        out.update(mu=rng.uniform(0.5, 2.0), D=rng.uniform(-1, 1))
    elif isinstance(f, fm.Pillars):
        out.update(Lambda=rng.uniform(0.2, 0.9), D=rng.uniform(-1, 1))
    else:
        out["C3"] = rng.uniform(-1, 1)
        inv_g = 1.0 / f.gamma.k if hasattr(f, "gamma") else 1.0
        ranges = {
            "1.1": (0.3, 2.0), "1.2": (0.2, 0.9),
            "2.2": (1.1 * inv_g, 2.0 * inv_g), "2.3": (0.2 * inv_g, 0.9 * inv_g),
            "3.2": (1.1, 2.5), "3.3": (0.2, 0.9),
        }
        if case in ranges:
            out["C4"] = rng.uniform(*ranges[case])
    return out


def custom(fn: Fn, d1: Fn | None = None, d2: Fn | None = None,
           domain: tuple[float, float] = (-math.inf, math.inf), step: float = 1e-4) -> Transformation:
    """Wrap an arbitrary real map; missing derivatives use central differences.

    The kind is ``nmgNumeric`` and ``params["fdDerivatives"]`` records
    whether any derivative is a finite difference.
    """
    fd = d1 is None or d2 is None
    if d1 is None:
        def d1(s):
            s = np.asarray(s, dtype=float)
            return (fn(s + step) - fn(s - step)) / (2 * step)
    if d2 is None:
        def d2(s):
            s = np.asarray(s, dtype=float)
            return (fn(s + step) - 2 * fn(s) + fn(s - step)) / (step * step)
    return Transformation(fn, d1, d2, tuple(map(float, domain)), "nmgNumeric", "custom",
                          {"fdDerivatives": fd})


def nmg_ode_residual(t: Transformation, h: Callable, s):
    """|g''/(g'^3 - g') - h(s)|; raises on the trivial locus g' in {0, +-1}."""
    s_arr = np.asarray(s, dtype=float)
    g1 = np.asarray(t.deriv1(s_arr))
    g2 = np.asarray(t.deriv2(s_arr))
    den = g1**3 - g1
    if s_arr.ndim == 0:
        if not abs(float(den)) > _TRIVIAL_LOCUS:
            raise TrivialLocusError("g'^3 - g' vanishes: trivial locus")
        return float(abs(g2 / den - h(s_arr)))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(g2 / den - h(s_arr))
    out = np.asarray(out, dtype=float)
    out[~(np.abs(den) > _TRIVIAL_LOCUS)] = np.nan
    return out
