import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mingraph import elliptic as el
from mingraph import families as fm
from mingraph.errors import DomainError, PoleError, SingularError, ValidationError
from mingraph.rng import SplitMix64
from mingraph.wirtinger import (
    ComplexPoint,
    jet_arrays,
    jet_arrays_adaptive,
    mse_residual,
    ratio_residual,
    weakened_ode_residual,
)

from oracles import ellipf_quad, sech_inv_log

NAMES = sorted(fm.FAMILIES)

# cmath composition of sech^-1, cosh, ln, tanh, coth for GreatWall(1, 0, 0, 1) at 0.7+0.4i
GREAT_WALL_07_04 = 0.49311973055808705


def great_wall_oracle(c0, c1, C2, eps2, z):
    w = cmath.sqrt(c0) * (z + c1) / 2
    W = cmath.tanh(w) / cmath.tanh(w.conjugate())
    X = math.sqrt(1 + cmath.cosh(cmath.log(W)).real) / math.sqrt(2)
    return eps2 / math.sqrt(abs(c0)) * sech_inv_log(X) - C2


def in_domain_samples(fam, n=2000, seed=0, margin=1e-2, box=3.0):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-box, box, (2, 200 * n))
    ok = fam.in_domain(x, y, margin)
    return x[ok][:n], y[ok][:n]


def cases():
    out = []
    for name in NAMES:
        rng = SplitMix64(100 + NAMES.index(name))
        out += [(f"{name}-draw{i}", fm.draw_params(name, rng)) for i in range(3)]
    out += [(f"{n}-figure", f) for n, f in fm.figure_params().items()]
    return out


CASES = cases()
IDS = [c[0] for c in CASES]


class TestExamples:
    def test_plane(self):
        assert fm.eval_height(fm.Plane(1, 2, 3), ComplexPoint(1, 1)) == 6

    def test_catenoid(self):
        p = ComplexPoint(math.cosh(1.0), 0.0)
        assert fm.eval_height(fm.Catenoid(1.0, 0, 0, 1), p) == pytest.approx(1.0, abs=1e-14)

    def test_helicoid(self):
        v = fm.eval_height(fm.Helicoid(2, 0, 0, 0), ComplexPoint(1, 1))
        assert v == pytest.approx(-math.pi / 4, abs=1e-15)

    def test_great_wall_frozen(self):
        v = fm.eval_height(fm.GreatWall(1, 0, 0, 1), ComplexPoint(0.7, 0.4))
        assert v == pytest.approx(GREAT_WALL_07_04, rel=1e-14)

    @given(x=st.floats(-3, 3), y=st.floats(-3, 3))
    def test_great_wall_oracle(self, x, y):
        fam = fm.GreatWall(0.5 + 1j, 0.2j, 0.1, -1)
        if not fam.in_domain(x, y, 1e-3):
            return
        expect = great_wall_oracle(fam.c0, fam.c1, fam.C2, fam.eps2, complex(x, y))
        assert float(fam.height(x, y)) == pytest.approx(expect, rel=1e-9, abs=1e-9)

    def test_characteristic_examples(self):
        assert fm.eval_characteristic(fm.Plane(1, 2, 3), 4.2) == 0.0
        cat = fm.Catenoid(1.0, 0, 0, 1)
        assert fm.eval_characteristic(cat, 1.0) == pytest.approx(-2 / math.sinh(2), rel=1e-15)
        sch = fm.Scherk(1, 0, 0, 1)
        assert fm.eval_characteristic(sch, math.pi / 4) == pytest.approx(1.0, rel=1e-15)

    def test_poles(self):
        with pytest.raises(PoleError):
            fm.eval_characteristic(fm.Catenoid(1.0, 0, 0, 1), 0.0)
        with pytest.raises(PoleError):
            fm.eval_characteristic(fm.Scherk(1, 0, 0, 1), math.pi / 2)
        pil = fm.figure_params()["pillars"]
        with pytest.raises(PoleError):
            fm.eval_characteristic(pil, -pil.C2)
        thick = fm.figure_params()["thick_wall"]
        quarter = el.complete_k(thick.gamma) / thick.root
        with pytest.raises(PoleError):
            fm.eval_characteristic(thick, quarter)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            fm.eval_height(fm.Catenoid(1.0, 0, 0, 1), ComplexPoint(0.1, 0.1))
        with pytest.raises(SingularError):
            fm.eval_height(fm.Catenoid(1.0, 0, 0, 1), ComplexPoint(1.001, 0.0), margin=1e-2)


class TestValidation:
    @pytest.mark.parametrize(
        "name, params",
        [
            ("helicoid", dict(alpha=0, beta=0, gamma=0, delta=0)),
            ("scherk", dict(a=0, b=0, C2=0, C3sq=1)),
            ("scherk", dict(a=1, b=0, C2=0, C3sq=0)),
            ("catenoid", dict(lam=-1, c1=0, C2=0, eps0=1)),
            ("catenoid", dict(lam=1, c1=0, C2=0, eps0=2)),
            ("pillars", dict(c0=0, c1=0, C2=0, eps2=1, gamma=0.5)),
            ("pillars", dict(c0=1, c1=0, C2=0, eps2=1, gamma=1.0)),
            ("thick_wall", dict(c0=1, c1=0, C2=0, eps2=1, gamma=0.0)),
            ("sharp_wall", dict(c0=1, c1=0, C2=0, eps2=-1, gamma=1.5)),
            ("great_wall", dict(c0=1, c1=0, C2=float("nan"), eps2=1)),
        ],
    )
    def test_rejects(self, name, params):
        with pytest.raises(ValidationError):
            fm.make_family(name, **params)

    def test_unknown(self):
        with pytest.raises(ValidationError):
            fm.make_family("torus")
        with pytest.raises(ValidationError):
            fm.make_family("plane", alpha=1, beta=2)

    def test_lambda_alias_and_pairs(self):
        cat = fm.make_family("catenoid", **{"lambda": 1.0, "c1": [0.5, -1], "C2": 0, "eps0": 1})
        assert cat.c1 == 0.5 - 1j
        assert cat.params()["c1"] == [0.5, -1.0]


class TestPillars:
    def derivation_form(self, k, c0, c1, C1, C2, eps2, z):
        alpha = math.sqrt(C1 - 2 * abs(c0) / k)
        beta = math.sqrt(C1 + 2 * abs(c0) / k)
        gamma = alpha / beta
        t = abs(cmath.tanh(cmath.sqrt(c0) * (z + c1) / 2))
        inner = math.sqrt(C1 - (2 * abs(c0) / k) * math.cosh(2 * math.log(t))) / alpha
        return -(2 * eps2 / (beta * math.sqrt(k))) * ellipf_quad(math.asin(inner), gamma) - C2

    @pytest.mark.parametrize("k, c0, C1, eps2", [(1, 1, 10, -1), (2, 0.5 + 0.5j, 3, 1), (0.5, -1j, 9, 1)])
    def test_from_derivation(self, k, c0, C1, eps2):
        fam = fm.Pillars.from_derivation(k=k, c0=c0, c1=0.1, C1=C1, C2=0.3, eps2=eps2)
        x, y = in_domain_samples(fam, n=25, seed=1)
        for xi, yi in zip(x, y):
            expect = self.derivation_form(k, c0, 0.1, C1, 0.3, eps2, complex(xi, yi))
            assert float(fam.height(xi, yi)) == pytest.approx(expect, abs=1e-9)

    def test_radii(self):
        fam = fm.figure_params()["pillars"]
        lo, hi = fam.radii
        g, gp = fam.gamma.k, fam.gamma.kprime
        level = (2 + 2 * g * g) / gp**2
        for r in (lo, hi):
            assert r * r + 1 / (r * r) == pytest.approx(level, rel=1e-13)

    def test_make_family_derivation(self):
        fam = fm.make_family("pillars", k=1, c0=1, c1=0, C1=10, C2=0, eps2=-1)
        assert fam == fm.figure_params()["pillars"]
        assert fam.gamma.k == pytest.approx(math.sqrt(8 / 12), rel=1e-15)
        assert fam.eps2 == 1


class TestWallForms:
    """The angle-based heights agree with the inverse-function compositions."""

    @pytest.mark.parametrize("name", ["great_wall", "thick_wall", "sharp_wall"])
    def test_against_inverse_functions(self, name):
        fam = fm.draw_params(name, SplitMix64(9))
        x, y = in_domain_samples(fam, n=300, seed=2)
        X = fam.x_value(x, y)
        if name == "great_wall":
            inner = el.inv_sech(X)
        elif name == "thick_wall":
            inner = el.inv_dn(X, fam.gamma)
        else:
            inner = fam.gamma.k * el.inv_cn(X, fam.gamma)
        expect = fam.eps2 * inner / fam.root - fam.C2
        assert np.max(np.abs(fam.height(x, y) - expect)) <= 1e-7

    def test_re_w_is_cosh_log(self):
        fam = fm.SharpWall(-1 + 1j, 0.3, 0, 1, 0.5)
        for z in (0.2 + 0.1j, -1.3 + 0.7j, 2.0 - 2.2j):
            w = cmath.sqrt(fam.c0) * (z + fam.c1) / 2
            W = cmath.tanh(w) / cmath.tanh(w.conjugate())
            assert abs(W) == pytest.approx(1.0, abs=1e-12)
            assert float(fam.re_w(z.real, z.imag)) == pytest.approx(W.real, abs=1e-12)

    def test_ctanh_large_arguments(self):
        w = np.array([400 + 1j, -400 - 3j, 1e-20 + 0j, 0.3 + 0.2j])
        t = fm.ctanh(w)
        assert np.all(np.isfinite(t))
        assert t[0] == pytest.approx(1.0) and t[1] == pytest.approx(-1.0)
        assert t[2] == pytest.approx(1e-20, rel=1e-12)
        assert t[3] == pytest.approx(cmath.tanh(0.3 + 0.2j), rel=1e-14)


class TestDomain:
    def test_plane_everywhere(self):
        assert fm.in_domain(fm.Plane(0, 0, 0), ComplexPoint(1e6, -1e6), 0.5)

    def test_helicoid_axis_and_cut(self):
        h = fm.Helicoid(1, 1, 2, 0)
        assert not fm.in_domain(h, ComplexPoint(-1, -2), 1e-2)
        assert not fm.in_domain(h, ComplexPoint(-3, -2), 1e-2)
        assert fm.in_domain(h, ComplexPoint(0, -2), 1e-2)

    def test_margin_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            fm.in_domain(fm.Plane(0, 0, 0), ComplexPoint(0, 0), -1)

    def test_sharp_wall_dense(self):
        # everywhere except thin bands around Re W = +-1
        fam = fm.figure_params()["sharp_wall"]
        x, y = np.random.default_rng(0).uniform(-3, 3, (2, 20000))
        ok = fam.in_domain(x, y, 1e-2)
        assert np.all(np.abs(fam.re_w(x[~ok], y[~ok])) >= 1 - 1e-2)
        assert np.all(np.isfinite(fam.height(x, y)))

    def test_thick_wall_point_on_lower_curve(self):
        fam = fm.ThickWall(1 + 0.5j, 0.1, 0, 1, 0.2)
        lower = fam.singular_curves()[1]
        # bisection along a ray from a domain point toward the excluded region
        xs, ys = in_domain_samples(fam, n=1, seed=3)
        start = np.array([xs[0], ys[0]])
        direction = None
        for ang in np.linspace(0, 2 * np.pi, 64, endpoint=False):
            d = np.array([math.cos(ang), math.sin(ang)])
            if lower.crossing(*(start + 2 * d)) < 0:
                direction = d
                break
        assert direction is not None
        a, b = 0.0, 2.0
        for _ in range(80):
            m = 0.5 * (a + b)
            if lower.crossing(*(start + m * direction)) > 0:
                a = m
            else:
                b = m
        root = start + a * direction
        p = ComplexPoint(*root)
        assert lower(p) == pytest.approx(lower.level, abs=1e-9)
        assert not fm.in_domain(fam, p, 1e-2)

    @pytest.mark.parametrize("name", NAMES)
    def test_margin_monotone(self, name):
        fam = fm.draw_params(name, SplitMix64(3))
        x, y = np.random.default_rng(1).uniform(-3, 3, (2, 5000))
        wide = fam.in_domain(x, y, 0.1)
        narrow = fam.in_domain(x, y, 0.01)
        assert np.all(narrow[wide])
        assert np.all(np.isfinite(fam.height(x[narrow], y[narrow])))


class TestSingularCurves:
    def test_counts(self):
        figs = fm.figure_params()
        assert fm.singular_curves(fm.Plane(1, 0, 0)) == []
        assert [c.level for c in figs["great_wall"].singular_curves()] == [1.0, -1.0]
        assert len(figs["pillars"].singular_curves()) == 3
        thick = figs["thick_wall"]
        assert [c.level for c in thick.singular_curves()] == [1.0, 2 * 0.96 - 1.0]
        assert len(figs["sharp_wall"].singular_curves()) == 2

    @pytest.mark.parametrize("name", ["pillars", "great_wall", "thick_wall", "sharp_wall"])
    def test_crossing_zero_set_matches_level(self, name):
        fam = fm.draw_params(name, SplitMix64(11))
        rng = np.random.default_rng(4)
        for curve in fam.singular_curves():
            a = rng.uniform(-3, 3, (2, 4000))
            b = a + 0.2 * rng.standard_normal((2, 4000))
            fa, fb = curve.crossing(*a), curve.crossing(*b)
            s = np.sign(fa) != np.sign(fb)
            a, b, fa = a[:, s], b[:, s], fa[s]
            assert a.shape[1] > 0
            for _ in range(60):
                m = 0.5 * (a + b)
                fm_ = curve.crossing(*m)
                left = np.sign(fm_) == np.sign(fa)
                a = np.where(left, m, a)
                fa = np.where(left, fm_, fa)
                b = np.where(left, b, m)
            vals = curve.implicit_fn(*(0.5 * (a + b)))
            assert np.max(np.abs(vals - curve.level)) <= 1e-8


@pytest.mark.parametrize("label, fam", CASES, ids=IDS)
class TestPDE:
    def test_minimality(self, label, fam):
        x, y = in_domain_samples(fam)
        j, _ = jet_arrays_adaptive(fam.height, x, y)
        assert np.nanpercentile(mse_residual(j), 99) <= 1e-6

    def test_characteristic(self, label, fam):
        x, y = in_domain_samples(fam)
        j, _ = jet_arrays_adaptive(fam.height, x, y)
        assert np.nanpercentile(ratio_residual(j, fam.characteristic), 99) <= 1e-6

    def test_fixed_step_minimality(self, label, fam):
        # interior means normal distance >= 1e-2 from every singular curve
        rng = np.random.default_rng(5)
        x, y = rng.uniform(-3, 3, (2, 400000))
        ok = fam.in_domain(x, y, 0.0)
        x, y = x[ok], y[ok]
        dist = np.full(x.shape, np.inf)
        e = 1e-6
        for c in fam.singular_curves():
            F = c.crossing
            g = np.hypot((F(x + e, y) - F(x - e, y)) / (2 * e), (F(x, y + e) - F(x, y - e)) / (2 * e))
            dist = np.minimum(dist, np.abs(F(x, y)) / g)
        keep = dist >= 1e-2
        x, y = x[keep][:2000], y[keep][:2000]
        m = mse_residual(jet_arrays(fam.height, x, y, 1e-4))
        assert np.mean(m <= 1e-6) >= 0.99


@pytest.mark.parametrize("name", ["plane", "helicoid"])
def test_harmonic(name):
    fam = fm.draw_params(name, SplitMix64(21))
    x, y = in_domain_samples(fam, n=1000)
    j, _ = jet_arrays_adaptive(fam.height, x, y)
    assert np.max(np.abs(j.laplacian)) <= 1e-7


@pytest.mark.parametrize("name, sign", [("scherk", 0), ("catenoid", 1), ("pillars", 1),
                                        ("great_wall", -1), ("thick_wall", -1), ("sharp_wall", -1)])
def test_weakened_equation(name, sign):
    fam = fm.draw_params(name, SplitMix64(31))
    assert fam.k_sign == sign
    x, y = in_domain_samples(fam, n=50)
    res = weakened_ode_residual(fam.aprime, x + 1j * y, fam.k_sign)
    assert np.max(res) <= 1e-6


def test_harmonic_families_have_no_aprime():
    with pytest.raises(DomainError):
        fm.Plane(1, 1, 1).aprime(0j)


@settings(max_examples=200)
@given(x=st.floats(-2, 2), y=st.floats(-2, 2),
       r=st.floats(0.5, 2), phase=st.floats(-math.pi, math.pi),
       c3sq=st.floats(0.5, 3))
def test_scherk_reflection_symmetry(x, y, r, phase, c3sq):
    fam = fm.Scherk(cmath.rect(r, phase), 0, 0, c3sq)
    z = complex(x, y)
    zr = fam.reflect(z)
    f1 = float(fam.height(z.real, z.imag))
    f2 = float(fam.height(zr.real, zr.imag))
    if math.isnan(f1):
        assert math.isnan(f2)
    else:
        assert f2 == pytest.approx(f1, abs=1e-9)
    # the reflection is an involution
    assert fam.reflect(zr) == pytest.approx(z, abs=1e-9)


def test_scherk_reflection_is_not_identity():
    fam = fm.Scherk(1 + 0.5j, 0, 0, 1)
    z = 0.3 + 0.2j
    assert abs(fam.reflect(z) - z) > 0.1
