import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mingraph import families as fm
from mingraph import geomexport as ge
from mingraph.errors import EmptyDomainError, ValidationError
from mingraph.rng import SplitMix64
from mingraph.wirtinger import ComplexPoint

WINDOW = (-3.0, -3.0, 3.0, 3.0)


def circle(level=1.0):
    return fm.SingularCurveSpec(lambda x, y: np.asarray(x) ** 2 + np.asarray(y) ** 2, level, "circle")


class TestMesh:
    def test_plane_full(self):
        m = ge.sample_mesh(fm.Plane(1, 2, 3), (0, 0, 1, 1), 3, 3)
        assert m.heights.size == 9 and not m.holes.any()
        assert m.faces.shape == (8, 3)
        X, Y = m.coords()
        assert np.array_equal(m.heights, X + 2 * Y + 3)

    def test_faces_skip_holes(self):
        m = ge.sample_mesh(fm.figure_params()["sharp_wall"], WINDOW, 65, 65)
        assert m.holes.any() and not m.holes.all()
        assert not m.holes.ravel()[m.faces].any()
        assert m.faces.min() >= 0 and m.faces.max() < m.heights.size

    @pytest.mark.parametrize("name", ["pillars", "great_wall", "thick_wall", "sharp_wall"])
    def test_heights_match_direct_evaluation(self, name):
        fam = fm.figure_params()[name]
        m = ge.sample_mesh(fam, WINDOW, 41, 37)
        X, Y = m.coords()
        for j, i in zip(*np.nonzero(~m.holes)):
            assert m.heights[j, i] == fm.eval_height(fam, ComplexPoint(X[j, i], Y[j, i]))

    def test_holes_are_outside_domain(self):
        fam = fm.figure_params()["pillars"]
        m = ge.sample_mesh(fam, WINDOW, 50, 50, margin=1e-2)
        X, Y = m.coords()
        assert np.array_equal(m.holes, ~fam.in_domain(X, Y, 1e-2))

    def test_all_holes(self):
        with pytest.raises(EmptyDomainError):
            ge.sample_mesh(fm.Scherk(1.0, 0.0, 0.0, 0.5), (40, 40, 41, 41), 5, 5)

    @pytest.mark.parametrize("nx,ny,window", [(1, 5, WINDOW), (5, 1, WINDOW), (5, 5, (0, 0, 0, 1)), (5, 5, (0, 0, 1))])
    def test_bad_arguments(self, nx, ny, window):
        with pytest.raises(ValidationError):
            ge.sample_mesh(fm.Plane(0, 0, 0), window, nx, ny)

    def test_face_validation(self):
        with pytest.raises(ValidationError):
            ge.HeightMesh((0, 0), (1, 1), np.zeros((2, 2)), np.array([[0, 1, 4]]))
        with pytest.raises(ValidationError):
            ge.HeightMesh((0, 0), (0, 1), np.zeros((2, 2)), np.zeros((0, 3), int))


class TestCurves:
    def test_circle(self):
        (c,) = ge.extract_curve(circle(), (-1.5, -1.5, 1.5, 1.5), 512)
        assert c.closed
        assert np.max(np.abs(np.abs(c.points) - 1)) <= 1e-3
        assert c.points[0] == c.points[-1]

    def test_below_minimum_is_empty(self):
        assert ge.extract_curve(circle(-1.0), (-1.5, -1.5, 1.5, 1.5), 64) == []

    def test_resolution_floor(self):
        with pytest.raises(ValidationError):
            ge.extract_curve(circle(), WINDOW, 7)

    def test_consecutive_points_close(self):
        fam = fm.figure_params()["pillars"]
        cell = 6.0 / 128
        for spec in fam.singular_curves():
            for c in ge.extract_curve(spec, WINDOW, 128):
                assert np.all(np.abs(np.diff(c.points)) <= 2 * math.sqrt(2) * cell)

    def test_interpolation_bound(self):
        fam = fm.figure_params()["thick_wall"]
        cell, h = 6.0 / 200, 1e-6
        for spec in fam.singular_curves():
            for c in ge.extract_curve(spec, WINDOW, 200):
                x, y = c.points.real, c.points.imag
                F = spec.crossing(x, y)
                g = np.hypot((spec.crossing(x + h, y) - spec.crossing(x - h, y)) / (2 * h),
                             (spec.crossing(x, y + h) - spec.crossing(x, y - h)) / (2 * h))
                assert np.all(np.abs(F) <= 1.5 * cell * g + 1e-12)

    def test_two_circles_are_separate(self):
        spec = fm.SingularCurveSpec(
            lambda x, y: np.minimum((np.asarray(x) - 1) ** 2 + np.asarray(y) ** 2,
                                    (np.asarray(x) + 1) ** 2 + np.asarray(y) ** 2), 0.25, "pair")
        cs = ge.extract_curve(spec, WINDOW, 120)
        assert len(cs) == 2 and all(c.closed for c in cs)

    def test_great_wall_scanlines(self):
        fam = fm.draw_params("great_wall", SplitMix64(17))
        spec = fam.singular_curves()[0]
        res = 256
        cell = 6.0 / res
        pts = np.concatenate([c.points for c in ge.extract_curve(spec, WINDOW, res)])
        assert pts.size
        xs = np.linspace(-3, 3, 4001)
        found = 0
        for y in np.linspace(-2.9, 2.9, 20):
            F = spec.crossing(xs, np.full_like(xs, y))
            for k in np.flatnonzero(np.sign(F[:-1]) * np.sign(F[1:]) < 0):
                a, b = xs[k], xs[k + 1]
                fa = spec.crossing(np.asarray(a), np.asarray(y))
                for _ in range(60):
                    m = 0.5 * (a + b)
                    fm_ = spec.crossing(np.asarray(m), np.asarray(y))
                    if np.sign(fm_) == np.sign(fa):
                        a, fa = m, fm_
                    else:
                        b = m
                root = 0.5 * (a + b)
                if abs(spec.crossing(np.asarray(root), np.asarray(y))) > 1e-8:
                    continue  # a jump, not a zero
                if min(abs(root - WINDOW[0]), abs(root - WINDOW[2])) < 2 * cell:
                    continue
                found += 1
                assert np.min(np.abs(pts - complex(root, y))) <= 2 * cell
        assert found >= 5


class TestFiles:
    def test_obj_two_by_two(self, tmp_path):
        m = ge.sample_mesh(fm.Plane(0.5, 0, 1), (0, 0, 1, 1), 2, 2)
        p = tmp_path / "m.obj"
        ge.write_obj(m, p)
        data = p.read_bytes()
        assert b"\r" not in data
        lines = data.decode().splitlines()
        assert [ln[0] for ln in lines] == ["v"] * 4 + ["f"] * 2
        assert lines[4] == "f 1 2 4" and lines[5] == "f 1 4 3"
        assert lines[1] == "v 1 0 1.5"

    def test_obj_remaps_holes(self, tmp_path):
        H = np.array([[0.0, 1.0, 2.0], [np.nan, 4.0, 5.0]])
        faces = ge._cell_faces(~np.isnan(H))
        m = ge.HeightMesh((0.0, 0.0), (1.0, 1.0), H, faces)
        p = tmp_path / "h.obj"
        ge.write_obj(m, p)
        lines = p.read_text().splitlines()
        v = [ln for ln in lines if ln.startswith("v ")]
        f = [ln for ln in lines if ln.startswith("f ")]
        assert len(v) == 5 and f == ["f 2 3 5", "f 2 5 4"]

    def test_obj_seventeen_digits(self, tmp_path):
        m = ge.sample_mesh(fm.figure_params()["great_wall"], (0.1, 0.2, 0.9, 0.7), 4, 4)
        p = tmp_path / "g.obj"
        ge.write_obj(m, p)
        zs = [float(ln.split()[3]) for ln in p.read_text().splitlines() if ln.startswith("v ")]
        assert np.array_equal(zs, m.heights[~m.holes])

    def test_obj_is_stable(self, tmp_path):
        fam = fm.figure_params()["pillars"]
        a, b = tmp_path / "a.obj", tmp_path / "b.obj"
        ge.write_obj(ge.sample_mesh(fam, WINDOW, 30, 30), a)
        ge.write_obj(ge.sample_mesh(fam, WINDOW, 30, 30), b)
        assert a.read_bytes() == b.read_bytes()

    def test_csv_round_trip(self, tmp_path):
        m = ge.sample_mesh(fm.figure_params()["thick_wall"], WINDOW, 33, 29)
        p = tmp_path / "m.csv"
        ge.write_csv(m, p)
        back = ge.read_mesh_csv(p)
        assert np.array_equal(np.isnan(back), m.holes)
        assert np.array_equal(back[~m.holes], m.heights[~m.holes])
        assert p.read_bytes().startswith(b"i,j,x,y,z\r\n")

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=4, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_csv_bit_exact(self, tmp_path_factory, zs):
        H = np.array(zs).reshape(2, 2)
        m = ge.HeightMesh((0.0, 0.0), (1.0, 1.0), H, ge._cell_faces(np.ones((2, 2), bool)))
        p = tmp_path_factory.mktemp("csv") / "m.csv"
        ge.write_csv(m, p)
        assert np.array_equal(ge.read_mesh_csv(p), H)

    def test_csv_quoting(self, tmp_path):
        c = ge.CurvePolyline(np.array([0.5 + 1j, 2 - 0.25j]), 1.0, 'say "hi", twice')
        p = tmp_path / "c.csv"
        ge.write_csv([c], p)
        raw = p.read_bytes().decode()
        assert '"say ""hi"", twice"' in raw
        rows = list(csv.reader(raw.splitlines()))
        assert rows[0] == ["curve", "label", "level", "closed", "index", "x", "y"]
        assert rows[1][1] == 'say "hi", twice' and float(rows[2][6]) == -0.25

    def test_csv_reports(self, tmp_path):
        from mingraph.report import ResidualReport

        r = ResidualReport.from_residuals("x", [1e-9, 2e-9], tol=1e-6, details={"note": "a,b"})
        p = tmp_path / "r.csv"
        ge.write_csv([r, r], p)
        rows = list(csv.DictReader(p.open(newline="")))
        assert len(rows) == 2 and rows[0]["passed"] == "True"
        assert float(rows[0]["maxResidual"]) == 2e-9
        assert '"note": "a,b"' in rows[0]["details"]

    def test_csv_rejects_other(self, tmp_path):
        with pytest.raises(ValidationError):
            ge.write_csv([1, 2], tmp_path / "x.csv")

    def test_io_error_propagates(self, tmp_path):
        m = ge.sample_mesh(fm.Plane(0, 0, 0), (0, 0, 1, 1), 2, 2)
        with pytest.raises(OSError):
            ge.write_obj(m, tmp_path / "missing" / "m.obj")
