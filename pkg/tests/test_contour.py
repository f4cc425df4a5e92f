import math

import numpy as np
import pytest

from shapespace import (
    ContourError,
    RawContour,
    check_invariants,
    load_contours,
    normalize,
    parse_label,
    synthetic,
)
from shapespace.contour import (
    dedupe_points,
    orient_ccw,
    perimeter,
    principal_axis,
    resample_closed,
    signed_area,
    validate_contour,
)


def rot(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def square(side=1.0):
    return np.array([[0, 0], [side, 0], [side, side], [0, side]], dtype=float)


class TestValidation:
    def test_rejects_self_intersection(self):
        bowtie = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float)
        with pytest.raises(ContourError, match="self-intersecting"):
            validate_contour(RawContour(points=bowtie, id="bowtie"))

    def test_rejects_collinear(self):
        line = np.array([[0, 0], [1, 0], [2, 0], [3, 0]], dtype=float)
        with pytest.raises(ContourError):
            normalize(RawContour(points=line, id="line"), 10)

    def test_rejects_too_few_points(self):
        with pytest.raises(ContourError):
            validate_contour(RawContour(points=np.array([[0.0, 0.0], [1.0, 1.0]])))

    def test_dedupe_drops_repeats_and_closing_point(self):
        pts = np.array([[0, 0], [0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
        out = dedupe_points(pts)
        assert len(out) == 4

    def test_simple_square_passes(self):
        validate_contour(RawContour(points=square(), id="sq"))


class TestOrientation:
    def test_ccw_has_positive_area(self):
        assert signed_area(square()) > 0

    def test_cw_input_reversed(self):
        cw = square()[::-1].copy()
        out = orient_ccw(RawContour(points=cw))
        assert signed_area(out.points) > 0


class TestResampling:
    @pytest.mark.parametrize("n", [7, 50, 295])
    def test_equal_chords(self, n):
        out = resample_closed(square(), n)
        chords = np.linalg.norm(np.roll(out, -1, axis=0) - out, axis=1)
        assert (chords.max() - chords.min()) < 1e-10 * chords.mean()

    def test_points_stay_on_polygon(self):
        out = resample_closed(square(), 40)
        # every sample of a unit square boundary has a coordinate in {0, 1}
        on_edge = (np.abs(out) < 1e-9) | (np.abs(out - 1.0) < 1e-9)
        assert on_edge.any(axis=1).all()

    def test_perimeter_close_to_polygon(self):
        out = resample_closed(square(), 400)
        assert perimeter(out) == pytest.approx(4.0, rel=1e-4)


class TestPrincipalAxis:
    def test_ellipse_axis(self):
        c = synthetic.ellipse_polygon(400, rotation=0.6)
        angle, degenerate = principal_axis(c.points)
        assert not degenerate
        assert angle == pytest.approx(0.6, abs=1e-6)

    def test_circle_is_degenerate(self):
        c = synthetic.circle_polygon(400)
        _, degenerate = principal_axis(c.points)
        assert degenerate


class TestNormalize:
    def test_invariants_hold(self, random_curves):
        for c in random_curves:
            check_invariants(c)

    def test_idempotent(self, random_curves):
        for c in random_curves[:5]:
            again = normalize(c.as_raw(), c.n)
            assert np.abs(again.points - c.points).max() < 1e-9

    def test_similarity_invariant(self):
        rng = np.random.default_rng(1)
        c = synthetic.star_shaped(rng, m=500, aspect=2.0)
        ref = normalize(c, 295)
        pts = (np.roll(c.points, 77, axis=0) @ rot(1.1).T) * 2.5 + [3.0, -4.0]
        out = normalize(RawContour(points=pts, id="moved"), 295)
        assert np.abs(out.points - ref.points).max() < 1e-4

    def test_sampling_invariant(self):
        rng = np.random.default_rng(2)
        c = synthetic.star_shaped(rng, m=500, aspect=2.0)
        ref = normalize(c, 295)
        dense = resample_closed(c.points, 1600, s0=0.317)
        out = normalize(RawContour(points=dense, id="dense"), 295)
        assert np.abs(out.points - ref.points).max() < 1e-4

    def test_start_point_on_positive_x_axis(self, random_curves):
        for c in random_curves:
            x0, y0 = c.points[0]
            assert x0 > 0
            assert abs(y0) < 1e-9

    def test_major_axis_along_x(self):
        c = normalize(synthetic.ellipse_polygon(600, rotation=1.2), 295)
        angle, degenerate = principal_axis(c.points)
        assert not degenerate
        assert min(angle, math.pi - angle) < 1e-3


class TestLabels:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("normal", "Normal"),
            ("Sickle", "Sickle"),
            ("od", "OtherDeformation"),
            ("other deformation", "OtherDeformation"),
            ("", None),
            (None, None),
        ],
    )
    def test_parse_label(self, raw, expected):
        assert parse_label(raw) == expected


class TestManifestLoading:
    def test_round_trip(self, tmp_path):
        (tmp_path / "contours").mkdir()
        sq = square()
        (tmp_path / "contours" / "a.csv").write_text(
            "".join(f"{x},{y}\n" for x, y in sq)
        )
        (tmp_path / "manifest.csv").write_text("path,label\ncontours/a.csv,normal\n")
        out = load_contours(tmp_path / "manifest.csv")
        assert len(out) == 1
        assert out[0].label == "Normal"
        assert out[0].id == "a"

    def test_missing_file_names_row(self, tmp_path):
        (tmp_path / "manifest.csv").write_text("path,label\nnope.csv,normal\n")
        with pytest.raises(ContourError, match="row 2"):
            load_contours(tmp_path / "manifest.csv")

    def test_bad_header_rejected(self, tmp_path):
        (tmp_path / "manifest.csv").write_text("file,class\nx.csv,normal\n")
        with pytest.raises(ContourError, match="header"):
            load_contours(tmp_path / "manifest.csv")
