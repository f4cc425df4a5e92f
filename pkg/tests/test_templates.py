import numpy as np
import pytest

from shapespace import (
    TemplateError,
    features_table,
    make_templates,
    normalize,
    synthetic,
    template_features,
)
from shapespace.contour import check_invariants


@pytest.fixture(scope="module")
def tset():
    return make_templates(295, 4.0)


class TestTemplates:
    def test_templates_are_canonical(self, tset):
        check_invariants(tset.circle)
        check_invariants(tset.ellipse)

    def test_bad_parameters_rejected(self):
        with pytest.raises(TemplateError):
            make_templates(2, 4.0)
        with pytest.raises(TemplateError):
            make_templates(295, 1.0)

    def test_grid_mismatch_rejected(self, tset):
        c = normalize(synthetic.circle_polygon(400), 100)
        with pytest.raises(TemplateError, match="mismatch"):
            template_features(c, tset)


class TestFeatures:
    def test_circle_near_circle_template(self, tset, circle295):
        f = template_features(circle295, tset)
        assert f.d_circle < 1e-3
        assert f.d_ellipse > 0.1

    def test_ellipse_near_ellipse_template(self, tset):
        c = normalize(synthetic.ellipse_polygon(800, a=4.0, b=1.0), 295)
        f = template_features(c, tset)
        assert f.d_ellipse < 1e-3
        assert f.d_circle > 0.1

    def test_rotation_of_input_irrelevant(self, tset):
        a = normalize(synthetic.ellipse_polygon(800, rotation=0.0), 295)
        b = normalize(synthetic.ellipse_polygon(800, rotation=1.3), 295)
        fa = template_features(a, tset)
        fb = template_features(b, tset)
        assert fa.d_circle == pytest.approx(fb.d_circle, abs=1e-4)
        assert fa.d_ellipse == pytest.approx(fb.d_ellipse, abs=1e-4)

    @pytest.mark.parametrize("space", ["S1", "S2"])
    def test_both_spaces_separate_classes(self, tset, space, circle295):
        ell = normalize(synthetic.ellipse_polygon(800), 295)
        fc = template_features(circle295, tset, space=space)
        fe = template_features(ell, tset, space=space)
        assert fc.d_circle < fc.d_ellipse
        assert fe.d_ellipse < fe.d_circle

    def test_reparam_not_larger_than_fixed(self, tset, random_curves):
        for c in random_curves[:4]:
            f_fixed = template_features(c, tset, method="fixed")
            f_rep = template_features(c, tset, method="reparam")
            assert f_rep.d_circle <= f_fixed.d_circle + 1e-12
            assert f_rep.d_ellipse <= f_fixed.d_ellipse + 1e-12

    def test_features_table_carries_labels(self, tset, labeled_corpus_small):
        rows = features_table(labeled_corpus_small[:6], tset)
        assert [r.label for r in rows] == [c.label for c in labeled_corpus_small[:6]]
        assert all(r.cell_id for r in rows)
