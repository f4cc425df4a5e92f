import numpy as np
import pytest

from shapespace import normalize, synthetic


@pytest.fixture(scope="session")
def circle295():
    return normalize(synthetic.circle_polygon(800), 295)


@pytest.fixture(scope="session")
def ellipse295():
    return normalize(synthetic.ellipse_polygon(800), 295)


@pytest.fixture(scope="session")
def random_curves():
    """20 normalized random star-shaped curves at the working resolution."""
    rng = np.random.default_rng(42)
    return [
        normalize(
            synthetic.star_shaped(rng, m=400, aspect=rng.uniform(1.2, 3.0), cid=f"r{i}"), 295
        )
        for i in range(20)
    ]


@pytest.fixture(scope="session")
def labeled_corpus_small():
    """12 cells per class, normalized; enough for fold-based classifiers."""
    rng = np.random.default_rng(11)
    return [normalize(c, 295) for c in synthetic.labeled_corpus(rng, per_class=12)]
