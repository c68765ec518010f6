import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qoelab import ScoreMatrix


def panel_matrix(n_faithful=18, n_adversarial=9, n_conditions=40, seed=27,
                 faithful_sigma=4.0, adversarial_sigma=30.0, truth_range=(20.0, 80.0)):
    """Synthetic grading panel: faithful observers track the per-condition
    ground truth with small noise; adversarial observers grade on an
    inverted scale with large idiosyncratic noise."""
    rng = np.random.default_rng(seed)
    truth = rng.uniform(*truth_range, n_conditions)
    rows, names = [], []
    for i in range(n_faithful):
        rows.append(np.clip(truth + rng.normal(0, faithful_sigma, n_conditions), 0, 100))
        names.append(f"F{i:02d}")
    for i in range(n_adversarial):
        rows.append(np.clip(100 - truth + rng.normal(0, adversarial_sigma, n_conditions), 0, 100))
        names.append(f"A{i}")
    conditions = [f"c{j:03d}" for j in range(n_conditions)]
    return ScoreMatrix(names, conditions, np.array(rows))


@pytest.fixture
def panel_27():
    """The 27-observer desk-scale fixture: 18 faithful + 9 adversarial."""
    return panel_matrix()
