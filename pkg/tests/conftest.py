from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
GOLDENS = Path(__file__).resolve().parent / "goldens"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def goldens_dir() -> Path:
    return GOLDENS


def circle_polyline(radius: float, start_angle: float, end_angle: float,
                    num: int, center=(0.0, 0.0)) -> np.ndarray:
    """Points sampled exactly on a circle, traversed CCW for end > start."""
    th = np.linspace(start_angle, end_angle, num)
    return np.column_stack([center[0] + radius * np.cos(th),
                            center[1] + radius * np.sin(th)])
