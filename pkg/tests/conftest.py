import numpy as np
import pytest

from sdar import nets


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def finite_diff_grad(fn, params: nets.ParamSet, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of scalar fn(params) over every entry."""
    base = params.flat()
    grad = np.empty_like(base)
    for i in range(base.size):
        up = base.copy()
        up[i] += h
        down = base.copy()
        down[i] -= h
        grad[i] = (fn(params.with_flat(up)) - fn(params.with_flat(down))) / (2.0 * h)
    return grad


def max_rel_err(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))
