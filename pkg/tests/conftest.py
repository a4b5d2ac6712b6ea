import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_history(theta, prices, noise=None):
    """Stack (p, theta p + noise) pairs into a History."""
    from netprice.pacbayes import History

    hist = History(theta.shape[0])
    for i, p in enumerate(prices):
        d = theta @ p if noise is None else theta @ p + noise[i]
        hist.append(np.asarray(p, dtype=float), d)
    return hist
