import time

import numpy as np
import pytest

from fmbelief.config import load_config
from fmbelief.control import lqr_gain
from fmbelief.experiment import run_sweep
from fmbelief.model import LqgModel, default_model

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def gain(model):
    return lqr_gain(model)


@pytest.fixture
def scalar_model():
    return LqgModel(A=[[0.9]], B=[[0.5]], C=[[1.0]], sigma_w=[[0.3]], sigma_v=[[0.5]],
                    Q=[[1.0]], R=[[1.0]], prior_mean=[0.2], prior_cov=[[1.5]])


@pytest.fixture(scope="session")
def desk_sweep(tmp_path_factory):
    """Desk-preset sweep (T=300, 20 seeds, H up to 20) with prop1 columns."""
    out = tmp_path_factory.mktemp("desk")
    cfg = load_config(preset="desk", out_dir=str(out),
                      overrides=["sweep.obs_only=true", "output.plots=false"])
    start = time.perf_counter()
    report = run_sweep(cfg, keep_records=True)
    return cfg, report, time.perf_counter() - start


def random_spd(rng, n, scale=1.0):
    G = rng.normal(size=(n, n)) * scale
    return G @ G.T + 1e-3 * np.eye(n)
