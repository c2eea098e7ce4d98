import numpy as np
import pytest

from humanoid_suite import config
from humanoid_suite.rewards import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens once here so timed tests measure steady state
    kernels.warmup()


@pytest.fixture(scope="session")
def all_task_ids():
    return config.list_tasks()


def load(task_id, **kw):
    return config.load_task(task_id, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
