import numpy as np
import pytest

from invdynopt import builtin


@pytest.fixture(scope="session")
def all_builtins():
    return {name: builtin(name) for name in
            ("pendulum", "double_pendulum", "planar_2link_foot", "chain7")}


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_state(tree, gen, vel_scale=1.0, acc_scale=1.0):
    n = tree.nv
    q = gen.uniform(-np.pi, np.pi, n)
    v = vel_scale * gen.standard_normal(n)
    a = acc_scale * gen.standard_normal(n)
    return q, v, a
