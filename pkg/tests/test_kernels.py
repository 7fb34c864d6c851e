import json
import os
import subprocess
import sys

import numpy as np
import pytest

from freequot import kernels
from freequot._accel import USING_NUMBA
from freequot.schreier import _relator_arrays, preset_relators


def _pure(fn):
    return getattr(fn, "py_func", fn)


def test_bfs_and_srw_agree(grid):
    t = grid.table
    assert np.array_equal(kernels.bfs_distances(t, 0), _pure(kernels.bfs_distances)(t, 0))
    assert np.array_equal(kernels.bfs_order(t, 0), _pure(kernels.bfs_order)(t, 0))
    f = np.random.default_rng(1).random(t.shape[0])
    a, b = np.empty_like(f), np.empty_like(f)
    kernels.srw_apply(t, f, a)
    _pure(kernels.srw_apply)(t, f, b)
    assert np.allclose(a, b, atol=1e-15)


def test_nb_step_agrees(powers):
    t = powers[4].table
    cur = np.random.default_rng(2).integers(0, 5, size=t.shape).astype(np.int64)
    a, b = np.empty_like(cur), np.empty_like(cur)
    kernels.nb_step(t, cur, a)
    _pure(kernels.nb_step)(t, cur, b)
    assert np.array_equal(a, b)


def test_power_and_return_probabilities_agree(tree5):
    t = tree5.table
    x = kernels.dirichlet_power(t, 2000, 1e-10)
    y = _pure(kernels.dirichlet_power)(t, 2000, 1e-10)
    assert abs(x[0] - y[0]) < 1e-12 and x[1] == y[1]
    assert np.allclose(kernels.return_probabilities(t, 0, 8),
                       _pure(kernels.return_probabilities)(t, 0, 8), atol=1e-15)


def test_hlt_agrees():
    flat, off = _relator_arrays(preset_relators("klein", 2))
    a = kernels.hlt_enumerate(4, flat, off, 1000)
    b = _pure(kernels.hlt_enumerate)(4, flat, off, 1000)
    assert a[3] == b[3] == 0
    assert np.array_equal(a[0][: a[2]], b[0][: b[2]])


_SCRIPT = """
import json
from freequot import USING_NUMBA
from freequot.schreier import truncated_quotient
from freequot.words import parse_relators
from freequot.counting import loop_counts
from freequot.spectral import power_iteration_rho
g, _ = truncated_quotient(2, parse_relators("abAB", 2), 4, 2)
print(json.dumps({"numba": USING_NUMBA, "table": g.table.tolist(),
                  "loops": list(loop_counts(g, 8).counts),
                  "rho": power_iteration_rho(g).rho_lower}))
"""


def _run(env_flag):
    env = dict(os.environ)
    env.pop("FREEQUOT_DISABLE_NUMBA", None)
    if env_flag:
        env["FREEQUOT_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", _SCRIPT], env=env, capture_output=True,
                         text=True, check=True, timeout=600)
    return json.loads(out.stdout)


@pytest.mark.slow
def test_pure_python_path_matches_compiled():
    pure = _run(True)
    fast = _run(False)
    assert pure["numba"] is False
    assert fast["numba"] is USING_NUMBA
    assert pure["table"] == fast["table"]
    assert pure["loops"] == fast["loops"]
    assert abs(pure["rho"] - fast["rho"]) < 1e-10
