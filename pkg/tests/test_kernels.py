import os
import subprocess
import sys

import numpy as np
import pytest

from gmedim import kernels
from gmedim.criteria import plan_for
from gmedim.states import random_mixed
from gmedim.tensor import DenseProvider, SystemShape


def _inputs(plan, rho):
    provider = DenseProvider(rho)
    off = provider.elements(plan.off_rows, plan.off_cols)
    diag = provider.diagonal(plan.diag_index)
    return off, diag


def test_active_backend_is_listed():
    assert kernels.BACKEND in kernels.available_backends()
    assert kernels.get_backend() is kernels.get_backend(kernels.BACKEND)
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")
@pytest.mark.parametrize("n,d,m", [(3, 3, 0), (4, 3, 1), (4, 3, 2), (5, 2, 2)])
def test_backends_agree(n, d, m):
    plan = plan_for(SystemShape(n, d), m)
    off, diag = _inputs(plan, random_mixed(SystemShape(n, d), 11))
    py = kernels.get_backend("python").plan_sums(off, diag, plan.p_u, plan.p_v, plan.d_pos, 1e-12)
    cy = kernels.get_backend("cython").plan_sums(off, diag, plan.p_u, plan.p_v, plan.d_pos, 1e-12)
    assert py[3] == cy[3] == -1
    assert np.allclose(py[:3], cy[:3], rtol=0, atol=1e-12)


def test_bad_index_reported(backend):
    plan = plan_for(SystemShape(3, 2), 0)
    off, diag = _inputs(plan, random_mixed(SystemShape(3, 2), 0))
    diag = diag.copy()
    diag[plan.p_u[2]] = -1e-3
    assert kernels.get_backend(backend).plan_sums(off, diag, plan.p_u, plan.p_v, plan.d_pos, 1e-12)[3] >= 0


def test_pure_python_env_selects_fallback():
    env = dict(os.environ, GMEDIM_PURE_PYTHON="1")
    res = subprocess.run([sys.executable, "-c", "import gmedim.kernels as k; print(k.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert res.stdout.strip() == "python"
