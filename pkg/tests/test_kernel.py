import os
import subprocess
import sys

import numpy as np
import pytest

from surfport import kernel
from surfport.coset import compile_program, coupling
from surfport.lattice import build_layout


def _inputs(d, shots, seed=0):
    prog = compile_program(build_layout(d), "X")
    rng = np.random.default_rng(seed)
    errs = (rng.random((shots, d * d)) < 0.1).astype(np.int8)
    eta = np.ascontiguousarray(1 - 2 * errs)
    return prog, eta


@pytest.mark.skipif(kernel.contract_batch_compiled is None, reason="compiled kernel not built")
@pytest.mark.parametrize("d", [2, 3, 5, 9, 13])
def test_backends_agree(d):
    prog, eta = _inputs(d, 64)
    a = np.asarray(kernel.contract_batch_compiled(prog.ops, eta, coupling(0.08), prog.width))
    b = np.asarray(kernel.contract_batch_python(prog.ops, eta, coupling(0.08), prog.width))
    assert np.allclose(a, b, rtol=1e-13, atol=1e-12)


def test_large_distance_is_finite():
    prog, eta = _inputs(21, 8)
    out = np.asarray(kernel.contract_batch(prog.ops, eta, coupling(0.01), prog.width))
    assert np.all(np.isfinite(out))


def test_env_forces_python():
    code = "from surfport import kernel; print(kernel.BACKEND)"
    env = dict(os.environ, SURFPORT_KERNEL="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
