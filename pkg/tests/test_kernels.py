import numpy as np
import pytest

from symdefect import kernels
from symdefect.constructions import mub_vectors, sic_vectors
from symdefect.core import unitary_from_vectors
from symdefect.defect import _index_maps, support_and_counts


def _args(U):
    N = U.N
    j, k = np.triu_indices(N, 1)
    cols = support_and_counts(U, 0).columns
    col, sgn = _index_maps(N, cols)
    return U.entries.astype(complex), j.astype(np.int64), k.astype(np.int64), col, sgn, len(cols)


@pytest.mark.parametrize("U", [unitary_from_vectors(sic_vectors(4)), unitary_from_vectors(mub_vectors(4, 3))], ids=["sic4", "mub4x3"])
def test_backends_agree(U):
    a = np.asarray(kernels.python_assemble_system(*_args(U)))
    b = np.asarray(kernels.assemble_system(*_args(U)))
    assert a.shape == b.shape
    assert np.abs(a - b).max() < 1e-14


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_non_unitary_input_is_accepted():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    j, k = np.triu_indices(5, 1)
    cols = np.stack([j, k], 1)
    col, sgn = _index_maps(5, cols)
    a = kernels.python_assemble_system(M, j.astype(np.int64), k.astype(np.int64), col, sgn, len(cols))
    b = kernels.assemble_system(M, j.astype(np.int64), k.astype(np.int64), col, sgn, len(cols))
    assert np.allclose(a, b, atol=1e-14)


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SYMDEFECT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import symdefect.kernels as k; print(k.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
