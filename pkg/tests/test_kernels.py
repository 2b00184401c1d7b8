"""The compiled kernels and their Python fallbacks must agree."""

from itertools import combinations

import numpy as np
import pytest

from kcswitch import _pykernels, kernels

try:
    from kcswitch import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
ids = [b.__name__.rsplit(".", 1)[-1] for b in BACKENDS]


def test_compiled_backend_selected_when_built():
    if _ckernels is None:
        pytest.skip("extension not built")
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", BACKENDS, ids=ids)
@pytest.mark.parametrize("text,code", [("사랑", 1), ("love", 2), ("아파트APT", 3), ("12!", 0),
                                       ("ᄀ", 1), ("ㅏ", 1), ("é", 2), ("×", 0), ("", 0)])
def test_script_code(impl, text, code):
    assert impl.script_code(text) == code


@pytest.mark.parametrize("impl", BACKENDS, ids=ids)
def test_rank_sum_counts(impl):
    ranks = np.arange(1, 9, dtype=np.int_)
    for observed in (10, 18, 26):
        sums = [sum(c) for c in combinations(range(1, 9), 4)]
        expected = (sum(s <= observed for s in sums), sum(s >= observed for s in sums), len(sums))
        assert impl.rank_sum_tail_counts(ranks, 4, observed) == expected


@pytest.mark.parametrize("impl", BACKENDS, ids=ids)
def test_jacobi(impl):
    rng = np.random.default_rng(3)
    A = rng.normal(size=(9, 9))
    A = A @ A.T
    values, vectors, sweeps = impl.jacobi_eigh(A)
    assert sweeps > 0
    assert np.allclose(np.sort(values), np.linalg.eigvalsh(A), atol=1e-10)
    assert np.allclose(vectors.T @ vectors, np.eye(9), atol=1e-12)
    assert np.allclose(A @ vectors, vectors * values, atol=1e-9)


@pytest.mark.skipif(_ckernels is None, reason="extension not built")
def test_backends_agree_exactly():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(15, 15))
    A = A + A.T
    c_vals, c_vecs, c_sw = _ckernels.jacobi_eigh(A)
    p_vals, p_vecs, p_sw = _pykernels.jacobi_eigh(A)
    assert c_sw == p_sw
    assert np.allclose(c_vals, p_vals, atol=1e-12)
    assert np.allclose(c_vecs, p_vecs, atol=1e-10)


def test_diagonal_matrix_needs_no_sweeps():
    for impl in BACKENDS:
        values, vectors, sweeps = impl.jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
        assert sweeps == 0
        assert list(values) == [3.0, 1.0, 2.0]


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, KCSWITCH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from kcswitch import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
