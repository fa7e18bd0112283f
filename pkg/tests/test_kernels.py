"""Backend equivalence: the compiled and numpy kernels must agree."""

from __future__ import annotations

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from slc_lab import _pykernels, kernels


def batch_spd(seed: int, batch: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((batch, n, n)))
    lam = np.exp(rng.uniform(-3.0, 3.0, (batch, n)))
    return np.einsum("bij,bj,bkj->bik", q, lam, q)


@pytest.mark.parametrize("n", range(2, 9))
def test_numpy_eigh_matches_lapack(n):
    A = batch_spd(n, 200, n)
    vals, vecs = _pykernels.jacobi_eigh(A)
    assert np.allclose(vals, np.linalg.eigvalsh(A), rtol=1e-12, atol=1e-12)
    rebuilt = np.einsum("bij,bj,bkj->bik", vecs, vals, vecs)
    assert np.allclose(rebuilt, A, atol=1e-10)


@pytest.mark.parametrize("n", range(2, 9))
def test_numpy_r_theta_round_trip(n):
    vals = np.sort(np.exp(np.random.default_rng(n).uniform(-4, 4, (500, n))), axis=1)
    theta = np.random.default_rng(n + 10).uniform((n - 1) * math.pi / 2, n * math.pi / 2, 500)
    r = _pykernels.r_theta(vals, theta)
    assert np.max(np.abs(_pykernels.sl_r(vals, r) - theta)) < 1e-12


def compiled():
    mods = kernels.backends()
    if "cython" not in mods:
        pytest.skip("compiled extension not built")
    return mods["cython"]


@pytest.mark.parametrize("n", range(2, 9))
def test_backends_agree(n):
    C = compiled()
    A = batch_spd(100 + n, 500, n)
    va, _ = _pykernels.jacobi_eigh(A)
    vb, _ = C.jacobi_eigh(A)
    assert np.max(np.abs(va - vb) / np.abs(va)) < 1e-12
    theta = np.random.default_rng(n).uniform((n - 1) * math.pi / 2, n * math.pi / 2, 500)
    assert np.allclose(C.sl_r(va, 1.7), _pykernels.sl_r(va, 1.7), rtol=0, atol=1e-13)
    ra, rb = _pykernels.r_theta(va, theta), C.r_theta(va, theta)
    # the root is only defined to a few ulps of SL_r; compare the roots
    # relatively and both residuals absolutely
    assert np.max(np.abs(ra - rb) / ra) < 1e-10
    assert np.max(np.abs(_pykernels.sl_r(va, rb) - theta)) < 1e-12


def test_pure_environment_switch():
    code = "from slc_lab import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, SLC_LAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_dispatch_matches_selected_backend():
    A = batch_spd(0, 10, 3)
    vals, _ = kernels.jacobi_eigh(A)
    assert np.allclose(vals, np.linalg.eigvalsh(A), rtol=1e-12)
    assert kernels.BACKEND in kernels.backends()
