import os
import subprocess
import sys

import numpy as np
import pytest

from wildarc import _pykernels, kernels

try:
    from wildarc import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def test_backend_switch():
    code = "import wildarc.kernels as k; print(k.BACKEND)"
    env = {**os.environ, "WILDARC_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("python", "cython")


@needs_ext
def test_rhs_and_flow_agree(rng):
    z = rng.uniform(-3, 3, size=(5000, 3))
    assert np.max(np.abs(_ckernels.cherry_rhs_batch(z) - _pykernels.cherry_rhs_batch(z))) <= 1e-14
    for sign in (1.0, -1.0):
        a = _ckernels.flow_batch(z, sign, 128)
        b = _pykernels.flow_batch(z, sign, 128)
        assert np.max(np.abs(a - b)) <= 1e-12


@needs_ext
def test_expand_ranges_agree(rng):
    side = 16
    lo = rng.integers(0, side, size=(300, 3))
    hi = np.minimum(lo + rng.integers(0, 4, size=(300, 3)), side - 1)
    src = np.arange(300)
    a = _ckernels.expand_ranges(src, lo, hi, side)
    b = _pykernels.expand_ranges(src, lo, hi, side)
    ka = np.sort(a[0] * side ** 3 + a[1])
    kb = np.sort(b[0] * side ** 3 + b[1])
    assert np.array_equal(ka, kb)
    assert len(ka) == int(np.prod(hi - lo + 1, axis=1).sum())


@needs_ext
def test_strong_components_agree(rng):
    n = 2000
    src = rng.integers(0, n, size=6000)
    dst = np.clip(src + rng.integers(-5, 6, size=6000), 0, n - 1)
    key = np.unique(src * n + dst)
    s, d = key // n, key % n
    indptr = np.concatenate([[0], np.cumsum(np.bincount(s, minlength=n))]).astype(np.int64)
    a = _ckernels.strong_components(n, indptr, d.astype(np.int64))
    b = _pykernels.strong_components(n, indptr, d.astype(np.int64))
    assert np.array_equal(a, b)
