"""NumPy reference implementations of the hot kernels.

These mirror wpcnrelay._kernels (the compiled extension) operation for
operation: same enumeration order, same golden-section bookkeeping, same
random-stream consumption.  They are the import-time fallback when the
extension is unavailable and the ground truth the extension is tested
against.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "numpy"

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_LN2 = math.log(2.0)
_CHUNK_ROWS = 400_000


def _compositions(max_sum: int, k: int) -> np.ndarray:
    """All k-tuples of nonnegative ints with sum <= max_sum, lex ascending."""
    pts = np.arange(max_sum + 1, dtype=np.int32).reshape(-1, 1)
    for _ in range(k - 1):
        sums = pts.sum(axis=1)
        blocks = []
        for v in range(max_sum + 1):
            tail = pts[sums <= max_sum - v]
            head = np.full((tail.shape[0], 1), v, dtype=np.int32)
            blocks.append(np.hstack([head, tail]))
        pts = np.vstack(blocks)
    return pts


def _persp(t: np.ndarray, x: np.ndarray, rho: float) -> np.ndarray:
    """Vectorized t*log2(1+rho*x/t) with the t=0 (and x=0) extension."""
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    safe_t = np.where(t > 0.0, t, 1.0)
    arg = np.where((t > 0.0) & (x > 0.0), rho * x / safe_t, 0.0)
    return t * np.log1p(arg) / _LN2


def grid_search(
    rho12: float,
    rho13: float,
    rho2: float,
    a1: float,
    a2: float,
    c_rb: float,
    delta: float,
    max_steps: int,
    scheme_id: int,
    n_golden: int,
):
    """Best point of the time-simplex grid with an inner energy-split search.

    scheme_id: 0 = all five phases free, 1 = backscatter phase pinned to
    zero, 2 = backscatter and relay phases pinned to zero (and WD1's rate
    is the direct link alone).  Returns
    (best_value, best_steps[5], best_tau41, n_points).
    """
    free = {0: (0, 1, 2, 3, 4), 1: (0, 2, 3, 4), 2: (0, 2, 4)}[scheme_id]
    pts_free = _compositions(max_steps, len(free))
    n_points = pts_free.shape[0]
    steps = np.zeros((n_points, 5), dtype=np.int32)
    steps[:, list(free)] = pts_free

    best_val = -1.0
    best_row = np.zeros(5, dtype=np.int32)
    best_tau = 0.0
    for lo_row in range(0, n_points, _CHUNK_ROWS):
        chunk = steps[lo_row:lo_row + _CHUNK_ROWS]
        t1 = chunk[:, 0] * delta
        t2 = chunk[:, 1] * delta
        t3 = chunk[:, 2] * delta
        t41 = chunk[:, 3] * delta
        t42 = chunk[:, 4] * delta
        e = a1 * t1 + a2 * t2
        r13 = _persp(t3, t1, rho13)
        if scheme_id == 2:
            side_a = np.full(t1.shape, np.inf)
        else:
            side_a = c_rb * t2 + _persp(t3, t1, rho12)

        def inner(tau):
            return np.minimum(
                side_a,
                np.minimum(
                    r13 + _persp(t41, tau, rho2),
                    _persp(t42, e - tau, rho2),
                ),
            )

        if scheme_id == 2:
            tau_best = np.zeros_like(e)
            val = inner(tau_best)
        else:
            # golden-section maximization of the unimodal inner objective,
            # one fresh evaluation per iteration
            a = np.zeros_like(e)
            b = e.copy()
            c = b - _INVPHI * (b - a)
            d = a + _INVPHI * (b - a)
            fc = inner(c)
            fd = inner(d)
            for _ in range(n_golden):
                left = fc > fd          # max inside [a, d]
                b = np.where(left, d, b)
                a = np.where(left, a, c)
                width = b - a
                c_new = np.where(left, b - _INVPHI * width, d)
                d_new = np.where(left, c, a + _INVPHI * width)
                f_probe = inner(np.where(left, c_new, d_new))
                fc, fd = (
                    np.where(left, f_probe, fd),
                    np.where(left, fc, f_probe),
                )
                c, d = c_new, d_new
            # candidates: bracket midpoint, then both endpoints
            tau_best = 0.5 * (a + b)
            val = inner(tau_best)
            for tau_cand in (np.zeros_like(e), e):
                v_cand = inner(tau_cand)
                take = v_cand > val
                val = np.where(take, v_cand, val)
                tau_best = np.where(take, tau_cand, tau_best)

        k = int(np.argmax(val))
        if val[k] > best_val:
            best_val = float(val[k])
            best_row = chunk[k].copy()
            best_tau = float(tau_best[k])
    return best_val, tuple(int(v) for v in best_row), best_tau, n_points


def detector_chunk(
    bitgen,
    nbits: int,
    nsamp: int,
    a_carrier: float,
    a_refl: float,
    noise_std: float,
    threshold: float,
) -> int:
    """Simulate nbits backscattered bits through the energy detector.

    Per bit: an equiprobable 0/1, a uniform reflected-path phase, and nsamp
    complex samples of the detector branch.  The known beacon contribution
    a_carrier is synthesized and then cancelled before the energy statistic
    is accumulated.  Returns the number of bit errors.

    Stream contract (shared with the compiled kernel): nbits uniforms for
    the bits, nbits uniforms for the phases, then nbits*2*nsamp standard
    normals in bit-major order.
    """
    g = np.random.Generator(bitgen)
    u_bits = g.random(nbits)
    phases = g.random(nbits) * (2.0 * math.pi)
    noise = g.standard_normal((nbits, 2 * nsamp)) * noise_std
    bits = (u_bits < 0.5).astype(np.float64)
    sig_re = (bits * a_refl) * np.cos(phases)
    sig_im = (bits * a_refl) * np.sin(phases)
    y_re = (a_carrier + sig_re)[:, None] + noise[:, :nsamp]
    y_im = sig_im[:, None] + noise[:, nsamp:]
    z_re = y_re - a_carrier
    stat = np.einsum("ij,ij->i", z_re, z_re) + np.einsum("ij,ij->i", y_im, y_im)
    decided = (stat > threshold).astype(np.float64)
    return int(np.sum(decided != bits))
