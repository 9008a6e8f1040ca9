"""Pure numpy projector kernels; same contract as the compiled ``_core``."""

import numpy as np


def _entire(w):
    w = np.maximum(w, 0.0)
    s = np.sqrt(w)
    small = s < 1e-4
    safe_s = np.where(small, 1.0, s)
    safe_w = np.where(small, 1.0, w)
    c = np.cos(s)
    sn = np.sin(safe_s)
    f1 = c * c
    f2 = np.where(small, 1.0 - 2.0 * w / 3.0 + 2.0 * w * w / 15.0, sn * np.cos(safe_s) / safe_s)
    f3 = np.where(small, (1.0 - w / 6.0 + w * w / 120.0) ** 2, sn * sn / safe_w)
    return f1, f2, f3


def projector_batch(bs):
    bs = np.asarray(bs, dtype=np.complex128)
    count, n, m = bs.shape
    out = np.empty((count, n + m, n + m), dtype=np.complex128)
    if count == 0:
        return out
    bh = np.conj(np.swapaxes(bs, -1, -2))
    w, v = np.linalg.eigh(bs @ bh)
    vh = np.conj(np.swapaxes(v, -1, -2))
    f1, f2, f3 = _entire(w)
    m1 = (v * f1[:, None, :]) @ vh
    m2 = (v * f2[:, None, :]) @ vh
    m3 = (v * f3[:, None, :]) @ vh
    top_right = -(m2 @ bs)
    out[:, :n, :n] = m1
    out[:, :n, n:] = top_right
    out[:, n:, :n] = np.conj(np.swapaxes(top_right, -1, -2))
    out[:, n:, n:] = bh @ m3 @ bs
    return out


def projector_jacobians(b, ts, rel_step=1e-5):
    b = np.asarray(b, dtype=np.complex128)
    ts = np.asarray(ts, dtype=np.float64).ravel()
    n, m = b.shape
    nm = n * m
    nn = n + m
    count = ts.size
    if count == 0:
        return np.empty((0, 2 * nn * nn, 2 * nm))
    base = ts[:, None] * b.ravel()[None, :]
    h = rel_step * np.maximum(1.0, np.linalg.norm(base, axis=1))
    shifts = np.concatenate([np.eye(nm), 1j * np.eye(nm)], axis=0)  # (2nm, nm)
    step = h[:, None, None] * shifts[None, :, :]
    plus = projector_batch((base[:, None, :] + step).reshape(-1, n, m))
    minus = projector_batch((base[:, None, :] - step).reshape(-1, n, m))
    diff = (plus - minus).reshape(count, 2 * nm, nn * nn) / (2 * h[:, None, None])
    jac = np.concatenate([diff.real, diff.imag], axis=2)
    return np.ascontiguousarray(np.swapaxes(jac, 1, 2))
