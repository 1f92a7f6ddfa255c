"""Pure numpy implementation of the pair kernels (fallback backend)."""
import numpy as np

_CHUNK = 2048


def monotone_pairs(X, XS, s):
    X = np.ascontiguousarray(X, dtype=float)
    XS = np.ascontiguousarray(XS, dtype=float)
    N = X.shape[0]
    norm_min = raw_min = np.inf
    ni = nj = ri = rj = -1
    cols = np.arange(N)
    for start in range(0, N, _CHUNK):
        stop = min(start + _CHUNK, N)
        D = X[None, :, :] - X[start:stop, None, :]
        dot = np.einsum("ijk,ijk->ij", XS[None, :, :] - XS[start:stop, None, :], D)
        dd = np.einsum("ijk,ijk->ij", D, D)
        upper = cols[None, :] > np.arange(start, stop)[:, None]
        raw = np.where(upper, dot - s * dd, np.inf)
        k = int(np.argmin(raw))
        if raw.flat[k] < raw_min:
            raw_min = float(raw.flat[k])
            ri, rj = start + k // N, k % N
        with np.errstate(divide="ignore", invalid="ignore"):
            norm = np.where(upper & (dd > 0.0), raw / dd, np.inf)
        k = int(np.argmin(norm))
        if norm.flat[k] < norm_min:
            norm_min = float(norm.flat[k])
            ni, nj = start + k // N, k % N
    return norm_min, ni, nj, raw_min, ri, rj


def growth_pairs(XP, FP, X, XS, F, s):
    XP = np.ascontiguousarray(XP, dtype=float)
    FP = np.asarray(FP, dtype=float)
    X = np.ascontiguousarray(X, dtype=float)
    XS = np.ascontiguousarray(XS, dtype=float)
    F = np.asarray(F, dtype=float)
    N = X.shape[0]
    norm_min = raw_min = np.inf
    np_ = ng = rp = rg = -1
    for start in range(0, XP.shape[0], _CHUNK):
        stop = min(start + _CHUNK, XP.shape[0])
        fp = FP[start:stop]
        ok = np.isfinite(fp)
        D = XP[start:stop, None, :] - X[None, :, :]
        lin = np.einsum("jk,ijk->ij", XS, D)
        dd = np.einsum("ijk,ijk->ij", D, D)
        with np.errstate(invalid="ignore"):
            raw = fp[:, None] - F[None, :] - lin - 0.5 * s * dd
        raw = np.where(ok[:, None], raw, np.inf)
        if raw.size == 0:
            continue
        k = int(np.argmin(raw))
        if raw.flat[k] < raw_min:
            raw_min = float(raw.flat[k])
            rp, rg = start + k // N, k % N
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            norm = np.where(ok[:, None] & (dd > 0.0), raw / dd, np.inf)
        k = int(np.argmin(norm))
        if norm.flat[k] < norm_min:
            norm_min = float(norm.flat[k])
            np_, ng = start + k // N, k % N
    return norm_min, np_, ng, raw_min, rp, rg


def affine_max(XP, X, XS, F):
    XP = np.ascontiguousarray(XP, dtype=float)
    X = np.ascontiguousarray(X, dtype=float)
    XS = np.ascontiguousarray(XS, dtype=float)
    F = np.asarray(F, dtype=float)
    out = np.full(XP.shape[0], -np.inf)
    if X.shape[0] == 0:
        return out
    offset = F - np.einsum("jk,jk->j", XS, X)
    for start in range(0, XP.shape[0], _CHUNK):
        stop = min(start + _CHUNK, XP.shape[0])
        vals = XP[start:stop] @ XS.T + offset[None, :]
        out[start:stop] = vals.max(axis=1)
    return out
