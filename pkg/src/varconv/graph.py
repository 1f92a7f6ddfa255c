"""Finite samples of truncated subgradient graphs and their localizations.

A sample is built on the nested grid ``xbar + r * k / M`` (open ball of
radius r), with breakpoints and polyhedral face points inserted, and
representative subgradients drawn from ``subdifferential(f, x)`` inside the
dual ball.  Points are sorted by x then x* so that every sample is canonical.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import (
    DomainError,
    Piecewise1D,
    QuadPolyhedron,
    box_grid,
    face_subspace,
    polyhedral_faces,
    subdifferential,
)

DEFAULT_RESOLUTION = {1: 201, 2: 41, 3: 17, 4: 9}
MODES = ("attentive", "plain")


class PreconditionError(ValueError):
    """x̄* is not a subgradient of f at x̄ (or another input precondition fails)."""


def default_resolution(n):
    return DEFAULT_RESOLUTION.get(n, 9)


@dataclass(frozen=True)
class GraphPoint:
    x: np.ndarray
    xstar: np.ndarray
    fval: float


@dataclass(frozen=True)
class Window:
    """Ball U around ``xbar`` (radius ``u_radius``), ball V around ``vbar``, level ``rho``."""

    xbar: tuple
    vbar: tuple
    u_radius: float
    v_radius: float
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "xbar", tuple(float(v) for v in np.atleast_1d(self.xbar)))
        object.__setattr__(self, "vbar", tuple(float(v) for v in np.atleast_1d(self.vbar)))
        if len(self.xbar) != len(self.vbar):
            raise ValueError("xbar and vbar differ in dimension")
        if not (self.u_radius > 0 and self.v_radius > 0):
            raise ValueError("window radii must be positive")

    @property
    def n(self):
        return len(self.xbar)

    def shrink(self, factor, fbar):
        """Window with radii and ``rho - f(xbar)`` scaled by ``factor``."""
        gap = self.rho - fbar
        return Window(self.xbar, self.vbar, self.u_radius * factor, self.v_radius * factor,
                      fbar + gap * factor if math.isfinite(gap) else self.rho)


@dataclass
class TruncatedGraph:
    """Arrays ``X`` (N, n), ``XS`` (N, n), ``F`` (N,) plus the sampling context."""

    f: object
    window: Window
    mode: str
    resolution: int
    X: np.ndarray
    XS: np.ndarray
    F: np.ndarray
    extremal: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.X.shape[0]

    @property
    def n(self):
        return self.window.n

    @property
    def points(self):
        return [GraphPoint(x, v, float(fv)) for x, v, fv in zip(self.X, self.XS, self.F)]

    @property
    def stacked(self):
        """(N, 2n) array of graph points (x, x*)."""
        return np.hstack([self.X, self.XS])

    def export_text(self, stream=None):
        """Whitespace-separated table: x_1..x_n, xstar_1..xstar_n, f."""
        out = stream if stream is not None else io.StringIO()
        n = self.n
        cols = [f"x_{i + 1}" for i in range(n)] + [f"xstar_{i + 1}" for i in range(n)] + ["f"]
        out.write("# " + " ".join(cols) + "\n")
        for row in np.hstack([self.X, self.XS, self.F[:, None]]):
            out.write(" ".join(repr(float(v)) for v in row) + "\n")
        if stream is None:
            return out.getvalue()
        return None


def _x_candidates(f, window, resolution):
    xbar = np.array(window.xbar)
    r = window.u_radius
    X = box_grid(xbar, r, resolution)
    extra = []
    if isinstance(f, Piecewise1D) or hasattr(f, "breakpoints"):
        for b in f.breakpoints():
            if abs(float(b) - xbar[0]) < r and window.n == 1:
                extra.append([float(b)])
    if isinstance(_core(f), QuadPolyhedron):
        extra.extend(_face_points(_core(f), X, xbar))
    if extra:
        X = np.vstack([X, np.array(extra, dtype=float).reshape(-1, window.n)])
    keep = np.linalg.norm(X - xbar[None, :], axis=1) < r
    X = np.unique(X[keep], axis=0)
    return X


def _core(f):
    while hasattr(f, "base"):
        f = f.base
    return f


def _face_points(f, X, xbar):
    """Project grid points onto the affine hulls of the faces through ``xbar``."""
    try:
        active = f.active_set(xbar)
    except DomainError:
        return []
    pts = []
    for I in polyhedral_faces(f, tuple(xbar), active):
        if not I:
            continue
        S = face_subspace(f, I)
        proj = xbar[None, :] + (X - xbar[None, :]) @ S @ S.T
        ok = np.all(proj @ f.G.T - f.h[None, :] <= 1e-12 * (1 + np.abs(f.h))[None, :], axis=1)
        pts.extend(proj[ok].tolist())
    return pts


def sample_truncated_graph(f, window, resolution=None, mode="attentive"):
    """Sample of ``gph ∂f`` in ``U x V``; attentive mode keeps only ``f(x) < rho``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n = window.n
    if n != f.dim:
        raise ValueError("window and function dimensions differ")
    resolution = resolution or default_resolution(n)
    X = _x_candidates(f, window, resolution)
    F = f.evaluate_many(X)
    keep = np.isfinite(F)
    if mode == "attentive":
        keep &= F < window.rho
    X, F = X[keep], F[keep]
    vbar = np.array(window.vbar)
    xs_rows, x_rows, f_rows, ext_rows = [], [], [], []
    for x, fx in zip(X, F):
        pts, ext = f.subdifferential(x).sample(vbar, window.v_radius)
        if pts.shape[0] == 0:
            continue
        xs_rows.append(pts)
        x_rows.append(np.repeat(x[None, :], pts.shape[0], axis=0))
        f_rows.append(np.full(pts.shape[0], fx))
        ext_rows.append(ext)
    if xs_rows:
        GX, GXS = np.vstack(x_rows), np.vstack(xs_rows)
        GF, GE = np.concatenate(f_rows), np.concatenate(ext_rows)
        order = np.lexsort(np.hstack([GX, GXS]).T[::-1])
        GX, GXS, GF, GE = GX[order], GXS[order], GF[order], GE[order]
    else:
        GX = GXS = np.zeros((0, n))
        GF, GE = np.zeros(0), np.zeros(0, dtype=bool)
    return TruncatedGraph(f, window, mode, resolution, GX, GXS, GF, GE)


def check_anchor(f, xbar, xstar):
    """Raise PreconditionError unless ``xstar`` is in ``∂f(xbar)``."""
    try:
        sub = subdifferential(f, xbar)
    except DomainError as exc:
        raise PreconditionError(str(exc)) from exc
    if not sub.contains(xstar):
        raise PreconditionError(
            f"{np.atleast_1d(xstar).tolist()} is not a subgradient at {np.atleast_1d(xbar).tolist()}: {sub!r}"
        )
    return sub


def localization(f, xbar, xstar, eps, mode="attentive", resolution=None, v_radius=None):
    """Sample of the ε-localization of ``∂f`` at ``(xbar, xstar)``.

    ``v_radius`` defaults to ``eps``; attentive mode truncates at ``f(xbar) + eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    check_anchor(f, xbar, xstar)
    fbar = f.evaluate(xbar)
    win = Window(xbar, xstar, eps, v_radius if v_radius is not None else eps, fbar + eps)
    return sample_truncated_graph(f, win, resolution, mode)


def _nearest_subgradient(f, x, v):
    sub = f.subdifferential(x)
    if sub.dim == 1:
        best = None
        for lo, hi in sub.intervals():
            c = min(max(v[0], lo), hi)
            if best is None or abs(c - v[0]) < abs(best - v[0]):
                best = c
        return None if best is None else np.array([best])
    from scipy.optimize import nnls

    best, dist = None, math.inf
    for piece in sub.pieces:
        base = piece.vertices[0]
        if piece.rays.shape[0]:
            lam, _ = nnls(piece.rays.T, v - base)
            cand = base + lam @ piece.rays
        else:
            cand = base
        d = np.linalg.norm(cand - v)
        if d < dist:
            best, dist = cand, d
    return best


def closedness_probe(g, f=None, levels=24, tol=1e-6):
    """Check that graph sequences approaching sampled points have graph limits.

    For every distinct sampled x and every signed axis direction e, the
    sequence ``x + h e / 2^j`` (h the grid spacing) is followed while it stays
    in the sampled set (window and, in attentive mode, ``f < rho``); the
    subgradient nearest to the sampled x* is tracked.  The probe records the
    f-value Cauchy gap between the last two levels, the gap between the limit
    value and ``f(x)``, and the distance of the limiting subgradient to
    ``∂f(x)``.
    """
    f = f if f is not None else g.f
    win = g.window
    n = win.n
    xbar, vbar = np.array(win.xbar), np.array(win.vbar)
    M = max(1, (g.resolution - 1) // 2)
    h = win.u_radius / M
    steps = h * 2.0 ** -np.arange(levels)
    flagged = []
    max_cauchy = max_fgap = max_subdist = 0.0
    checked = 0
    seen = {}
    for x, v in zip(g.X, g.XS):
        seen.setdefault(tuple(x), []).append(v)
    for key, vs in seen.items():
        x = np.array(key)
        fx = f.evaluate(x)
        for axis in range(n):
            for sign in (1.0, -1.0):
                e = np.zeros(n)
                e[axis] = sign
                seq = x[None, :] + steps[:, None] * e[None, :]
                fs = f.evaluate_many(seq)
                inside = np.isfinite(fs) & (np.linalg.norm(seq - xbar, axis=1) < win.u_radius)
                if g.mode == "attentive":
                    inside &= fs < win.rho
                if not inside[-2:].all():
                    continue
                cauchy = abs(fs[-1] - fs[-2])
                for v in (vs[0], vs[-1]):
                    vl = _nearest_subgradient(f, seq[-1], v)
                    if vl is None or np.linalg.norm(vl - vbar) >= win.v_radius:
                        continue
                    checked += 1
                    fgap = abs(fs[-1] - fx)
                    subdist = f.subdifferential(x).distance(vl)
                    max_cauchy = max(max_cauchy, cauchy)
                    max_fgap = max(max_fgap, fgap)
                    max_subdist = max(max_subdist, subdist)
                    if cauchy > tol or fgap > tol or subdist > tol:
                        flagged.append(
                            {
                                "limit_x": x.tolist(),
                                "limit_xstar": vl.tolist(),
                                "direction": e.tolist(),
                                "limit_fval": float(fs[-1]),
                                "f_at_limit": float(fx),
                                "subgradient_distance": float(subdist),
                            }
                        )
    return {
        "passed": not flagged,
        "sequences_checked": checked,
        "max_cauchy_gap": max_cauchy,
        "max_fval_deviation": max_fgap,
        "max_subgradient_distance": max_subdist,
        "flagged": flagged,
    }
