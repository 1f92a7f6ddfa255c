"""SC derivatives as finite sets of (P, W) pairs, numeric estimates, 1D coderivatives.

Closed forms:

* smooth polynomial: ``{(1, f''(x))}``;
* piecewise-1d at a breakpoint b: a branch contributes its tangent
  ``(1, p''(b))`` when ``x* = p'(b)`` and (attentive mode) its value limit
  equals ``f(b)``; a nondegenerate interval of ``∂f(b)`` whose closure holds
  ``x*`` contributes the vertical ``(0, 1)``;
* quadratic plus polyhedron: one pair ``(P_S, P_S A P_S + I - P_S)`` per face
  F through x whose normal cone ``cone{G_i : i in I(F)}`` holds ``x* - Ax - b``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls
from scipy.spatial import cKDTree

from .catalog import (
    Piecewise1D,
    QuadPolyhedron,
    SmoothPoly,
    face_subspace,
    polyhedral_faces,
)
from .graph import PreconditionError, Window, check_anchor, sample_truncated_graph
from .subspace import (
    NotSelfAdjoint,
    PWPair,
    Subspace2n,
    dz_distance,
    projection_matrix,
    pw_from_subspace,
    subspace_from_pw,
)

SMOOTH_TOL = 1e-7
CLUSTER_TOL = 1e-4
PERSIST = 3
NUMERIC_RESOLUTION = {1: 41, 2: 61, 3: 21, 4: 11}


class NotSmooth(ValueError):
    """The sampled graph is not an n-dimensional subspace near the point."""


class InsufficientSamples(ValueError):
    """Too few graph samples near the point for a tangent fit."""


class Unsupported(ValueError):
    """The requested object is outside what is computed for this class."""


class PWSet:
    """Finite set of (P, W) pairs with provenance and anchor."""

    def __init__(self, pairs, provenance, anchor):
        uniq = []
        for p in pairs:
            if not any(p.close_to(q) for q in uniq):
                uniq.append(p)
        uniq.sort(key=lambda p: (-np.trace(p.P), tuple(np.diag(p.P)), tuple(p.W.ravel())))
        self.pairs = tuple(uniq)
        self.provenance = provenance
        x, v = anchor
        self.anchor = (tuple(np.atleast_1d(np.asarray(x, dtype=float)).tolist()),
                       tuple(np.atleast_1d(np.asarray(v, dtype=float)).tolist()))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def subspaces(self):
        return [subspace_from_pw(p) for p in self.pairs]

    def export_text(self):
        """Row-major decimal text, one block per pair, with provenance tags."""
        out = io.StringIO()
        out.write(f"# provenance {self.provenance}\n")
        out.write(f"# anchor x {list(self.anchor[0])} xstar {list(self.anchor[1])}\n")
        for k, p in enumerate(self.pairs):
            n = p.n
            out.write(f"pair {k} n {n} provenance {self.provenance}\n")
            out.write("P " + " ".join(repr(float(v)) for v in p.P.ravel()) + "\n")
            out.write("W " + " ".join(repr(float(v)) for v in p.W.ravel()) + "\n")
        return out.getvalue()

    @classmethod
    def parse_text(cls, text):
        prov, anchor, pairs = "unknown", ((), ()), []
        P = None
        for line in text.splitlines():
            if line.startswith("# provenance"):
                prov = line.split(None, 2)[2]
            elif line.startswith("# anchor"):
                body = line[len("# anchor x "):]
                xs, vs = body.split(" xstar ")
                anchor = (eval_list(xs), eval_list(vs))
            elif line.startswith("pair"):
                n = int(line.split()[3])
            elif line.startswith("P "):
                P = np.array([float(t) for t in line.split()[1:]]).reshape(n, n)
            elif line.startswith("W "):
                pairs.append(PWPair(P, np.array([float(t) for t in line.split()[1:]]).reshape(n, n)))
        return cls(pairs, prov, anchor)

    def __repr__(self):
        return f"PWSet({list(self.pairs)}, provenance={self.provenance!r})"


def eval_list(text):
    text = text.strip().strip("[]")
    return [float(t) for t in text.split(",") if t.strip()]


def hausdorff_dz(A, B):
    """d_Z-Hausdorff distance between two PWSets (or lists of subspaces)."""
    SA = A.subspaces() if isinstance(A, PWSet) else list(A)
    SB = B.subspaces() if isinstance(B, PWSet) else list(B)
    if not SA and not SB:
        return 0.0
    if not SA or not SB:
        return math.inf
    D = np.array([[dz_distance(a, b) for b in SB] for a in SA])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


# ---------------------------------------------------------------------------
# closed forms


def _pw1(p, w):
    return PWPair([[float(p)]], [[float(w)]])


def _piecewise_pairs(f, xbar, xstar, mode):
    from fractions import Fraction

    b = Fraction(float(xbar[0]))
    v = Fraction(float(xstar[0]))
    left, right = f.sides(b)
    if left is not None and right is not None and left.branch is right.branch:
        return [_pw1(1, left.curvature)]
    pairs = []
    for side in (left, right):
        if side is not None and (side.attentive or mode == "plain") and side.slope == v:
            pairs.append(_pw1(1, side.curvature))
    for lo, hi in f.subdifferential(float(b)).intervals():
        if lo < hi and lo <= float(v) <= hi:
            pairs.append(_pw1(0, 1))
    return pairs


def _polyhedral_pairs(f, xbar, xstar):
    active = f.active_set(xbar)
    vres = np.asarray(xstar, dtype=float) - f.gradient(xbar)
    pairs = []
    n = f.dim
    for I in polyhedral_faces(f, tuple(np.asarray(xbar, dtype=float)), active):
        if I:
            _, res = nnls(f.G[list(I)].T, vres)
        else:
            res = float(np.linalg.norm(vres))
        if res > 1e-9 * (1.0 + np.linalg.norm(vres)):
            continue
        S = face_subspace(f, I)
        P = S @ S.T
        pairs.append(PWPair(P, P @ f.A @ P + np.eye(n) - P))
    return pairs


def sc_derivative(f, xbar, xstar, mode="attentive"):
    """Closed-form f-attentive SC derivative at ``(xbar, xstar)`` as a PWSet."""
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    xstar = np.atleast_1d(np.asarray(xstar, dtype=float))
    check_anchor(f, xbar, xstar)
    if hasattr(f, "perturbation"):
        from .calculus import transform_pw

        q = f.perturbation
        base = sc_derivative(f.base, xbar, xstar - q.gradient(xbar), mode)
        out = transform_pw(base, q.H)
        return PWSet(out.pairs, "closed-form", (xbar, xstar))
    if isinstance(f, SmoothPoly):
        pairs = [_pw1(1, f.derivative(xbar[0], 2))]
    elif isinstance(f, Piecewise1D):
        pairs = _piecewise_pairs(f, xbar, xstar, mode)
    elif isinstance(f, QuadPolyhedron):
        pairs = _polyhedral_pairs(f, xbar, xstar)
    else:
        raise Unsupported(f"no closed form for {type(f).__name__}")
    return PWSet(pairs, "closed-form", (xbar, xstar))


# ---------------------------------------------------------------------------
# numeric estimation


def _opposite_coverage(D):
    """True when every neighbor direction has a roughly opposite neighbor."""
    norms = np.linalg.norm(D, axis=1)
    U = D[norms > 0] / norms[norms > 0, None]
    if U.shape[0] == 0:
        return False
    C = U @ U.T
    return bool(np.all(C.min(axis=1) <= -0.9))


def _fit(points, at, n, tree, radius):
    idx = tree.query_ball_point(at, radius)
    D = points[idx] - at[None, :]
    D = D[np.linalg.norm(D, axis=1) > 0]
    if D.shape[0] < 2 * n:
        raise InsufficientSamples(f"{D.shape[0] + 1} samples within radius {radius:g}")
    _, s, Vt = np.linalg.svd(D, full_matrices=False)
    if s.size > n and s[n] > SMOOTH_TOL * s[0]:
        raise NotSmooth(f"residual ratio {s[n] / s[0]:.3g}")
    if s[n - 1] <= 1e-6 * s[0]:
        raise NotSmooth("local dimension below n")
    if not _opposite_coverage(D):
        raise NotSmooth("one-sided neighborhood")
    return Subspace2n(Vt[:n].T)


def estimate_tangent(g, at, radius):
    """Least-squares n-dimensional tangent subspace of the sample ``g`` at ``at``.

    ``at`` is a GraphPoint or a 2n-vector (x, x*).
    """
    pts = g.stacked
    if hasattr(at, "xstar"):
        at = np.concatenate([np.atleast_1d(at.x), np.atleast_1d(at.xstar)])
    at = np.asarray(at, dtype=float)
    return _fit(pts, at, g.n, cKDTree(pts), radius)


def sc_derivative_numeric(g, xbar, xstar, r_min=1e-6, resolution=None, r0=None):
    """SC derivative estimated from tangent fits on shrinking annuli.

    The localization is resampled on windows of radius ``r_k = r0 2^-k`` down
    to ``r_min`` (same level ``rho`` and mode as ``g``).  Tangents fitted at
    sample points in the annulus ``r_k/4 <= |p - anchor| <= r_k/2`` (fit
    radius ``r_k/8``) are clustered by d_Z; a cluster qualifies when it is
    present in the last three annuli.  Its representative is the dominant
    n-dimensional eigenspace of the averaged projector on the last annulus.
    """
    f = g.f
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    xstar = np.atleast_1d(np.asarray(xstar, dtype=float))
    n = xbar.size
    resolution = resolution or NUMERIC_RESOLUTION.get(n, 11)
    anchor = np.concatenate([xbar, xstar])
    r = r0 if r0 is not None else min(g.window.u_radius, g.window.v_radius) / 2
    radii = []
    while r >= r_min:
        radii.append(r)
        r /= 2
    radii = radii[-(PERSIST + 6):] if len(radii) > PERSIST + 6 else radii
    history = []  # per annulus: list of (subspace, projector)
    for r in radii:
        win = Window(xbar, xstar, r, r, g.window.rho)
        h = sample_truncated_graph(f, win, resolution, g.mode)
        pts = h.stacked
        if pts.shape[0] == 0:
            history.append([])
            continue
        tree = cKDTree(pts)
        dist = np.linalg.norm(pts - anchor[None, :], axis=1)
        found = []
        for p in pts[(dist >= r / 4) & (dist <= r / 2)]:
            try:
                L = _fit(pts, p, n, tree, r / 8)
            except (NotSmooth, InsufficientSamples):
                continue
            Pi = projection_matrix(L)
            for cl in found:
                if np.abs(np.linalg.eigvalsh(cl[0] - Pi)).max() <= CLUSTER_TOL:
                    cl[1].append(Pi)
                    break
            else:
                found.append((Pi, [Pi]))
        history.append([np.mean(members, axis=0) for _, members in found])
    tail = history[-PERSIST:]
    pairs = []
    if len(tail) == PERSIST:
        for Pi in tail[-1]:
            persistent = all(
                any(np.abs(np.linalg.eigvalsh(Q - Pi)).max() <= CLUSTER_TOL for Q in level)
                for level in tail[:-1]
            )
            if not persistent:
                continue
            L = Subspace2n.from_projector(Pi, n)
            try:
                pairs.append(pw_from_subspace(L, tol=1e-6))
            except NotSelfAdjoint as exc:
                raise NotSelfAdjoint(f"numeric cluster is not self-adjoint: {exc}", L, exc.distance) from exc
    return PWSet(pairs, "numeric", (xbar, xstar))


# ---------------------------------------------------------------------------
# 1D attentive coderivative

TWO_PI = 2.0 * math.pi
ANG_TOL = 1e-12


def _norm_angle(a):
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    if abs(a - TWO_PI) < ANG_TOL:
        a = 0.0
    return a


def _arc(a, length):
    """Closed arc from angle ``a`` of the given length, split at 2*pi."""
    a = _norm_angle(a)
    b = a + length
    if b <= TWO_PI + ANG_TOL:
        return [(a, min(b, TWO_PI))]
    return [(a, TWO_PI), (0.0, b - TWO_PI)]


def _intersect(A, B):
    out = []
    for a0, a1 in A:
        for b0, b1 in B:
            lo, hi = max(a0, b0), min(a1, b1)
            if lo <= hi + ANG_TOL:
                out.append((lo, max(lo, hi)))
    return out


def _normalize_arcs(arcs):
    """Sort, fold 2*pi onto 0 for points, and merge overlapping arcs."""
    fixed = []
    for a, b in arcs:
        if b - a <= ANG_TOL and abs(a - TWO_PI) <= ANG_TOL:
            a = b = 0.0
        fixed.append((a, b))
    fixed.sort()
    merged = []
    for a, b in fixed:
        if merged and a <= merged[-1][1] + ANG_TOL:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _contains_angle(arcs, t, tol=1e-10):
    t = _norm_angle(t)
    for a, b in arcs:
        if a - tol <= t <= b + tol:
            return True
        if t <= tol and b >= TWO_PI - tol:
            return True
        if t >= TWO_PI - tol and a <= tol:
            return True
    return False


@dataclass(frozen=True)
class ConeDescription1D:
    """Exact cones in R^2 as finite unions of closed angular arcs.

    ``rays``: tangent rays of the localized graph at the anchor;
    ``normal_arcs``: the limiting normal cone N^f (angles of (w_x, w_x*));
    ``graph_arcs``: gph D*_f, angles of (z, z*) with (z*, -z) in N^f.
    """

    anchor: tuple
    rays: tuple
    normal_arcs: tuple
    graph_arcs: tuple

    def contains_normal(self, w):
        w = np.asarray(w, dtype=float)
        return bool(np.linalg.norm(w) == 0 or _contains_angle(self.normal_arcs, math.atan2(w[1], w[0])))

    def contains_pair(self, z, zs):
        if z == 0 and zs == 0:
            return True
        return _contains_angle(self.graph_arcs, math.atan2(zs, z))

    def contains_subspace(self, L):
        """Containment of a line ``L`` in gph D*_f, checked on ± its basis vector."""
        u = L.basis[:, 0]
        return self.contains_pair(u[0], u[1]) and self.contains_pair(-u[0], -u[1])


def _tangent_rays(f, xbar, xstar):
    from fractions import Fraction

    if hasattr(f, "perturbation"):
        q = f.perturbation
        H = float(np.asarray(q.H, dtype=float).reshape(1, 1)[0, 0])
        rays = _tangent_rays(f.base, xbar, xstar - float(q.gradient(np.array([xbar]))[0]))
        return [(rx, ry + H * rx) for rx, ry in rays]
    if isinstance(f, SmoothPoly):
        c = f.derivative(xbar, 2)
        return [(1.0, c), (-1.0, -c)]
    if not isinstance(f, Piecewise1D):
        raise Unsupported("coderivatives are computed for n = 1 catalog classes only")
    b = Fraction(float(xbar))
    v = Fraction(float(xstar))
    left, right = f.sides(b)
    if left is not None and right is not None and left.branch is right.branch:
        c = float(left.curvature)
        return [(1.0, c), (-1.0, -c)]
    rays = []
    if left is not None and left.attentive and left.slope == v:
        rays.append((-1.0, -float(left.curvature)))
    if right is not None and right.attentive and right.slope == v:
        rays.append((1.0, float(right.curvature)))
    for lo, hi in f.subdifferential(float(b)).intervals():
        if lo < hi and lo <= float(v) <= hi:
            if float(v) < hi:
                rays.append((0.0, 1.0))
            if float(v) > lo:
                rays.append((0.0, -1.0))
    return rays


def attentive_coderivative_1d(f, xbar, xstar, eps=0.25):
    """Limiting normal cone and coderivative graph of the attentive localization (n = 1).

    Near the anchor the localized graph is a finite union of smooth arcs
    leaving the anchor; each contributes its tangent ray.  N^f is the polar
    of the ray set (regular normals at the corner) together with the normal
    line of each ray (normals at nearby smooth points).
    """
    if f.dim != 1:
        raise Unsupported("attentive_coderivative_1d needs n = 1")
    del eps  # the cone is local; any eps > 0 gives the same answer
    xbar_f = float(np.atleast_1d(xbar)[0])
    xstar_f = float(np.atleast_1d(xstar)[0])
    check_anchor(f, [xbar_f], [xstar_f])
    rays = _tangent_rays(f, xbar_f, xstar_f)
    if not rays:
        raise Unsupported("empty tangent cone")
    polar = [(0.0, TWO_PI)]
    lines = []
    for rx, ry in rays:
        alpha = math.atan2(ry, rx)
        polar = _intersect(polar, _arc(alpha + math.pi / 2, math.pi))
        for t in (alpha + math.pi / 2, alpha - math.pi / 2):
            a = _norm_angle(t)
            lines.append((a, a))
    normal = _normalize_arcs(polar + lines)
    graph = []
    for a, b in normal:
        graph.extend(_arc(a + math.pi / 2, b - a))
    graph = _normalize_arcs(graph)
    return ConeDescription1D(
        (xbar_f, xstar_f), tuple(rays), tuple(normal), tuple(graph)
    )


__all__ = [
    "PWSet",
    "NotSmooth",
    "InsufficientSamples",
    "Unsupported",
    "PreconditionError",
    "ConeDescription1D",
    "hausdorff_dz",
    "sc_derivative",
    "estimate_tangent",
    "sc_derivative_numeric",
    "attentive_coderivative_1d",
]
