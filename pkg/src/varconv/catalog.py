"""Catalog of test functions with exact evaluation and limiting subdifferentials.

Three concrete classes are supported:

* ``SmoothPoly``      -- a univariate polynomial,
* ``Piecewise1D``     -- a lower semicontinuous function assembled from
  polynomial branches on adjacent intervals (``+inf`` outside their union),
* ``QuadPolyhedron``  -- ``0.5 x'Ax + b'x + c`` plus the indicator of a
  polyhedron ``{x : Gx <= h}``.

Breakpoint logic of ``Piecewise1D`` is carried out in exact rational
arithmetic (``fractions.Fraction``) so that continuity, lower semicontinuity
and the f-attentive admissibility of one-sided limits are decided exactly.
"""
from __future__ import annotations

import ast
import functools
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import linprog, nnls

MAX_DEGREE = 6
MAX_DIM = 4
FAN_SAMPLES = 35  # endpoints plus 33 interior points


class CatalogError(ValueError):
    """Invalid function description or unknown catalog name."""


class DomainError(ValueError):
    """The point lies outside the effective domain of the function."""


def as_fraction(value):
    """Convert ints, floats, Fractions and strings like ``"1/3"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise CatalogError(f"not a number: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise CatalogError(f"coefficient must be finite, got {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise CatalogError(f"cannot parse number {value!r}") from exc
    raise CatalogError(f"not a number: {value!r}")


def as_endpoint(value):
    """Interval endpoint: an exact Fraction or +-inf (as float)."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "-inf"):
        return -math.inf if value.strip().startswith("-") else math.inf
    if isinstance(value, float) and math.isinf(value):
        return value
    return as_fraction(value)


def _poly_exact(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (Fraction(0),)


def _poly_float(coeffs_f, x):
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(coeffs_f):
        acc = acc * x + c
    return acc


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# subgradient sets


@dataclass(frozen=True)
class Piece:
    """``conv(vertices) + cone(rays)``; vertices (p, n), rays (k, n)."""

    vertices: np.ndarray
    rays: np.ndarray

    def interval(self):
        """For n = 1: the piece as a closed interval ``(lo, hi)``."""
        lo = float(self.vertices[:, 0].min())
        hi = float(self.vertices[:, 0].max())
        for r in self.rays[:, 0]:
            if r > 0:
                hi = math.inf
            elif r < 0:
                lo = -math.inf
        return lo, hi


class SubgradientSet:
    """Finite union of pieces ``conv(V) + cone(R)`` in R^n (exact description)."""

    def __init__(self, dim, pieces=()):
        self.dim = dim
        self.pieces = tuple(pieces)

    @classmethod
    def from_intervals(cls, intervals):
        pieces = []
        for lo, hi in _merge_intervals(intervals):
            if math.isinf(lo) and math.isinf(hi):
                pieces.append(Piece(np.zeros((1, 1)), np.array([[1.0], [-1.0]])))
            elif math.isinf(hi):
                pieces.append(Piece(np.array([[lo]]), np.array([[1.0]])))
            elif math.isinf(lo):
                pieces.append(Piece(np.array([[hi]]), np.array([[-1.0]])))
            else:
                verts = [[lo]] if lo == hi else [[lo], [hi]]
                pieces.append(Piece(np.array(verts, dtype=float), np.zeros((0, 1))))
        return cls(1, pieces)

    @classmethod
    def cone(cls, base, rays):
        base = np.atleast_1d(np.asarray(base, dtype=float))
        rays = np.asarray(rays, dtype=float).reshape(-1, base.size)
        return cls(base.size, [Piece(base[None, :], rays)])

    def is_empty(self):
        return not self.pieces

    def intervals(self):
        if self.dim != 1:
            raise ValueError("intervals() is only defined for n = 1")
        return [p.interval() for p in self.pieces]

    def contains(self, v, tol=1e-9):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.size != self.dim:
            return False
        scale = tol * (1.0 + float(np.abs(v).max(initial=0.0)))
        if self.dim == 1:
            return any(lo - scale <= v[0] <= hi + scale for lo, hi in self.intervals())
        return any(_piece_contains(p, v, scale) for p in self.pieces)

    def distance(self, v):
        """Euclidean distance from ``v`` to the set (exact for n = 1)."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if self.is_empty():
            return math.inf
        if self.dim == 1:
            return min(max(lo - v[0], 0.0, v[0] - hi) for lo, hi in self.intervals())
        return min(_piece_distance(p, v) for p in self.pieces)

    def sample(self, center, radius, count=FAN_SAMPLES):
        """Deterministic sample of the set inside the open ball B(center, radius).

        Returns ``(points, extremal)`` where ``extremal`` marks piece endpoints
        (n = 1) or cone edge points (n > 1).
        """
        center = np.atleast_1d(np.asarray(center, dtype=float))
        pts, ext = [], []
        for piece in self.pieces:
            if self.dim == 1:
                p, e = _sample_interval(piece.interval(), center[0], radius, count)
            else:
                p, e = _sample_cone(piece, center, radius, count)
            pts.append(p)
            ext.append(e)
        if not pts:
            return np.zeros((0, self.dim)), np.zeros(0, dtype=bool)
        return np.vstack(pts), np.concatenate(ext)

    def __repr__(self):
        if self.dim == 1:
            return f"SubgradientSet({self.intervals()})"
        desc = [(p.vertices.tolist(), p.rays.tolist()) for p in self.pieces]
        return f"SubgradientSet(dim={self.dim}, pieces={desc})"


def _merge_intervals(intervals):
    ivs = sorted((float(lo), float(hi)) for lo, hi in intervals if lo <= hi)
    merged = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _piece_contains(piece, v, tol):
    return _piece_distance(piece, v) <= tol


def _piece_distance(piece, v):
    if piece.vertices.shape[0] != 1:
        # general conv + cone: feasibility LP on the residual box
        return _lp_distance(piece, v)
    r = v - piece.vertices[0]
    if piece.rays.shape[0] == 0:
        return float(np.linalg.norm(r))
    _, res = nnls(piece.rays.T, r)
    return float(res)


def _lp_distance(piece, v):
    V, R = piece.vertices, piece.rays
    p, k, n = V.shape[0], R.shape[0], V.shape[1]
    # variables: mu (p), lam (k), t (n), slack bound e; minimize e with |res| <= e
    nv = p + k + 1
    c = np.zeros(nv)
    c[-1] = 1.0
    M = np.hstack([V.T, R.T])
    A_ub = np.vstack([np.hstack([M, -np.ones((n, 1))]), np.hstack([-M, -np.ones((n, 1))])])
    b_ub = np.concatenate([v, -v])
    A_eq = np.zeros((1, nv))
    A_eq[0, :p] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * nv)
    return float(res.fun) * math.sqrt(n) if res.success else math.inf


def _sample_interval(iv, c, radius, count):
    lo, hi = iv
    a, b = max(lo, c - radius), min(hi, c + radius)
    if a > b:
        return np.zeros((0, 1)), np.zeros(0, dtype=bool)
    pts = np.array([a]) if a == b else np.linspace(a, b, count)
    keep = np.abs(pts - c) < radius
    pts = pts[keep]
    ext = (pts == lo) | (pts == hi)
    return pts[:, None], ext


def _sample_cone(piece, center, radius, count):
    """Grid in the multiplier box of ``base + sum lam_i g_i`` meeting the ball."""
    base = piece.vertices[0]
    if piece.vertices.shape[0] != 1:
        raise NotImplementedError("sampling of multi-vertex pieces in n > 1")
    G = piece.rays
    if G.shape[0] == 0:
        ok = bool(np.linalg.norm(base - center) < radius)
        return (base[None, :] if ok else np.zeros((0, base.size))), np.array([True] * int(ok))
    G = G / np.linalg.norm(G, axis=1)[:, None]
    _, s, Vt = np.linalg.svd(G, full_matrices=False)
    G = G[: max(1, int(np.sum(s > 1e-10 * s[0])))] if s.size > 1 and s[-1] <= 1e-10 * s[0] else G
    k = G.shape[0]
    pinv = np.linalg.pinv(G.T)  # k x n
    mid = pinv @ (center - base)
    half = radius * np.linalg.norm(pinv, axis=1)
    lo = np.maximum(mid - half, 0.0)
    hi = mid + half
    if np.any(hi < lo):
        return np.zeros((0, base.size)), np.zeros(0, dtype=bool)
    q = count if k <= 2 else max(3, int(round(1500 ** (1.0 / k))))
    axes = [np.linspace(a, b, q) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    lam = np.array(list(itertools.product(*axes)))
    pts = base[None, :] + lam @ G
    keep = np.linalg.norm(pts - center[None, :], axis=1) < radius
    ext = (np.count_nonzero(lam > 0, axis=1) <= 1)[keep]
    return pts[keep], ext


# ---------------------------------------------------------------------------
# function classes


class FunctionSpec:
    """Base class of catalog members."""

    kind = "abstract"
    dim = 1

    def evaluate(self, x):
        raise NotImplementedError

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        return np.array([self.evaluate(x) for x in X])

    def subdifferential(self, x):
        raise NotImplementedError

    def breakpoints(self):
        return []

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({json.dumps(self.to_dict())})"


@dataclass(frozen=True, repr=False)
class SmoothPoly(FunctionSpec):
    """Univariate polynomial with ascending coefficients."""

    coeffs: tuple
    kind = "smooth-poly"
    dim = 1

    def __post_init__(self):
        coeffs = _trim(as_fraction(c) for c in self.coeffs)
        if len(coeffs) - 1 > MAX_DEGREE:
            raise CatalogError(f"polynomial degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", coeffs)

    def evaluate(self, x):
        x = float(np.atleast_1d(x)[0])
        return float(_poly_exact(self.coeffs, Fraction(x)))

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float).reshape(-1)
        return _poly_float([float(c) for c in self.coeffs], X)

    def derivative(self, x, order=1):
        c = self.coeffs
        for _ in range(order):
            c = _poly_deriv(c)
        return float(_poly_exact(c, Fraction(float(x))))

    def subdifferential(self, x):
        d = self.derivative(np.atleast_1d(x)[0])
        return SubgradientSet.from_intervals([(d, d)])

    def to_dict(self):
        return {"kind": self.kind, "coeffs": [str(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Branch:
    """Polynomial on an interval; the closed flags decide who owns endpoint values."""

    lo: object
    hi: object
    lo_closed: bool
    hi_closed: bool
    coeffs: tuple

    def __post_init__(self):
        lo, hi = as_endpoint(self.lo), as_endpoint(self.hi)
        if not lo < hi:
            raise CatalogError(f"branch needs lo < hi, got [{lo}, {hi}]")
        if (self.lo_closed and math.isinf(lo)) or (self.hi_closed and math.isinf(hi)):
            raise CatalogError("an infinite endpoint cannot be closed")
        coeffs = _trim(as_fraction(c) for c in self.coeffs)
        if len(coeffs) - 1 > MAX_DEGREE:
            raise CatalogError(f"polynomial degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "coeffs", coeffs)

    def contains(self, x):
        above = self.lo < x or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def value(self, x):
        return _poly_exact(self.coeffs, x)

    def deriv(self, x, order=1):
        c = self.coeffs
        for _ in range(order):
            c = _poly_deriv(c)
        return _poly_exact(c, x)

    def to_dict(self):
        def ep(v):
            return str(v) if not isinstance(v, float) else ("inf" if v > 0 else "-inf")

        return {
            "lo": ep(self.lo),
            "hi": ep(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
            "coeffs": [str(c) for c in self.coeffs],
        }


@dataclass(frozen=True)
class Side:
    """One-sided data of a piecewise function at a breakpoint."""

    branch: Branch
    attentive: bool  # one-sided value limit equals f(b)
    slope: Fraction
    curvature: Fraction


class Piecewise1D(FunctionSpec):
    """Lower semicontinuous univariate function from polynomial branches."""

    kind = "piecewise-1d"
    dim = 1

    def __init__(self, branches):
        branches = sorted(branches, key=lambda br: br.lo)
        if not branches:
            raise CatalogError("piecewise-1d needs at least one branch")
        for left, right in zip(branches, branches[1:]):
            if left.hi != right.lo:
                raise CatalogError(f"branches must be adjacent: gap or overlap at {left.hi} / {right.lo}")
            if left.hi_closed and right.lo_closed:
                raise CatalogError(f"ambiguous ownership of the value at {left.hi}")
            if not (left.hi_closed or right.lo_closed):
                raise CatalogError(f"no branch owns the value at {left.hi}")
            b = left.hi
            owner, other = (left, right) if left.hi_closed else (right, left)
            if owner.value(b) > other.value(b):
                raise CatalogError(f"not lower semicontinuous at {b}: f(b)={owner.value(b)} > {other.value(b)}")
        first, last = branches[0], branches[-1]
        if (not math.isinf(first.lo) and not first.lo_closed) or (not math.isinf(last.hi) and not last.hi_closed):
            raise CatalogError("finite domain ends must be closed (lower semicontinuity)")
        self.branches = tuple(branches)
        self._fcoeffs = [[float(c) for c in br.coeffs] for br in branches]

    def __eq__(self, other):
        return isinstance(other, Piecewise1D) and self.branches == other.branches

    def __hash__(self):
        return hash(self.branches)

    def breakpoints(self):
        pts = {br.lo for br in self.branches} | {br.hi for br in self.branches}
        return sorted(p for p in pts if not isinstance(p, float))

    def branch_at(self, x):
        for br in self.branches:
            if br.contains(x):
                return br
        return None

    def evaluate(self, x):
        x = float(np.atleast_1d(x)[0])
        br = self.branch_at(x)
        if br is None:
            return math.inf
        return float(br.value(Fraction(x)))

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float).reshape(-1)
        out = np.full(X.shape, np.inf)
        for br, fc in zip(self.branches, self._fcoeffs):
            above = (X > br.lo) | ((X == br.lo) if br.lo_closed else False)
            below = (X < br.hi) | ((X == br.hi) if br.hi_closed else False)
            mask = above & below
            out[mask] = _poly_float(fc, X[mask])
        return out

    def sides(self, b):
        """One-sided data ``(left, right)`` at ``b`` (``None`` where f is +inf)."""
        b = Fraction(b) if not isinstance(b, Fraction) else b
        owner = self.branch_at(b)
        if owner is None:
            raise DomainError(f"{float(b)} is outside the domain")
        fb = owner.value(b)
        left = right = None
        for br in self.branches:
            if br.hi == b or (br.lo < b < br.hi):
                left = Side(br, br.value(b) == fb, br.deriv(b), br.deriv(b, 2))
            if br.lo == b or (br.lo < b < br.hi):
                right = Side(br, br.value(b) == fb, br.deriv(b), br.deriv(b, 2))
        return left, right

    def subdifferential(self, x):
        x = Fraction(float(np.atleast_1d(x)[0]))
        left, right = self.sides(x)
        if left is not None and right is not None and left.branch is right.branch:
            d = float(left.slope)
            return SubgradientSet.from_intervals([(d, d)])
        lo = float(left.slope) if left is not None and left.attentive else -math.inf
        hi = float(right.slope) if right is not None and right.attentive else math.inf
        ivs = [(lo, hi)] if lo <= hi else []
        for side in (left, right):
            if side is not None and side.attentive:
                ivs.append((float(side.slope), float(side.slope)))
        return SubgradientSet.from_intervals(ivs)

    def to_dict(self):
        return {"kind": self.kind, "branches": [br.to_dict() for br in self.branches]}


class QuadPolyhedron(FunctionSpec):
    """``0.5 x'Ax + b'x + c`` plus the indicator of ``{x : Gx <= h}``."""

    kind = "quad-plus-polyhedron"
    feas_tol = 1e-12

    def __init__(self, A, b=None, c=0.0, G=None, h=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise CatalogError("A must be square")
        if not np.array_equal(A, A.T):
            raise CatalogError("A must be symmetric")
        if n > MAX_DIM:
            raise CatalogError(f"dimension {n} exceeds {MAX_DIM}")
        b = np.zeros(n) if b is None else np.asarray(b, dtype=float).reshape(n)
        G = np.zeros((0, n)) if G is None else np.asarray(G, dtype=float).reshape(-1, n)
        h = np.zeros(G.shape[0]) if h is None else np.asarray(h, dtype=float).reshape(-1)
        if h.shape[0] != G.shape[0]:
            raise CatalogError("G and h have inconsistent sizes")
        if G.shape[0] > 8:
            raise CatalogError("at most 8 polyhedral constraints are supported")
        if np.any(np.linalg.norm(G, axis=1) == 0):
            raise CatalogError("constraint rows must be nonzero")
        self.A, self.b, self.c, self.G, self.h = A, b, float(c), G, h
        self.dim = n
        for arr in (self.A, self.b, self.G, self.h):
            arr.setflags(write=False)

    def __eq__(self, other):
        return (
            isinstance(other, QuadPolyhedron)
            and all(np.array_equal(u, v) for u, v in zip(self._arrays(), other._arrays()))
            and self.c == other.c
        )

    def __hash__(self):
        return hash(tuple(a.tobytes() for a in self._arrays()) + (self.c,))

    def _arrays(self):
        return (self.A, self.b, self.G, self.h)

    def _slack(self, X):
        return X @ self.G.T - self.h[None, :]

    def _tol(self):
        return self.feas_tol * (1.0 + np.abs(self.h))

    def active_set(self, x):
        x = np.asarray(x, dtype=float).reshape(self.dim)
        slack = self.G @ x - self.h
        if np.any(slack > self._tol()):
            raise DomainError(f"{x.tolist()} is outside the polyhedron")
        return tuple(int(i) for i in np.flatnonzero(np.abs(slack) <= self._tol()))

    def evaluate(self, x):
        return float(self.evaluate_many(np.asarray(x, dtype=float).reshape(1, self.dim))[0])

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        vals = 0.5 * np.einsum("ij,jk,ik->i", X, self.A, X) + X @ self.b + self.c
        if self.G.shape[0]:
            bad = np.any(self._slack(X) > self._tol()[None, :], axis=1)
            vals = np.where(bad, np.inf, vals)
        return vals

    def gradient(self, x):
        return self.A @ np.asarray(x, dtype=float).reshape(self.dim) + self.b

    def subdifferential(self, x):
        act = self.active_set(x)
        return SubgradientSet.cone(self.gradient(x), self.G[list(act)])

    def to_dict(self):
        return {
            "kind": self.kind,
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "c": self.c,
            "G": self.G.tolist(),
            "h": self.h.tolist(),
        }


@functools.lru_cache(maxsize=256)
def polyhedral_faces(f, xbar_key, active):
    """Faces of ``{Gx <= h}`` containing ``xbar`` whose active sets lie in ``active``.

    Each candidate index set J (a subset of the active set at ``xbar``) fixes
    the face ``{x in C : G_J x = h_J}``; its closure index set adds the
    implicit equalities, found by one LP per remaining active constraint.
    Returns the distinct closure index sets, sorted.
    """
    xbar = np.array(xbar_key, dtype=float)
    G, h = f.G, f.h
    bounds = [(xi - 1.0, xi + 1.0) for xi in xbar]
    seen = set()
    for k in range(len(active) + 1):
        for J in itertools.combinations(active, k):
            implicit = set(J)
            for i in active:
                if i in implicit:
                    continue
                res = linprog(
                    G[i],
                    A_ub=G if G.shape[0] else None,
                    b_ub=h if G.shape[0] else None,
                    A_eq=G[list(J)] if J else None,
                    b_eq=h[list(J)] if J else None,
                    bounds=bounds,
                    method="highs",
                )
                if res.status != 0 or res.fun >= h[i] - 1e-9 * (1.0 + abs(h[i])):
                    implicit.add(i)
            seen.add(tuple(sorted(implicit)))
    return tuple(sorted(seen, key=lambda I: (len(I), I)))


def face_subspace(f, I):
    """Orthonormal basis (n x d) of the directions ``null(G_I)`` of a face."""
    n = f.dim
    if not I:
        return np.eye(n)
    GI = f.G[list(I)]
    _, s, Vt = np.linalg.svd(GI)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    return Vt[rank:].T


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(f, x):
    """f(x), ``+inf`` outside the domain."""
    return f.evaluate(x)


def subdifferential(f, x):
    """Exact limiting subdifferential of ``f`` at ``x`` (raises DomainError off dom f)."""
    if not math.isfinite(f.evaluate(x)):
        raise DomainError(f"{np.atleast_1d(x).tolist()} is outside dom f")
    return f.subdifferential(x)


@dataclass
class ProbeResult:
    passed: bool
    margin: float
    level_minima: list = field(default_factory=list)


def regular_subgradient_probe(f, xbar, xstar, radius=1.0, grid=201, levels=12, tol=1e-6):
    """Check ``liminf (f(x)-f(xbar)-<x*, x-xbar>)/|x-xbar| >= 0`` on shrinking grids.

    The margin is the minimizing ratio on the finest level; the verdict passes
    when that ratio is at least ``-tol``.
    """
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    xstar = np.atleast_1d(np.asarray(xstar, dtype=float))
    fbar = f.evaluate(xbar)
    if not math.isfinite(fbar):
        raise DomainError("xbar is outside dom f")
    minima = []
    for k in range(levels + 1):
        X = box_grid(xbar, radius * 2.0**-k, grid)
        d = np.linalg.norm(X - xbar, axis=1)
        X, d = X[d > 0], d[d > 0]
        with np.errstate(invalid="ignore"):
            ratio = (f.evaluate_many(X) - fbar - (X - xbar) @ xstar) / d
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        minima.append(float(ratio.min()) if ratio.size else math.inf)
    return ProbeResult(minima[-1] >= -tol, minima[-1], minima)


def box_grid(center, radius, resolution):
    """Grid ``center + radius * k/M`` for ``k = -M..M`` per axis (``M = (res-1)/2``).

    The center is hit exactly and doubling ``M`` nests the grids.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    M = max(1, (int(resolution) - 1) // 2)
    axis = np.arange(-M, M + 1) / M
    if center.size == 1:
        return (center[0] + radius * axis)[:, None]
    mesh = np.meshgrid(*([axis] * center.size), indexing="ij")
    return center[None, :] + radius * np.stack([m.ravel() for m in mesh], axis=1)


# ---------------------------------------------------------------------------
# builtins and the text format

CATALOG = {
    "f1_neg_quartic": "f(x) = -x^4 (varco 0 at (0,0), not variationally convex)",
    "f2_zero": "f(x) = 0 (varco 0 at (0,0), variationally convex)",
    "abs": "f(x) = |x|",
    "indicator_halfline": "indicator of [0, inf)",
    "flagship_jump": "0 for x <= 0, 1 - x for x > 0 (not subdifferentially continuous at 0)",
    "quad(a)": "f(x) = a x^2 / 2",
    "orthant_quad(A)": "0.5 x'Ax + indicator of the nonnegative orthant; A given as diagonal or matrix",
}

# documented anchor points (x, x*) used by the acceptance suite and `varconv catalog`
ANCHORS = {
    "f1_neg_quartic": [([0.0], [0.0])],
    "f2_zero": [([0.0], [0.0])],
    "abs": [([0.0], [0.0]), ([0.0], [0.5]), ([0.0], [1.0]), ([1.0], [1.0])],
    "indicator_halfline": [([0.0], [0.0]), ([0.0], [-0.5]), ([1.0], [0.0])],
    "flagship_jump": [([0.0], [0.0]), ([0.0], [0.5]), ([-0.5], [0.0])],
    "quad(0.5)": [([0.0], [0.0]), ([1.0], [0.5])],
    "quad(1)": [([0.0], [0.0])],
    "quad(2)": [([0.0], [0.0]), ([1.0], [2.0])],
    "quad(-1)": [([0.0], [0.0])],
    "orthant_quad(2,3)": [([0.0, 0.0], [0.0, 0.0]), ([0.0, 1.0], [-1.0, 3.0]), ([0.0, 1.0], [0.0, 3.0])],
}


def _pw(*branches):
    return Piecewise1D([Branch(*br) for br in branches])


def builtin(name):
    """Return the catalog member called ``name`` (see ``CATALOG``)."""
    m = re.fullmatch(r"\s*([a-z0-9_]+)\s*(?:\((.*)\))?\s*", name)
    if not m:
        raise CatalogError(f"unknown catalog entry {name!r}")
    base, argstr = m.group(1), m.group(2)
    args = ()
    if argstr is not None and argstr.strip():
        try:
            args = ast.literal_eval("(" + argstr + ",)")
        except (ValueError, SyntaxError) as exc:
            raise CatalogError(f"cannot parse arguments of {name!r}") from exc
    inf = math.inf
    if base == "f1_neg_quartic" and not args:
        return SmoothPoly((0, 0, 0, 0, -1))
    if base == "f2_zero" and not args:
        return SmoothPoly((0,))
    if base == "abs" and not args:
        return _pw((-inf, 0, False, True, (0, -1)), (0, inf, False, False, (0, 1)))
    if base == "indicator_halfline" and not args:
        return _pw((0, inf, True, False, (0,)))
    if base == "flagship_jump" and not args:
        return _pw((-inf, 0, False, True, (0,)), (0, inf, False, False, (1, -1)))
    if base == "quad" and len(args) == 1:
        return SmoothPoly((0, 0, as_fraction(str(args[0])) / 2))
    if base == "orthant_quad" and args:
        if len(args) == 1 and isinstance(args[0], (list, tuple)) and isinstance(args[0][0], (list, tuple)):
            A = np.array(args[0], dtype=float)
        else:
            A = np.diag(np.array(args, dtype=float))
        n = A.shape[0]
        return QuadPolyhedron(A, G=-np.eye(n), h=np.zeros(n))
    raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")


def load_spec(obj):
    """Build a FunctionSpec from a dict, a JSON string, or a path to a JSON file."""
    if isinstance(obj, Path) or (isinstance(obj, str) and not obj.lstrip().startswith("{")):
        obj = json.loads(Path(obj).read_text())
    elif isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise CatalogError("function spec must be a JSON object")
    if "builtin" in obj:
        return builtin(obj["builtin"])
    kind = obj.get("kind")
    try:
        if kind == "smooth-poly":
            return SmoothPoly(tuple(obj["coeffs"]))
        if kind == "piecewise-1d":
            return Piecewise1D(
                [
                    Branch(br["lo"], br["hi"], bool(br.get("lo_closed", False)),
                           bool(br.get("hi_closed", False)), tuple(br["coeffs"]))
                    for br in obj["branches"]
                ]
            )
        if kind == "quad-plus-polyhedron":
            return QuadPolyhedron(_float_array(obj["A"]), _float_array(obj.get("b")),
                                  float(as_fraction(obj.get("c", 0))),
                                  _float_array(obj.get("G")), _float_array(obj.get("h")))
        if kind == "shifted":
            from .calculus import QuadraticPerturbation, Shifted

            return Shifted(load_spec(obj["base"]), QuadraticPerturbation.from_dict(obj["perturbation"]))
    except KeyError as exc:
        raise CatalogError(f"missing field {exc.args[0]!r} for kind {kind!r}") from exc
    raise CatalogError(f"unknown function kind {kind!r}")


def _float_array(a):
    if a is None:
        return None

    def conv(v):
        if isinstance(v, (list, tuple)):
            return [conv(u) for u in v]
        return float(as_fraction(v))

    return np.array(conv(a), dtype=float)


def dump_spec(f):
    """Inverse of ``load_spec`` for concrete specs."""
    return f.to_dict()
