"""Quadratic perturbations of catalog functions and their second-order objects."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .catalog import (
    MAX_DEGREE,
    Branch,
    CatalogError,
    FunctionSpec,
    Piecewise1D,
    QuadPolyhedron,
    SmoothPoly,
    SubgradientSet,
    as_fraction,
)
from .scderiv import PWSet
from .subspace import PWPair, Subspace2n


def _frac_matrix(M, n):
    M = np.asarray(M, dtype=object).reshape(n, n)
    out = tuple(tuple(as_fraction(v) for v in row) for row in M)
    for i in range(n):
        for j in range(n):
            if out[i][j] != out[j][i]:
                raise CatalogError("H must be symmetric")
    return out


@dataclass(frozen=True)
class QuadraticPerturbation:
    """``g(x) = c + <b, x> + x'Hx / 2`` with exact rational entries."""

    H: tuple
    b: tuple
    c: Fraction

    def __init__(self, H, b=None, c=0):
        H = np.atleast_2d(np.asarray(H, dtype=object))
        n = H.shape[0]
        object.__setattr__(self, "H", _frac_matrix(H, n))
        b = [0] * n if b is None else list(np.atleast_1d(np.asarray(b, dtype=object)).ravel())
        if len(b) != n:
            raise CatalogError("b has the wrong size")
        object.__setattr__(self, "b", tuple(as_fraction(v) for v in b))
        object.__setattr__(self, "c", as_fraction(c))

    @classmethod
    def shift(cls, n, t=0, tilt=None, anchor=None):
        """``g(x) = <y*, x> + (t/2)|x - anchor|^2``."""
        t = as_fraction(t)
        y = [as_fraction(v) for v in (tilt if tilt is not None else [0] * n)]
        a = [as_fraction(v) for v in (anchor if anchor is not None else [0] * n)]
        H = [[t if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        b = [y[i] - t * a[i] for i in range(n)]
        c = t / 2 * sum(ai * ai for ai in a)
        return cls(H, b, c)

    @classmethod
    def from_dict(cls, d):
        if "H" in d:
            return cls(d["H"], d.get("b"), d.get("c", 0))
        n = int(d.get("n", 1))
        return cls.shift(n, d.get("t", 0), d.get("tilt"), d.get("anchor"))

    def to_dict(self):
        return {"H": [[str(v) for v in row] for row in self.H],
                "b": [str(v) for v in self.b], "c": str(self.c)}

    @property
    def n(self):
        return len(self.b)

    @property
    def H_float(self):
        return np.array(self.H, dtype=float)

    @property
    def b_float(self):
        return np.array(self.b, dtype=float)

    def value(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return float(self.c) + self.b_float @ x + 0.5 * x @ self.H_float @ x

    def gradient(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.H_float @ x + self.b_float

    def block_matrix(self):
        """``[[I, 0], [H, I]]`` acting on (u, u*)."""
        n = self.n
        return np.block([[np.eye(n), np.zeros((n, n))], [self.H_float, np.eye(n)]])


class Shifted(FunctionSpec):
    """``f + g`` kept in unmerged form (the ``shifted`` file kind)."""

    kind = "shifted"

    def __init__(self, base, perturbation):
        if base.dim != perturbation.n:
            raise CatalogError("dimension mismatch between function and perturbation")
        self.base = base
        self.perturbation = perturbation
        self.dim = base.dim

    def __eq__(self, other):
        return isinstance(other, Shifted) and self.base == other.base and self.perturbation == other.perturbation

    def __hash__(self):
        return hash((self.base, self.perturbation))

    def breakpoints(self):
        return self.base.breakpoints()

    def evaluate(self, x):
        v = self.base.evaluate(x)
        return v if not math.isfinite(v) else v + self.perturbation.value(x)

    def evaluate_many(self, X):
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        q = self.perturbation
        g = float(q.c) + X @ q.b_float + 0.5 * np.einsum("ij,jk,ik->i", X, q.H_float, X)
        return self.base.evaluate_many(X) + g

    def subdifferential(self, x):
        return shift_set(self.base.subdifferential(x), self.perturbation.gradient(x))

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "perturbation": self.perturbation.to_dict()}


def shift_set(S, v):
    """Translate a SubgradientSet by the vector ``v``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if S.dim == 1:
        return SubgradientSet.from_intervals([(lo + v[0], hi + v[0]) for lo, hi in S.intervals()])
    from .catalog import Piece

    return SubgradientSet(S.dim, [Piece(p.vertices + v[None, :], p.rays) for p in S.pieces])


def _merge(coeffs, q):
    add = [q.c, q.b[0], q.H[0][0] / 2]
    out = list(coeffs) + [Fraction(0)] * max(0, 3 - len(coeffs))
    for k, a in enumerate(add):
        out[k] += a
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    if len(out) - 1 > MAX_DEGREE:
        raise CatalogError("degree overflow")
    return tuple(out)


def add_quadratic(f, q):
    """Exact catalog member ``f + g`` with merged coefficients."""
    if f.dim != q.n:
        raise CatalogError("dimension mismatch between function and perturbation")
    if isinstance(f, SmoothPoly):
        return SmoothPoly(_merge(f.coeffs, q))
    if isinstance(f, Piecewise1D):
        return Piecewise1D(
            [Branch(br.lo, br.hi, br.lo_closed, br.hi_closed, _merge(br.coeffs, q)) for br in f.branches]
        )
    if isinstance(f, QuadPolyhedron):
        return QuadPolyhedron(f.A + q.H_float, f.b + q.b_float, f.c + float(q.c), f.G, f.h)
    if isinstance(f, Shifted):
        p = f.perturbation
        H = [[p.H[i][j] + q.H[i][j] for j in range(q.n)] for i in range(q.n)]
        merged = QuadraticPerturbation(H, [p.b[i] + q.b[i] for i in range(q.n)], p.c + q.c)
        return add_quadratic(f.base, merged)
    raise CatalogError(f"cannot perturb {type(f).__name__}")


def _as_H(H, n=None):
    if isinstance(H, QuadraticPerturbation):
        return H.H_float
    H = np.atleast_2d(np.asarray(H, dtype=float))
    if n is not None and H.shape == (1, 1) and n > 1:
        H = H[0, 0] * np.eye(n)
    return H


def transform_pw(pwset, H):
    """``{(P, PHP + W)}`` for every pair; ``H`` a matrix, scalar or perturbation."""
    pairs = []
    for p in pwset:
        Hm = _as_H(H, p.n)
        pairs.append(PWPair(p.P, p.P @ Hm @ p.P + p.W))
    anchor = pwset.anchor
    if isinstance(H, QuadraticPerturbation):
        x = np.array(anchor[0])
        anchor = (anchor[0], tuple((np.array(anchor[1]) + H.gradient(x)).tolist()))
    return PWSet(pairs, pwset.provenance, anchor)


def transform_subspaces(subspaces, H):
    """Apply ``[[I, 0], [H, I]]`` to each subspace and re-orthonormalize."""
    out = []
    for L in subspaces:
        Hm = _as_H(H, L.n)
        n = L.n
        A = np.block([[np.eye(n), np.zeros((n, n))], [Hm, np.eye(n)]])
        out.append(Subspace2n.span(A @ L.basis))
    return out
