"""Algebra on n-dimensional subspaces of R^n x R^n and their (P, W) pairs.

A subspace is stored through a 2n x n matrix with orthonormal columns; the
first n rows are the primal block, the last n rows the dual block.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXIOM_TOL = 1e-10
ORTHO_TOL = 1e-12


class NotSelfAdjoint(ValueError):
    """The subspace differs from its adjoint, so no (P, W) pair exists."""

    def __init__(self, msg, subspace=None, distance=None):
        super().__init__(msg)
        self.subspace = subspace
        self.distance = distance


class AxiomError(ValueError):
    """A (P, W) pair violates the projector or identity axioms."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics


def _orthonormal(M, n):
    M = np.asarray(M, dtype=float)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size < n or s[n - 1] <= 1e-12 * max(1.0, s[0]):
        raise ValueError(f"spanning matrix has rank < {n}")
    return U[:, :n]


class Subspace2n:
    """An n-dimensional subspace L of R^{2n} with an orthonormal basis."""

    __slots__ = ("basis", "n")

    def __init__(self, basis):
        basis = np.atleast_2d(np.asarray(basis, dtype=float))
        if basis.shape[0] != 2 * basis.shape[1]:
            raise ValueError(f"basis must be 2n x n, got {basis.shape}")
        n = basis.shape[1]
        if np.abs(basis.T @ basis - np.eye(n)).max() > ORTHO_TOL:
            basis = _orthonormal(basis, n)
        self.basis = basis
        self.n = n

    @classmethod
    def span(cls, vectors):
        """Subspace spanned by the columns of a 2n x k matrix (rank n)."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        n = vectors.shape[0] // 2
        return cls(_orthonormal(vectors, n))

    @classmethod
    def graph(cls, B):
        """Graph ``{(u, Bu)}`` of a linear map."""
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return cls.span(np.vstack([np.eye(B.shape[0]), B]))

    @classmethod
    def vertical(cls, n):
        """``{0} x R^n``."""
        return cls(np.vstack([np.zeros((n, n)), np.eye(n)]))

    @classmethod
    def from_projector(cls, Pi, n):
        w, V = np.linalg.eigh((Pi + Pi.T) / 2)
        return cls(V[:, np.argsort(w)[::-1][:n]])

    def projection(self):
        return projection_matrix(self)

    def __repr__(self):
        return f"Subspace2n(n={self.n}, basis={np.round(self.basis, 12).tolist()})"


def projection_matrix(L):
    """Orthogonal projector ``B B'`` onto L."""
    P = L.basis @ L.basis.T
    return (P + P.T) / 2


def dz_distance(L1, L2):
    """Spectral norm of the difference of the two orthogonal projectors."""
    if L1.n != L2.n:
        raise ValueError("subspaces live in different spaces")
    D = projection_matrix(L1) - projection_matrix(L2)
    return float(np.abs(np.linalg.eigvalsh(D)).max())


def adjoint(L):
    """``L* = {(v*, u*) : (u*, -v*) in L^perp}``."""
    n = L.n
    Pi = projection_matrix(L)
    w, V = np.linalg.eigh(np.eye(2 * n) - Pi)
    N = V[:, np.argsort(w)[::-1][:n]]  # orthonormal basis of L^perp
    N1, N2 = N[:n], N[n:]
    return Subspace2n(np.vstack([-N2, N1]))


@dataclass(frozen=True, eq=False)
class PWPair:
    """Symmetric pair (P, W) with P a projector and W(I-P) = I-P."""

    P: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        if P.shape != W.shape or P.shape[0] != P.shape[1]:
            raise ValueError("P and W must be square of equal size")
        # symmetric by storage: keep the upper triangle only
        P = np.triu(P) + np.triu(P, 1).T
        W = np.triu(W) + np.triu(W, 1).T
        P.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "W", W)

    @property
    def n(self):
        return self.P.shape[0]

    def close_to(self, other, tol=1e-12):
        return (
            self.n == other.n
            and np.abs(self.P - other.P).max() <= tol
            and np.abs(self.W - other.W).max() <= tol
        )

    def __repr__(self):
        if self.n == 1:
            return f"PWPair({self.P[0, 0]:.12g}, {self.W[0, 0]:.12g})"
        return f"PWPair(P={self.P.tolist()}, W={self.W.tolist()})"


def check_pw_axioms(P, W):
    """Residuals of the projector axioms and the derived identities.

    Residuals are max-abs entries, divided by ``max(1, max |entry|)``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n = P.shape[0]
    if P.shape != (n, n) or W.shape != (n, n):
        raise ValueError("P and W must be square of equal size")
    I = np.eye(n)
    scale = max(1.0, float(np.abs(P).max(initial=0.0)), float(np.abs(W).max(initial=0.0)))

    def r(M):
        return float(np.abs(M).max(initial=0.0)) / scale

    res = {
        "idempotent": r(P @ P - P),
        "identity_on_kernel": r(W @ (I - P) - (I - P)),
        "symmetric_P": r(P - P.T),
        "symmetric_W": r(W - W.T),
        "PW_eq_WP": r(P @ W - W @ P),
        "PW_eq_PWP": r(P @ W - P @ W @ P),
        "W_eq_PWP_plus_kernel": r(W - (P @ W @ P + I - P)),
    }
    return {"passed": all(v <= AXIOM_TOL for v in res.values()), "residuals": res}


def subspace_from_pw(pw):
    """``rge(P, W) = {(Pp, Wp) : p in R^n}`` with an orthonormal basis."""
    diag = check_pw_axioms(pw.P, pw.W)
    if not diag["passed"]:
        raise AxiomError("pair violates the (P, W) axioms", diag)
    M = np.vstack([pw.P, pw.W])
    s = np.linalg.svd(M, compute_uv=False)
    assert s[-1] > 1e-12 * max(1.0, s[0]), "rank of (P; W) below n"
    return Subspace2n.span(M)


def pw_from_subspace(L, tol=1e-8):
    """Unique (P, W) with ``L = rge(P, W)``; raises NotSelfAdjoint if L != L*.

    P projects onto the primal image X of the basis and W = P Y X^+ P + (I - P).
    """
    n = L.n
    dist = dz_distance(L, adjoint(L))
    if dist > tol:
        raise NotSelfAdjoint(f"subspace is not self-adjoint (d_Z(L, L*) = {dist:.3g})", L, dist)
    X, Y = L.basis[:n], L.basis[n:]
    U, s, _ = np.linalg.svd(X)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 0.0)))
    Ur = U[:, :rank]
    P = Ur @ Ur.T
    W = P @ Y @ np.linalg.pinv(X, rcond=1e-9) @ P + (np.eye(n) - P)
    W = (W + W.T) / 2
    pw = PWPair(P, W)
    back = subspace_from_pw(PWPair(pw.P, pw.W)) if check_pw_axioms(pw.P, pw.W)["passed"] else None
    if back is None or dz_distance(back, L) > max(tol, 1e-10):
        raise NotSelfAdjoint("no (P, W) representation reproduces the subspace", L, dist)
    return pw
