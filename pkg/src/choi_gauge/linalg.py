"""Small dense complex matrix algebra.

Matrices are plain ``numpy`` complex arrays. The helpers here add the
dimension checks and conventions the rest of the package relies on:
Kronecker products, partial traces over a 2 x 2 bipartition, and a
deterministic Hermitian eigendecomposition backed by a cyclic Jacobi kernel.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .errors import BadDimension, DimensionMismatch, NonHermitian, NonSquare

MAX_DIM = 16


class HermitianEig(NamedTuple):
    """Ascending eigenvalues with index-aligned unit eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise BadDimension(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def conjugate(a) -> np.ndarray:
    return as_matrix(a).conj()


def trace(a) -> complex:
    m = _square(a)
    return complex(np.trace(m))


def product(*mats) -> np.ndarray:
    out = as_matrix(mats[0])
    for m in mats[1:]:
        m = as_matrix(m)
        if out.shape[1] != m.shape[0]:
            raise DimensionMismatch(f"cannot multiply {out.shape} by {m.shape}")
        out = out @ m
    return out


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(a, factor: complex) -> np.ndarray:
    return as_matrix(a) * factor


def allclose(a, b, atol: float) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def hermiticity_error(a) -> float:
    m = _square(a)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def symmetrize(a) -> np.ndarray:
    m = _square(a)
    return 0.5 * (m + m.conj().T)


def partial_trace(a, subsystem: str) -> np.ndarray:
    """Trace out factor ``"A"`` (first) or ``"B"`` (second) of a 2 (x) 2 operator."""
    m = as_matrix(a)
    if m.shape != (4, 4):
        raise BadDimension(f"partial trace needs a 4x4 operator, got {m.shape}")
    t = m.reshape(2, 2, 2, 2)
    if subsystem == "B":
        return np.einsum("ajbj->ab", t)
    if subsystem == "A":
        return np.einsum("jajb->ab", t)
    raise BadDimension(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def hermitian_eig(a, tol: float = 1e-8) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix of size at most 16.

    The input is symmetrized as (a + a^dagger)/2 first. Each eigenvector is
    phased so that its first component with magnitude above 1e-8 is real and
    non-negative, which makes downstream witnesses reproducible.
    """
    m = _square(a)
    if m.shape[0] > MAX_DIM:
        raise BadDimension(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitian(f"max |a - a^dagger| = {err:.3g} exceeds tolerance {tol:.3g}")
    vals, vecs = kernels.jacobi_eigh(symmetrize(m))
    return HermitianEig(np.asarray(vals, dtype=float), np.asarray(vecs, dtype=complex))


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"matrix is {m.shape[0]}x{m.shape[1]}")
    return m
