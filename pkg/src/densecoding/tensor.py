"""Dense linear algebra on multi-qudit Hilbert spaces.

Matrices are plain complex ``numpy`` arrays. Subsystems are addressed by their
position in the tensor-factor order given by a list of local dimensions.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import reduce

import numpy as np

HERMITICITY_TOL = 1e-9
DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Matrix shape and subsystem dimensions do not agree."""


class HermiticityError(ValueError):
    """An operation that needs a Hermitian matrix received something else."""


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"local dimensions must be positive, got {dims}")
    total = int(np.prod(dims)) if dims else 1
    if total != m.shape[0]:
        raise DimensionError(f"dims {dims} multiply to {total}, matrix is {m.shape[0]}x{m.shape[0]}")
    return dims


def _check_subset(subset: Iterable[int], n: int) -> list[int]:
    out = sorted({int(k) for k in subset})
    if out and (out[0] < 0 or out[-1] >= n):
        raise DimensionError(f"party indices {out} out of range for {n} parties")
    return out


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors), left to right."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def dagger(m) -> np.ndarray:
    return np.asarray(m, dtype=complex).conj().T


def outer(v, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Projector |v><v| for a normalized state vector ``v``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state vector is not normalized (norm {norm:.12g})")
    return np.outer(v, v.conj())


def is_hermitian(m, tol: float = HERMITICITY_TOL) -> bool:
    m = _as_square(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def hermitian_eigenvalues(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Real spectrum of a Hermitian matrix in ascending order.

    Raises:
        HermiticityError: if ``max|m - m^dagger| > tol``.
    """
    m = _as_square(m)
    if not is_hermitian(m, tol):
        raise HermiticityError("matrix is not Hermitian within tolerance")
    # symmetrize away the sub-tolerance anti-Hermitian part before eigvalsh
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    return bool(hermitian_eigenvalues(m)[0] >= -tol)


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original relative order.

    >>> rho = np.eye(4) / 4
    >>> partial_trace(rho, [2, 2], keep=[0]).real
    array([[0.5, 0. ],
           [0. , 0.5]])
    """
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = _check_subset(keep, n)
    if len(keep) == n:
        return m.copy()
    traced = [k for k in range(n) if k not in keep]
    t = m.reshape(dims + dims)
    # contract each traced pair of row/column indices, highest first so positions stay valid
    for count, k in enumerate(sorted(traced, reverse=True)):
        t = np.trace(t, axis1=k, axis2=k + n - count)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_transpose(m, dims: Sequence[int], transpose: Iterable[int]) -> np.ndarray:
    """Transpose the listed subsystems, leaving the others untouched."""
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    sel = _check_subset(transpose, n)
    axes = list(range(2 * n))
    for k in sel:
        axes[k], axes[k + n] = axes[k + n], axes[k]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``j`` is old factor ``order[j]``."""
    m = _as_square(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    order = [int(k) for k in order]
    if sorted(order) != list(range(n)):
        raise DimensionError(f"{order} is not a permutation of {n} subsystems")
    axes = order + [k + n for k in order]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def embed_operator(op, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Lift ``op`` acting on the ``targets`` factors to the full space.

    ``targets`` may be in any order; ``op`` is interpreted in that order.
    """
    dims = [int(d) for d in dims]
    targets = [int(t) for t in targets]
    n = len(dims)
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise DimensionError(f"bad target subsystems {targets} for {n} parties")
    op = _as_square(op)
    d_t = int(np.prod([dims[t] for t in targets])) if targets else 1
    if op.shape[0] != d_t:
        raise DimensionError(f"operator is {op.shape[0]}-dimensional, targets span {d_t}")
    rest = [k for k in range(n) if k not in targets]
    d_r = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(op, np.eye(d_r, dtype=complex))
    # full currently acts on (targets..., rest...); move factors back into place
    current = targets + rest
    cur_dims = [dims[k] for k in current]
    inverse = [current.index(k) for k in range(n)]
    return permute_subsystems(full, cur_dims, inverse)
