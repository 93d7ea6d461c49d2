"""Dense complex kernel for up to three qubits.

Matrices and vectors are plain ``numpy`` arrays. Basis convention, used
everywhere in the package: a single atom has ``|e> = index 0`` and
``|g> = index 1`` with ``sigma_z |e> = +|e>``; composite indices are ordered
atom1 (x) atom2 (x) atom3, so ``|ggg>`` is index 7.
"""
from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .errors import BadSubset, NonHermitianInput, NumericalBreakdown

HERMITIAN_RTOL = 1e-12
TRACE_ATOL = 1e-12
PSD_FLOOR = -1e-12
NORM_ATOL = 1e-9
EIG_BREAKDOWN_REAL = -1e-8
EIG_BREAKDOWN_IMAG = 1e-8

N_ATOMS = 3

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; entry ((i1 i2), (j1 j2)) = a[i1, j1] * b[i2, j2]."""
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    return np.kron(a, b)


def tensor_chain(*ops: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = tensor_product(out, op)
    return out


def site_operator(op: np.ndarray, site: int, n_atoms: int = N_ATOMS) -> np.ndarray:
    """Embed a single-atom operator on ``site`` (1-based) of the chain."""
    if not 1 <= site <= n_atoms:
        raise ValueError(f"site must be in 1..{n_atoms}, got {site}")
    return tensor_chain(*[op if k == site else IDENTITY2 for k in range(1, n_atoms + 1)])


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    scale = np.max(np.abs(h)) if h.size else 0.0
    if scale == 0.0:
        return True
    return float(np.max(np.abs(h - h.conj().T))) < rtol * scale


def check_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    return h


def spectral_decomposition(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    h = check_hermitian(h)
    # eigh reads one triangle only; symmetrize so both triangles count
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Return ``U = exp(-i h t)`` via the eigendecomposition of ``h``."""
    w, v = spectral_decomposition(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def propagate_spectral(w: np.ndarray, v: np.ndarray, psi0: np.ndarray,
                       times: np.ndarray) -> np.ndarray:
    """States ``exp(-i H t) psi0`` for every t, reusing one decomposition.

    Returns an array of shape ``(len(times), dim)``.
    """
    coeffs = v.conj().T @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * coeffs) @ v.T


def _normalize_keep(keep: Iterable[int], n_atoms: int) -> tuple[int, ...]:
    try:
        kept = tuple(sorted(set(int(k) for k in keep)))
    except TypeError:
        kept = (int(keep),)
    if not kept or len(kept) >= n_atoms:
        raise BadSubset(f"keep must be a non-empty proper subset of 1..{n_atoms}, got {kept}")
    if kept[0] < 1 or kept[-1] > n_atoms:
        raise BadSubset(f"atom indices must lie in 1..{n_atoms}, got {kept}")
    return kept


def reduced_density_batch(psis: np.ndarray, keep: Iterable[int],
                          n_atoms: int = N_ATOMS) -> np.ndarray:
    """Reduced density matrices of a stack of pure states.

    ``psis`` has shape ``(..., 2**n_atoms)``; the result has shape
    ``(..., 2**k, 2**k)`` with kept atoms in increasing order.
    """
    kept = _normalize_keep(keep, n_atoms)
    psis = np.asarray(psis, dtype=complex)
    lead = psis.shape[:-1]
    t = psis.reshape(lead + (2,) * n_atoms)
    ket = "abcdefgh"[:n_atoms]
    bra = "".join(ket[i].upper() if i + 1 in kept else ket[i] for i in range(n_atoms))
    out = "".join(ket[i - 1] for i in kept) + "".join(bra[i - 1] for i in kept)
    rho = np.einsum(f"...{ket},...{bra}->...{out}", t, t.conj())
    d = 2 ** len(kept)
    return rho.reshape(lead + (d, d))


def partial_trace(state: np.ndarray, keep: Iterable[int],
                  n_atoms: int = N_ATOMS) -> np.ndarray:
    """Reduced density matrix of the atoms in ``keep`` (1-based).

    ``state`` is either a normalized pure state vector or a density matrix
    on ``n_atoms`` qubits.
    """
    kept = _normalize_keep(keep, n_atoms)
    state = np.asarray(state, dtype=complex)
    dim = 2 ** n_atoms
    if state.shape == (dim,):
        norm = np.vdot(state, state).real
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        rho = reduced_density_batch(state, kept, n_atoms)
    elif state.shape == (dim, dim):
        if abs(np.trace(state) - 1.0) > NORM_ATOL:
            raise ValueError("density matrix does not have unit trace")
        t = state.reshape((2,) * (2 * n_atoms))
        ket = "abcdefgh"[:n_atoms]
        bra = "".join(ket[i].upper() if i + 1 in kept else ket[i] for i in range(n_atoms))
        out = "".join(ket[i - 1] for i in kept) + "".join(bra[i - 1] for i in kept)
        d = 2 ** len(kept)
        rho = np.einsum(f"{ket}{bra}->{out}", t).reshape(d, d)
    else:
        raise ValueError(f"expected shape ({dim},) or ({dim}, {dim}), got {state.shape}")

    if abs(np.trace(rho) - 1.0) > TRACE_ATOL + NORM_ATOL:
        raise NumericalBreakdown("reduced state lost unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < PSD_FLOOR:
        raise NumericalBreakdown("reduced state is not positive semidefinite")
    return rho


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)`` for 4x4 (stacked) matrices."""
    return SIGMA_YY @ np.conj(rho) @ SIGMA_YY


def sorted_sqrt_eigvals_rr(rho: np.ndarray, rho_tilde: np.ndarray) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho @ rho_tilde``, descending.

    Works on single 4x4 matrices or stacks ``(..., 4, 4)``. Eigenvalues whose
    real part lies in ``[-1e-8, 0)`` are clipped to zero; anything more
    negative, or with ``|imag| > 1e-8``, raises.
    """
    ev = np.linalg.eigvals(np.asarray(rho) @ np.asarray(rho_tilde))
    if np.any(ev.real < EIG_BREAKDOWN_REAL) or np.any(np.abs(ev.imag) > EIG_BREAKDOWN_IMAG):
        raise NumericalBreakdown("rho * rho_tilde has eigenvalues off the non-negative axis")
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    return -np.sort(-lam, axis=-1)


def pair_sqrt_eigvals_pure(psis: np.ndarray, pair: Iterable[int],
                           n_atoms: int = N_ATOMS) -> np.ndarray:
    """The four Wootters lambdas of a pair's reduced state, from pure states.

    With the pair's reduced state written as ``rho = A A^dagger`` (A is the
    state reshaped to ``(4, 2)``, pair indices first), the nonzero lambdas
    are the singular values of ``A^T (sigma_y x sigma_y) A``. Unlike the
    eigenvalues of ``rho @ rho_tilde`` this keeps full relative accuracy
    near zero. Returns shape ``(..., 4)``, descending.
    """
    kept = _normalize_keep(pair, n_atoms)
    if len(kept) != 2 or n_atoms != 3:
        raise BadSubset(f"need a pair of atoms out of three, got {kept}")
    (rest,) = set(range(1, n_atoms + 1)) - set(kept)
    psis = np.asarray(psis, dtype=complex)
    lead = psis.shape[:-1]
    t = psis.reshape(lead + (2, 2, 2))
    axes = tuple(len(lead) + k - 1 for k in kept + (rest,))
    t = np.moveaxis(t, axes, tuple(range(len(lead), len(lead) + 3)))
    a = t.reshape(lead + (4, 2))
    m = np.swapaxes(a, -1, -2) @ SIGMA_YY @ a
    sv = np.linalg.svd(m, compute_uv=False)
    return np.concatenate([sv, np.zeros(lead + (2,))], axis=-1)
