"""Lowest eigenpairs of a Hermitian block and ground-state observables.

The iterative solver is a thick-restart Lanczos: the Krylov basis is kept
fully reorthogonalised (classical Gram-Schmidt applied twice), so no ghost
copies of converged eigenvalues appear. When the basis is full, it is
compressed onto the lowest Ritz vectors plus the current residual direction
and the expansion continues from there.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, InvalidParameterError

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 20_000
DEFAULT_BASIS = 48
DENSE_CAP = 4096
MAX_RESTARTS = 3


@dataclass(frozen=True, eq=False)
class EigResult:
    energy: float
    vector: np.ndarray
    residual: float
    iterations: int
    seed: int


@dataclass(frozen=True)
class Observables:
    mean_phonon_number: float
    bare_overlap: float
    energy_minus_offset: float


def _matvec(h):
    if hasattr(h, "apply"):
        return h.apply, h.dim
    if hasattr(h, "matvec"):
        return h.matvec, h.shape[0]
    return (lambda v: h @ v), h.shape[0]


def _start_vector(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, dim) + 1j * rng.uniform(-1.0, 1.0, dim)
    return v / np.linalg.norm(v)


def _thick_restart(matvec, dim, n_eig, tol, max_iter, basis, seed, lock=None):
    free = dim - (0 if lock is None else lock.shape[0])
    m = min(free, max(basis, 2 * n_eig + 8))
    # rows are Krylov vectors so every slice below is contiguous
    V = np.zeros((m + 1, dim), dtype=complex)
    T = np.zeros((m + 1, m + 1), dtype=complex)
    v0 = _start_vector(dim, seed)
    if lock is not None:
        v0 = v0 - (lock.conj() @ v0) @ lock
        v0 /= np.linalg.norm(v0)
    V[0] = v0
    kept = 0
    iters = 0
    best = None
    while True:
        size = m
        beta = 0.0
        for j in range(kept, m):
            w = np.array(matvec(V[j]), dtype=complex)
            iters += 1
            basis_j = V[: j + 1]
            coef = (basis_j @ w.conj()).conj()
            w -= coef @ basis_j
            corr = (basis_j @ w.conj()).conj()
            w -= corr @ basis_j
            coef += corr
            if lock is not None:
                # -alpha v_j would otherwise feed the locked directions back in
                w -= (lock.conj() @ w) @ lock
            T[: j + 1, j] = coef
            T[j, : j + 1] = coef.conj()
            beta = np.linalg.norm(w)
            scale = max(1.0, np.max(np.abs(coef)))
            if beta <= 1e-13 * scale:
                # invariant subspace: its Ritz pairs are exact
                size = j + 1
                beta = 0.0
                break
            V[j + 1] = w / beta
            T[j + 1, j] = beta
            T[j, j + 1] = beta
        Tm = T[:size, :size]
        theta, U = scipy.linalg.eigh((Tm + Tm.conj().T) / 2)
        res = np.abs(beta * U[size - 1, :])
        want = min(n_eig, size)
        thresh = tol * np.maximum(1.0, np.abs(theta[:want]))
        best = (theta[:want], U[:, :want].T @ V[:size], res[:want], iters)
        if np.all(res[:want] <= thresh):
            return best, True
        if iters >= max_iter or size < m:
            return best, False
        keep = min(m - 1, max(want + 1, (m + want) // 2))
        V[:keep] = U[:, :keep].T @ V[:size]
        V[keep] = V[size]
        V[keep + 1 :] = 0.0
        T[:] = 0.0
        T[np.arange(keep), np.arange(keep)] = theta[:keep]
        T[keep, :keep] = beta * U[size - 1, :keep]
        T[:keep, keep] = np.conj(T[keep, :keep])
        kept = keep


def _deflated(matvec, Y):
    if Y is None:
        return matvec

    def mv(v):
        v = v - (Y.conj() @ v) @ Y
        w = np.asarray(matvec(v), dtype=complex)
        return w - (Y.conj() @ w) @ Y

    return mv


def _attempts(matvec, dim, n_eig, tol, max_iter, basis, seed, lock=None):
    mv = _deflated(matvec, lock)
    seeds = np.random.SeedSequence(seed).spawn(MAX_RESTARTS)
    attempt_seeds = [seed] + [int(s.generate_state(1)[0]) for s in seeds]
    last = None
    for attempt, s in enumerate(attempt_seeds):
        (theta, X, res, iters), ok = _thick_restart(mv, dim, n_eig, tol, max_iter, basis, s, lock)
        out = []
        for e, x in zip(theta, X):
            x = x / np.linalg.norm(x)
            r = float(np.linalg.norm(matvec(x) - e * x))
            out.append(EigResult(float(e), x, r, iters, int(s)))
        if ok and all(o.residual <= 10 * tol * max(1.0, abs(o.energy)) for o in out):
            return out
        log.warning("Lanczos attempt %d (seed %d) did not converge after %d steps", attempt, s, iters)
        last = out
    raise ConvergenceError(f"Lanczos did not converge to tol={tol:g}", best=last)


def lanczos_lowest(h, n_eig=1, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0, basis=DEFAULT_BASIS):
    """The ``n_eig`` lowest eigenpairs, ascending, degenerate levels repeated.

    Convergence means ``||H x - E x|| <= tol * max(1, |E|)`` for every
    requested pair; the reported residual is recomputed explicitly. On
    failure the solver retries from fresh start vectors up to three times
    before raising :class:`ConvergenceError`.

    A single Krylov sequence sees one copy of an exactly degenerate level,
    so for ``n_eig > 1`` the converged vectors are locked and the search is
    repeated in their orthogonal complement until nothing lower is found.
    """
    matvec, dim = _matvec(h)
    if dim < 1:
        raise InvalidParameterError("empty block")
    if n_eig < 1:
        raise InvalidParameterError("n_eig must be positive")
    n_eig = min(n_eig, dim)
    found = _attempts(matvec, dim, n_eig, tol, max_iter, basis, seed)
    probe = 1
    while n_eig > 1 and len(found) < dim:
        Y, _ = np.linalg.qr(np.array([f.vector for f in found]).T)
        extra = _attempts(matvec, dim, 1, tol, max_iter, basis, seed + probe, lock=Y.T.copy())[0]
        probe += 1
        top = found[-1].energy
        if len(found) == n_eig and extra.energy >= top - tol * max(1.0, abs(top)):
            break
        found = sorted(found + [extra], key=lambda r: r.energy)[:n_eig]
    return found


def lanczos_ground(h, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0, basis=DEFAULT_BASIS):
    return lanczos_lowest(h, 1, tol=tol, max_iter=max_iter, seed=seed, basis=basis)[0]


def _dense(h, cap):
    dim = h.dim if hasattr(h, "dim") else h.shape[0]
    if dim > cap:
        raise InvalidParameterError(f"dimension {dim} exceeds the dense cap {cap}")
    if hasattr(h, "to_dense"):
        return h.to_dense()
    return h.toarray() if hasattr(h, "toarray") else np.asarray(h)


def dense_spectrum(h, cap=DENSE_CAP):
    """All eigenvalues of a small block, ascending."""
    return scipy.linalg.eigvalsh(_dense(h, cap))


def dense_ground(h, cap=DENSE_CAP, seed=0):
    """Ground pair by full diagonalisation, packaged like the Lanczos result."""
    a = _dense(h, cap)
    w, v = scipy.linalg.eigh(a)
    x = v[:, 0]
    r = float(np.linalg.norm(a @ x - w[0] * x))
    return EigResult(float(w[0]), x, r, 0, seed)


def observables(h, eig):
    amp2 = np.abs(eig.vector) ** 2
    amp2 = amp2 / amp2.sum()
    n_ph = h.sector.phonon_numbers
    return Observables(
        mean_phonon_number=float(amp2 @ n_ph),
        bare_overlap=float(amp2[h.sector.vacuum_index()]),
        energy_minus_offset=eig.energy - h.params.eps_e,
    )
