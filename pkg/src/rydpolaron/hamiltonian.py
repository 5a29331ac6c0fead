"""Momentum-block Hamiltonian H = H0 + H_P + H_B in units of hbar*omega_ph.

Real-space form on a ring of N sites, X_n = b_n + b_n^dagger:

    H0  = eps_e sum_n c_n^+ c_n - t_e sum_n (c_{n+1}^+ c_n + h.c.) + sum_n b_n^+ b_n
    H_P = g_P sum_n (c_{n+1}^+ c_n + h.c.) (X_{n+1} - X_n)
    H_B = g_B sum_n c_n^+ c_n (X_{n+1} - X_{n-1})

Acting on a representative (excitation on site 0) every term produces a
product state with the excitation on site l in {0, 1, N-1}; translating it
back by -l gives another representative and a Bloch phase exp(iKl). The
block is thus

    H(K) = diag(eps_e + n_ph) + B g_B
           + exp(iK) (-t_e S + g_P P) + exp(-iK) (-t_e S + g_P P)^T

with real K-independent matrices S, P, B built once per (N, M). Raising
operators that would exceed M total quanta are dropped.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.io
import scipy.sparse as sp

from .basis import build_k_sector
from .exceptions import BuildError, InvalidParameterError


@dataclass(frozen=True)
class _Pieces:
    hop: sp.csr_matrix  # pure hop 0 -> 1, phonons unchanged
    peierls: sp.csr_matrix  # hop 0 -> 1 dressed by X_1 - X_0
    peierls_back: sp.csr_matrix  # hop 0 -> N-1 dressed by X_0 - X_{N-1}
    hop_back: sp.csr_matrix  # pure hop 0 -> N-1
    breathing: sp.csr_matrix  # X_1 - X_{N-1} with excitation on site 0
    n_ph: np.ndarray


def _ladder(configs, site, max_phonons):
    """Rows, new configurations and amplitudes for X_site = b + b^+ (truncated)."""
    occ = configs[:, site]
    total = configs.sum(axis=1)
    up = np.nonzero(total < max_phonons)[0]
    down = np.nonzero(occ > 0)[0]
    new_up = configs[up].copy()
    new_up[:, site] += 1
    new_down = configs[down].copy()
    new_down[:, site] -= 1
    amp_up = occ[up] + 1
    amp_down = occ[down]
    if np.any(amp_up < 0) or np.any(amp_down < 0):
        raise BuildError("negative occupation in ladder factor")
    rows = np.concatenate([up, down])
    new = np.concatenate([new_up, new_down])
    amps = np.sqrt(np.concatenate([amp_up, amp_down]).astype(float))
    return rows, new, amps


def _to_matrix(sector, rows, new_configs, amps, shift):
    # representative of the image state: translate back by -shift
    back = np.roll(new_configs, -shift, axis=1)
    weights = (sector.max_phonons + 1) ** np.arange(sector.n_sites - 1, -1, -1, dtype=np.int64)
    cols = sector.index(back @ weights)
    if np.any(cols < 0):
        raise BuildError("image state missing from the sector basis")
    d = sector.dim
    # element (image, source)
    return sp.csr_matrix((amps, (cols, rows)), shape=(d, d))


@lru_cache(maxsize=8)
def _pieces(n_sites, max_phonons):
    sector = build_k_sector(n_sites, max_phonons, 0)
    conf = sector.representatives
    d = sector.dim
    right, left = 1 % n_sites, (n_sites - 1) % n_sites
    ident = np.arange(d)
    ones = np.ones(d)

    hop = _to_matrix(sector, ident, conf, ones, 1)
    hop_back = _to_matrix(sector, ident, conf, ones, n_sites - 1)

    def dressed(plus_site, minus_site, shift):
        r1, c1, a1 = _ladder(conf, plus_site, max_phonons)
        r2, c2, a2 = _ladder(conf, minus_site, max_phonons)
        rows = np.concatenate([r1, r2])
        new = np.concatenate([c1, c2])
        amps = np.concatenate([a1, -a2])
        return _to_matrix(sector, rows, new, amps, shift)

    peierls = dressed(right, 0, 1)
    peierls_back = dressed(0, left, n_sites - 1)
    breathing = dressed(right, left, 0)
    n_ph = sector.phonon_numbers.astype(float)
    return _Pieces(hop, peierls, peierls_back, hop_back, breathing, n_ph)


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    sector: object
    params: object
    matrix: sp.csr_matrix

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def dtype(self):
        return self.matrix.dtype

    def apply(self, v, out=None):
        """H @ v; ``out`` is filled in place when given."""
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise InvalidParameterError(f"vector length {v.shape[0]} != dim {self.dim}")
        w = self.matrix @ v
        if out is not None:
            out[...] = w
            return out
        return w

    __matmul__ = apply

    def norm_estimate(self):
        """Max absolute row sum, an upper bound on the spectral norm."""
        return float(abs(self.matrix).sum(axis=1).max())

    def hermiticity_error(self):
        diff = self.matrix - self.matrix.getH()
        return float(abs(diff).max()) if diff.nnz else 0.0

    def to_dense(self):
        return self.matrix.toarray()

    def write_matrix_market(self, path):
        scipy.io.mmwrite(
            str(path),
            self.matrix.tocoo(),
            comment=f"N={self.sector.n_sites} M={self.sector.max_phonons} j={self.sector.k_index}",
        )


def assemble(sector, mp, check=False):
    """Build the K block of ``sector`` for model parameters ``mp``."""
    if (sector.n_sites, sector.max_phonons) != (mp.n_sites, mp.max_phonons):
        raise BuildError(
            f"sector built for N={sector.n_sites}, M={sector.max_phonons} "
            f"but model has N={mp.n_sites}, M={mp.max_phonons}"
        )
    pc = _pieces(sector.n_sites, sector.max_phonons)
    if pc.n_ph.shape[0] != sector.dim:
        raise BuildError("dimension mismatch between sector and cached operators")
    phase = np.exp(1j * sector.k)
    forward = -mp.t_e * pc.hop + mp.g_p * pc.peierls
    backward = -mp.t_e * pc.hop_back + mp.g_p * pc.peierls_back
    h = (
        sp.diags(mp.eps_e + pc.n_ph)
        + mp.g_b * pc.breathing
        + phase * forward
        + np.conj(phase) * backward
    )
    h = sp.csr_matrix(h, dtype=complex)
    h.sum_duplicates()
    h.eliminate_zeros()
    out = SparseHamiltonian(sector, mp, h)
    if check:
        err = out.hermiticity_error()
        if err > 1e-12 * max(1.0, out.norm_estimate()):
            raise BuildError(f"assembled block is not Hermitian (error {err:.3e})")
    return out


def assemble_sector(mp, j, check=False):
    return assemble(build_k_sector(mp.n_sites, mp.max_phonons, j), mp, check=check)


def bare_bloch_vector(h):
    """Unit vector of the zero-phonon Bloch state in the block's basis."""
    v = np.zeros(h.dim, dtype=complex)
    v[h.sector.vacuum_index()] = 1.0
    return v
