"""Single-excitation x truncated-phonon Hilbert space on a periodic ring.

Phonon configurations are capped on the *total* number of quanta. A product
state is encoded as ``exc_site * R**N + sum_j m_j R**(N-1-j)`` with radix
``R = M + 1``, so integer order equals lexicographic order of
``(exc_site, m_0, ..., m_{N-1})``.

Because there is exactly one excitation, every translation orbit has the full
length N and its lexicographically smallest member is the one with the
excitation on site 0. A momentum sector therefore has one basis state per
phonon configuration.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import BuildError, CapacityError, InvalidParameterError

MAX_CONFIGS = 20_000_000
_KEY_LIMIT = 2**62


@dataclass(frozen=True)
class FockState:
    exc_site: int
    phonons: tuple

    def key(self, max_phonons):
        return encode(self.exc_site, self.phonons, max_phonons)


def encode(exc_site, phonons, max_phonons):
    radix = max_phonons + 1
    key = exc_site
    for m in phonons:
        key = key * radix + int(m)
    return key


def count_phonon_configs(n_sites, max_phonons):
    """Number of occupations with total <= M on N modes, C(N+M, N)."""
    return math.comb(n_sites + max_phonons, n_sites)


def enumerate_phonon_configs(n_sites, max_phonons):
    """All occupation tuples with sum <= M, in lexicographic order.

    Returns ``(count, iterator)``.
    """
    if n_sites < 1 or max_phonons < 0:
        raise InvalidParameterError("need n_sites >= 1 and max_phonons >= 0")
    count = count_phonon_configs(n_sites, max_phonons)
    if count > MAX_CONFIGS:
        raise CapacityError(f"{count} phonon configurations exceed the cap {MAX_CONFIGS}")

    def gen(n, budget):
        if n == 0:
            yield ()
            return
        for m in range(budget + 1):
            for rest in gen(n - 1, budget - m):
                yield (m,) + rest

    return count, gen(n_sites, max_phonons)


@lru_cache(maxsize=16)
def phonon_table(n_sites, max_phonons):
    """(configs, keys): int array of shape (D, N) and their sorted phonon keys."""
    count = count_phonon_configs(n_sites, max_phonons)
    if count > MAX_CONFIGS:
        raise CapacityError(f"{count} phonon configurations exceed the cap {MAX_CONFIGS}")
    radix = max_phonons + 1
    if n_sites * radix ** n_sites >= _KEY_LIMIT:
        raise CapacityError("state keys do not fit in 63 bits")
    configs = np.zeros((count, n_sites), dtype=np.int64)
    # stars and bars: each multiset of occupied sites is one configuration
    row = 1
    for total in range(1, max_phonons + 1):
        for sites in itertools.combinations_with_replacement(range(n_sites), total):
            np.add.at(configs[row], list(sites), 1)
            row += 1
    keys = phonon_keys(configs, max_phonons)
    order = np.argsort(keys, kind="stable")
    configs, keys = configs[order], keys[order]
    if np.any(np.diff(keys) <= 0):
        raise BuildError("phonon key collision")
    configs.setflags(write=False)
    keys.setflags(write=False)
    return configs, keys


def phonon_keys(configs, max_phonons):
    configs = np.asarray(configs, dtype=np.int64)
    n = configs.shape[-1]
    weights = (max_phonons + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return configs @ weights


def translate(state, shift, n_sites=None):
    """Shift the excitation and every phonon by ``shift`` sites to the right."""
    n = n_sites or len(state.phonons)
    ph = tuple(np.roll(np.asarray(state.phonons), shift).tolist())
    return FockState((state.exc_site + shift) % n, ph)


def canonical(state, max_phonons):
    """(representative, l) with ``state == translate(representative, l)``.

    The representative is found by brute force over the orbit, which keeps
    this routine independent of the site-0 shortcut used in the sector
    builder.
    """
    n = len(state.phonons)
    best, best_shift = None, 0
    for s in range(n):
        t = translate(state, -s, n)
        if best is None or t.key(max_phonons) < best.key(max_phonons):
            best, best_shift = t, s
    return best, best_shift


def orbit_period(state):
    n = len(state.phonons)
    t = state
    for s in range(1, n + 1):
        t = translate(t, 1, n)
        if t == state:
            return s
    raise BuildError("orbit did not close")  # pragma: no cover


def k_label(j, n_sites):
    """Map sector index j to its integer label in (-N/2, N/2]."""
    j = j % n_sites
    return j - n_sites if 2 * j > n_sites else j


def k_value(j, n_sites):
    """Total quasimomentum 2 pi j / N folded into (-pi, pi]."""
    return 2.0 * np.pi * k_label(j, n_sites) / n_sites


@dataclass(frozen=True, eq=False)
class KSectorBasis:
    """Bloch states ``N**-1/2 sum_s exp(-iKs) T^s |r>`` of one momentum block.

    ``representatives`` holds the phonon occupations of each representative;
    its excitation always sits on site 0.
    """

    n_sites: int
    max_phonons: int
    k_index: int
    representatives: np.ndarray
    keys: np.ndarray
    norms: np.ndarray

    @property
    def dim(self):
        return len(self.keys)

    @property
    def k(self):
        return k_value(self.k_index, self.n_sites)

    @property
    def phonon_numbers(self):
        return self.representatives.sum(axis=1)

    def index(self, key):
        """Position of a representative key, or -1 if absent (vectorised)."""
        key = np.asarray(key, dtype=np.int64)
        pos = np.searchsorted(self.keys, key)
        pos = np.minimum(pos, self.dim - 1)
        return np.where(self.keys[pos] == key, pos, -1)

    def state(self, i):
        return FockState(0, tuple(int(m) for m in self.representatives[i]))

    def vacuum_index(self):
        """Index of the zero-phonon representative (the bare Bloch state)."""
        return 0

    def dump(self, fh):
        """Text dump: header line then ``key norm m_0 ... m_{N-1}`` per state."""
        fh.write(f"# N={self.n_sites} M={self.max_phonons} j={self.k_index} dim={self.dim}\n")
        for key, norm, conf in zip(self.keys, self.norms, self.representatives):
            occ = " ".join(str(int(m)) for m in conf)
            fh.write(f"{int(key)} {int(norm)} {occ}\n")


def build_k_sector(n_sites, max_phonons, j):
    if not 0 <= j < n_sites:
        raise InvalidParameterError(f"sector index j={j} outside [0, {n_sites})")
    configs, keys = phonon_table(n_sites, max_phonons)
    # a full-length orbit is compatible with every K
    norms = np.full(len(keys), n_sites, dtype=np.int64)
    return KSectorBasis(n_sites, max_phonons, j, configs, keys, norms)


def full_space_dim(n_sites, max_phonons):
    return n_sites * count_phonon_configs(n_sites, max_phonons)
