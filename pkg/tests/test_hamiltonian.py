import numpy as np
import pytest
import scipy.io
import scipy.linalg

from oracles import realspace_hamiltonian
from rydpolaron.basis import build_k_sector, translate
from rydpolaron.exceptions import BuildError, InvalidParameterError
from rydpolaron.hamiltonian import assemble, assemble_sector, bare_bloch_vector
from rydpolaron.params import ModelParams


def bloch_projector(states, sector):
    """Columns are the Bloch states of ``sector`` written in the product basis."""
    index = {s: i for i, s in enumerate(states)}
    n = sector.n_sites
    proj = np.zeros((len(states), sector.dim), dtype=complex)
    for col in range(sector.dim):
        rep = sector.state(col)
        for s in range(n):
            t = translate(rep, s, n)
            proj[index[(t.exc_site, t.phonons)], col] += np.exp(-1j * sector.k * s) / np.sqrt(n)
    return proj


CASES = [
    ModelParams(0.2, -1.0, 0.3, 0.3, 4, 2),
    ModelParams(0.0, -0.7, 1.0, 1.0, 6, 3),
    ModelParams(0.5, 1.3, 0.4, -0.9, 5, 3),
    ModelParams(-0.3, -2.0, 0.0, 0.8, 3, 2),
    ModelParams(0.0, -1.0, 0.6, 0.0, 2, 4),
]


@pytest.mark.parametrize("mp", CASES, ids=lambda mp: f"N{mp.n_sites}M{mp.max_phonons}")
def test_blocks_match_realspace_oracle(mp):
    h_rs, states = realspace_hamiltonian(mp)
    full = scipy.linalg.eigvalsh(h_rs)
    pieces = []
    for j in range(mp.n_sites):
        h = assemble_sector(mp, j, check=True)
        p = bloch_projector(states, h.sector)
        assert np.allclose(p.conj().T @ p, np.eye(h.dim), atol=1e-13)
        assert np.abs(p.conj().T @ h_rs @ p - h.to_dense()).max() < 1e-12
        pieces.append(np.linalg.eigvalsh(h.to_dense()))
    assert np.abs(np.sort(np.concatenate(pieces)) - full).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 6, 10])
def test_tight_binding_limit(n):
    for j in range(n):
        h = assemble_sector(ModelParams(0.4, -1.3, 0.0, 0.0, n, 0), j)
        assert h.dim == 1
        k = 2 * np.pi * j / n
        assert h.to_dense()[0, 0].real == pytest.approx(0.4 + 2.6 * np.cos(k), abs=1e-14)


@pytest.mark.parametrize("n,m,g", [(6, 3, 0.5), (10, 8, 0.5), (10, 8, 2.0), (10, 8, 8.0)])
def test_band_bottom_product_states_are_exact(n, m, g):
    t_e = -1.7
    mp = ModelParams(0.3, t_e, g, g, n, m)
    j = n // 2  # K = pi
    h = assemble_sector(mp, j)
    v = bare_bloch_vector(h)
    r = h.apply(v) - (0.3 - 2 * abs(t_e)) * v
    assert np.linalg.norm(r) < 1e-12 * h.norm_estimate()


def test_random_hermiticity_probes():
    mp = ModelParams(0.1, -1.2, 0.7, 0.4, 8, 4)
    rng = np.random.default_rng(11)
    for j in (0, 1, 3, 4):
        h = assemble_sector(mp, j)
        assert h.hermiticity_error() < 1e-14
        for _ in range(5):
            x = rng.normal(size=h.dim) + 1j * rng.normal(size=h.dim)
            y = rng.normal(size=h.dim) + 1j * rng.normal(size=h.dim)
            lhs, rhs = np.vdot(x, h @ y), np.vdot(h @ x, y)
            assert abs(lhs - rhs) < 1e-12 * np.linalg.norm(x) * np.linalg.norm(y) * h.norm_estimate()


def test_apply_reproduces_columns():
    h = assemble_sector(ModelParams(0.0, -1.0, 0.5, 0.3, 5, 3), 2)
    dense = h.to_dense()
    out = np.empty(h.dim, dtype=complex)
    for i in (0, 7, h.dim - 1):
        e = np.zeros(h.dim)
        e[i] = 1.0
        assert np.array_equal(h.apply(e), dense[:, i])
        assert h.apply(e, out=out) is out
    with pytest.raises(InvalidParameterError):
        h.apply(np.zeros(h.dim + 1))


def test_time_reversal_pairs_blocks():
    mp = ModelParams(0.0, -1.0, 0.5, 0.8, 6, 3)
    for j in range(1, 6):
        a = assemble_sector(mp, j).to_dense()
        b = assemble_sector(mp, 6 - j).to_dense()
        assert np.allclose(a, b.conj(), atol=1e-14)


def test_phonon_diagonal_and_norm_bound():
    # without coupling, hopping only reaches the diagonal for translation-invariant occupations
    mp = ModelParams(0.25, -1.0, 0.0, 0.0, 4, 3)
    h = assemble_sector(mp, 0)
    diag = h.to_dense().diagonal().real
    expected = 0.25 + h.sector.phonon_numbers.astype(float)
    expected[h.sector.vacuum_index()] += 2.0
    assert np.allclose(diag, expected, atol=1e-14)
    assert h.norm_estimate() >= np.abs(np.linalg.eigvalsh(h.to_dense())).max() - 1e-12


def test_mismatched_sector_is_rejected():
    with pytest.raises(BuildError):
        assemble(build_k_sector(4, 2, 0), ModelParams(0.0, -1.0, 0.1, 0.1, 4, 3))


def test_matrix_market_round_trip(tmp_path):
    h = assemble_sector(ModelParams(0.0, -1.0, 0.5, 0.3, 4, 2), 1)
    path = tmp_path / "block.mtx"
    h.write_matrix_market(path)
    back = scipy.io.mmread(str(path)).toarray()
    assert np.allclose(back, h.to_dense(), atol=1e-15)
