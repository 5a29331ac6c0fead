"""Momentum-space pieces of the model: bare band, vertex functions, effective coupling.

Quasimomenta are in units of the inverse lattice period. Energies are in
units of ``energy_unit`` (hbar*omega_ph), which defaults to 1.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateBandError, InvalidParameterError

DEFAULT_QUADRATURE_POINTS = 256


@dataclass(frozen=True)
class VertexParams:
    g_p: float
    g_b: float
    energy_unit: float = 1.0

    def __post_init__(self):
        if not all(np.isfinite([self.g_p, self.g_b, self.energy_unit])):
            raise InvalidParameterError("vertex parameters must be finite")


def bare_dispersion(k, eps_e, t_e):
    """eps_e - 2 t_e cos k; vectorised over ``k``."""
    return eps_e - 2.0 * t_e * np.cos(k)


def vertex(k, q, vp):
    """Excitation-phonon vertex for scattering k -> k+q with phonon q.

    Satisfies ``vertex(k, q) == conj(vertex(k + q, -q))``, which is what makes
    the momentum-space coupling Hermitian.
    """
    k = np.asarray(k, dtype=float)
    q = np.asarray(q, dtype=float)
    return 2j * vp.energy_unit * (vp.g_p * (np.sin(k) - np.sin(k + q)) - vp.g_b * np.sin(q))


def vertex_ss(k, q, g, energy_unit=1.0):
    """Vertex with equal couplings; vanishes identically at k = pi."""
    k = np.asarray(k, dtype=float)
    q = np.asarray(q, dtype=float)
    return 2j * g * energy_unit * (np.sin(k) - np.sin(q) - np.sin(k + q))


def bz_average_vertex_sq(vp, n_points=DEFAULT_QUADRATURE_POINTS):
    """Brillouin-zone average of |vertex|^2 by the periodic trapezoid rule.

    The integrand is a trigonometric polynomial of degree 2 in each variable,
    so any ``n_points >= 5`` is exact up to rounding.
    """
    if n_points < 1:
        raise InvalidParameterError("n_points must be positive")
    grid = -np.pi + 2.0 * np.pi * np.arange(n_points) / n_points
    kk, qq = np.meshgrid(grid, grid, indexing="ij")
    return float(np.mean(np.abs(vertex(kk, qq, vp)) ** 2))


def effective_lambda_quadrature(vp, t_e, n_points=DEFAULT_QUADRATURE_POINTS):
    """Effective coupling <|gamma|^2>_BZ / (2 |t_e| hbar omega_ph).

    ``t_e`` is in units of ``vp.energy_unit``, so the result is
    dimensionless and reduces to 3 g^2 / |t_e| for equal couplings.
    """
    if t_e == 0:
        raise DegenerateBandError("t_e = 0: the bare band is flat")
    avg = bz_average_vertex_sq(vp, n_points)
    return avg / (2.0 * abs(t_e) * vp.energy_unit**2)


def effective_lambda_ss(g, t_e):
    """Closed form 3 g^2 / |t_e| for equal couplings (t_e in hbar*omega_ph)."""
    if t_e == 0:
        raise DegenerateBandError("t_e = 0: the bare band is flat")
    return 3.0 * g * g / abs(t_e)
