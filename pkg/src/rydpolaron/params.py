"""Map tweezer-array parameters onto the dimensionless excitation-phonon model.

All frequencies are angular frequencies in rad/s, lengths in metres, energies
in joules unless a function says it returns units of hbar*omega_ph.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

from scipy.constants import hbar

from .exceptions import (
    DomainError,
    InvalidParameterError,
    SingularGeometryError,
    SingularParameterError,
)

#: Dipolar constant of the 80S/80P pair of 87Rb, 2*pi*hbar x 40 GHz um^3.
C3_RB87_N80 = 2 * math.pi * hbar * 40e9 * 1e-18
#: 87Rb atomic mass in kg.
MASS_RB87 = 1.4432e-25

SINGULAR_BAND = 1e-9
ALPHA_RANGE = (0.01, 0.1)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory knobs of the dressed tweezer array.

    ``rabi`` is informational; the model only sees ``alpha``. When it is left
    as ``None`` it is filled in as ``alpha * detuning``.
    """

    alpha: float
    detuning: float
    spacing: float
    omega_ph: float
    c3: float = C3_RB87_N80
    mass: float = MASS_RB87
    rabi: float = field(default=None)

    def __post_init__(self):
        for name in ("alpha", "detuning", "spacing", "omega_ph", "c3", "mass"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.spacing <= 0:
            raise InvalidParameterError("spacing must be positive")
        if self.mass <= 0:
            raise InvalidParameterError("mass must be positive")
        if self.omega_ph <= 0:
            raise InvalidParameterError("omega_ph must be positive")
        if self.c3 <= 0:
            raise InvalidParameterError("c3 must be positive")
        if self.detuning == 0:
            raise InvalidParameterError("detuning must be nonzero")
        if self.alpha < 0:
            raise InvalidParameterError("alpha must be non-negative")
        if self.alpha > 0 and not ALPHA_RANGE[0] <= self.alpha <= ALPHA_RANGE[1]:
            warnings.warn(
                f"alpha={self.alpha:g} outside the weak-dressing range {ALPHA_RANGE}",
                stacklevel=3,
            )
        _check_nonsingular(self.zeta)
        if self.rabi is None:
            object.__setattr__(self, "rabi", self.alpha * self.detuning)

    @property
    def zeta(self):
        return zeta(self.c3, self.detuning, self.spacing)

    @property
    def phonon_energy(self):
        """hbar*omega_ph in joules."""
        return hbar * self.omega_ph

    @classmethod
    def sweet_spot(cls, alpha, spacing, omega_ph, c3=C3_RB87_N80, mass=MASS_RB87):
        """Parameters with the detuning placed at the g_P = g_B sweet spot."""
        return cls(
            alpha=alpha,
            detuning=sweet_spot_detuning(c3, spacing),
            spacing=spacing,
            omega_ph=omega_ph,
            c3=c3,
            mass=mass,
        )

    def with_rabi(self, rabi):
        """Same array, dressing parameter recomputed as rabi / detuning."""
        return replace(self, alpha=rabi / self.detuning, rabi=rabi)


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless lattice model; energies in units of hbar*omega_ph."""

    eps_e: float
    t_e: float
    g_p: float
    g_b: float
    n_sites: int
    max_phonons: int

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidParameterError("n_sites must be an integer >= 2")
        if int(self.max_phonons) != self.max_phonons or self.max_phonons < 0:
            raise InvalidParameterError("max_phonons must be an integer >= 0")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "max_phonons", int(self.max_phonons))
        for name in ("eps_e", "t_e", "g_p", "g_b"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @classmethod
    def from_physical(cls, p, n_sites, max_phonons):
        eps_e, t_e = bare_params(p)
        g_p, g_b = dimensionless_couplings(p)
        return cls(eps_e, t_e, g_p, g_b, n_sites, max_phonons)

    @classmethod
    def sweet_spot(cls, lam, t_e, n_sites, max_phonons, eps_e=0.0):
        """Equal couplings g = sqrt(lam |t_e| / 3), inverted from lam = 3 g^2 / |t_e|."""
        if lam < 0:
            raise InvalidParameterError("effective coupling must be non-negative")
        g = math.sqrt(lam * abs(t_e) / 3.0)
        return cls(eps_e, t_e, g, g, n_sites, max_phonons)

    @property
    def effective_lambda(self):
        """Sweet-spot closed form 3 g^2 / |t_e|; only meaningful when g_p == g_b."""
        return 3.0 * self.g_p**2 / abs(self.t_e)


def _check_nonsingular(z):
    if abs(1.0 - z * z) <= SINGULAR_BAND:
        raise SingularParameterError(f"|zeta| = {abs(z):.12g} is on the resonance |zeta| = 1")


def zeta(c3, detuning, spacing):
    """Dimensionless ratio C3 / (hbar * Delta * a^3)."""
    if spacing <= 0:
        raise InvalidParameterError("spacing must be positive")
    if detuning == 0:
        raise InvalidParameterError("detuning must be nonzero")
    z = c3 / (hbar * detuning * spacing**3)
    if not math.isfinite(z):
        raise InvalidParameterError("zeta is not finite")
    return z


def sweet_spot_zeta():
    """Positive root of 3 z^2 - z - 1 = 0, where g_P = g_B."""
    return (1.0 + math.sqrt(13.0)) / 6.0


def sweet_spot_detuning(c3, spacing):
    if spacing <= 0:
        raise InvalidParameterError("spacing must be positive")
    return c3 / (hbar * sweet_spot_zeta() * spacing**3)


def bare_params(p):
    """(eps_e, t_e) in units of hbar*omega_ph.

    For C3, Delta > 0 the hopping is negative when |zeta| < 1 and positive
    when |zeta| > 1.
    """
    z = p.zeta
    _check_nonsingular(z)
    a4 = p.alpha**4
    den = 1.0 - z * z
    eps_e = a4 * hbar * p.detuning / den
    t_e = -a4 * p.c3 / (p.spacing**3 * den)
    return eps_e / p.phonon_energy, t_e / p.phonon_energy


def coupling_constants(p):
    """Linear force constants (xi_B, xi_P) in newtons."""
    z = p.zeta
    _check_nonsingular(z)
    a4 = p.alpha**4
    den = (1.0 - z * z) ** 2
    xi_b = 3.0 * a4 * hbar * p.detuning * z * z / (p.spacing * den)
    xi_p = 3.0 * a4 * p.c3 * (3.0 * z * z - 1.0) / (p.spacing**4 * den)
    return xi_b, xi_p


def oscillator_force_scale(p):
    """(2 m hbar omega_ph^3)^(1/2), the force that makes a coupling dimensionless."""
    return math.sqrt(2.0 * p.mass * hbar * p.omega_ph**3)


def dimensionless_couplings(p):
    """(g_P, g_B)."""
    xi_b, xi_p = coupling_constants(p)
    scale = oscillator_force_scale(p)
    return xi_p / scale, xi_b / scale


def lambda_ss_physical(p, rtol=1e-9):
    """Closed-form effective coupling at the sweet spot.

    Raises DomainError unless ``p.zeta`` equals the sweet-spot value to
    ``rtol``.
    """
    zs = sweet_spot_zeta()
    if abs(p.zeta - zs) > rtol * zs:
        raise DomainError(f"zeta={p.zeta:.12g} is not the sweet spot {zs:.12g}")
    return (
        13.5
        * p.alpha**4
        * p.c3
        / (p.mass * p.omega_ph**2 * p.spacing**5)
        * (3 * zs**2 - 1) ** 2
        / (1 - zs**2) ** 3
    )


def _resonance(x, p, power):
    # 1 / {1 - zeta^2 (1 + x/a)^power}
    s = 1.0 + x / p.spacing
    if s <= 0:
        raise SingularGeometryError("bond length collapsed to zero")
    den = 1.0 - p.zeta**2 * s**power
    if abs(den) <= SINGULAR_BAND:
        raise SingularGeometryError(f"displacement {x:g} m hits the resonance")
    return 1.0 / den


def exact_onsite(u_prev, u_n, u_next, p, power=6):
    """Full nonlinear on-site energy (J) for displacements of sites n-1, n, n+1.

    ``power`` is the exponent applied to the relative bond stretch inside the
    resonance factor. The default +6 is the form whose first-order expansion
    gives ``coupling_constants``; pass -6 for the variant scaling as the
    inverse sixth power of the stretched bond.
    """
    pref = 0.5 * p.alpha**4 * hbar * p.detuning
    return pref * (_resonance(u_next - u_n, p, power) + _resonance(u_n - u_prev, p, power))


def exact_hopping(u_n, u_next, p, power=6):
    """Full nonlinear hopping amplitude (J) across the bond (n, n+1)."""
    x = u_next - u_n
    res = _resonance(x, p, power)
    return p.alpha**4 * p.c3 / (p.spacing + x) ** 3 * res
