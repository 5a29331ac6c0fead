"""Parameter sweeps, transition location and truncation-convergence tables.

Every reported energy is in units of hbar*omega_ph with the on-site energy
eps_e removed. Quasimomenta are labelled by the sector index j, K = 2 pi j / N
folded into (-pi, pi].
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .basis import k_label, k_value
from .eigensolver import DEFAULT_TOL, lanczos_ground, observables
from .exceptions import ConvergenceError, InvalidParameterError, NoTransitionError
from .hamiltonian import assemble_sector
from .params import ModelParams

log = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-8


def point_seed(base_seed, point, j):
    """Deterministic per-(point, sector) seed, independent of scheduling."""
    return int(np.random.SeedSequence([int(base_seed), int(point), int(j)]).generate_state(1)[0])


@dataclass(frozen=True)
class ScanPoint:
    knob: float
    n_sites: int
    max_phonons: int
    t_e: float
    eps_e: float
    g_p: float
    g_b: float
    sector_energies: dict  # sector label j in (-N/2, N/2] -> lowest energy
    k_gs_label: int
    e_gs: float
    mean_phonons: float
    bare_overlap: float
    seed: int
    residuals: dict = field(default_factory=dict)

    @property
    def k_gs(self):
        return 2.0 * np.pi * self.k_gs_label / self.n_sites

    @property
    def k_gs_over_pi(self):
        return 2.0 * self.k_gs_label / self.n_sites

    @property
    def binding_energy(self):
        """E_gs relative to the bare band minimum -2|t_e|."""
        return self.e_gs + 2.0 * abs(self.t_e)

    def energy_at(self, label):
        return self.sector_energies[label]

    def degenerate_labels(self, rtol=DEGENERACY_RTOL):
        thr = rtol * max(1.0, abs(self.e_gs))
        return sorted(j for j, e in self.sector_energies.items() if e - self.e_gs <= thr)

    def k_continuum(self):
        """Parabolic estimate of the band-minimum position from the lowest
        sector and its two neighbours, returned as K/pi in [0, 1]."""
        n = self.n_sites
        j0 = self.k_gs_label
        e = [self.sector_energies[k_label(j, n)] for j in (j0 - 1, j0, j0 + 1)]
        curv = e[0] - 2 * e[1] + e[2]
        shift = 0.0 if curv <= 0 else 0.5 * (e[0] - e[2]) / curv
        return float(min(1.0, abs(2.0 * (j0 + shift) / n)))

    def as_dict(self):
        return {
            "knob": self.knob,
            "n_sites": self.n_sites,
            "max_phonons": self.max_phonons,
            "t_e": self.t_e,
            "eps_e": self.eps_e,
            "g_p": self.g_p,
            "g_b": self.g_b,
            "sector_energies": {str(j): e for j, e in sorted(self.sector_energies.items())},
            "K_gs_over_pi": self.k_gs_over_pi,
            "K_continuum_over_pi": self.k_continuum(),
            "E_gs": self.e_gs,
            "E_minus_offset": self.binding_energy,
            "mean_phonons": self.mean_phonons,
            "bare_overlap": self.bare_overlap,
            "degenerate_K_over_pi": [2.0 * j / self.n_sites for j in self.degenerate_labels()],
            "seed": self.seed,
        }


@dataclass(frozen=True)
class TransitionReport:
    knob_critical: float
    bracket: tuple
    k_before_over_pi: float
    k_after_over_pi: float
    steps: int
    crossing: float = None
    points: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "knob_critical": self.knob_critical,
            "knob_crossing": self.crossing,
            "bracket": list(self.bracket),
            "K_before_over_pi": self.k_before_over_pi,
            "K_after_over_pi": self.k_after_over_pi,
            "bisection_steps": self.steps,
        }


def select_ground(energies, n_sites, rtol=DEGENERACY_RTOL):
    """Ground sector label; among near-degenerate minima prefer smallest |K|, then K > 0."""
    e_min = min(energies.values())
    thr = rtol * max(1.0, abs(e_min))
    cands = [j for j, e in energies.items() if e - e_min <= thr]
    return min(cands, key=lambda j: (abs(j), -j))


def _default_threads(threads):
    return threads or os.cpu_count() or 1


def _solve_sector(mp, j, seed, tol):
    h = assemble_sector(mp, j)
    eig = lanczos_ground(h, tol=tol, seed=seed)
    return h, eig


def solve_point(mp, knob=0.0, point=0, seed=0, tol=DEFAULT_TOL, threads=1, pool=None):
    """Lowest energy of every momentum sector and ground-state data at one point."""
    n = mp.n_sites
    seeds = {j: point_seed(seed, point, j) for j in range(n)}

    def job(j):
        try:
            return _solve_sector(mp, j, seeds[j], tol)
        except ConvergenceError as exc:
            raise ConvergenceError(f"point {point}, sector j={j}: {exc}", best=exc.best) from exc

    if pool is not None:
        results = list(pool.map(job, range(n)))
    elif threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, range(n)))
    else:
        results = [job(j) for j in range(n)]

    energies, residuals = {}, {}
    for j, (h, eig) in enumerate(results):
        energies[k_label(j, n)] = eig.energy - mp.eps_e
        residuals[k_label(j, n)] = eig.residual
    gs = select_ground(energies, n)
    h, eig = results[gs % n]
    obs = observables(h, eig)
    return ScanPoint(
        knob=float(knob),
        n_sites=n,
        max_phonons=mp.max_phonons,
        t_e=mp.t_e,
        eps_e=mp.eps_e,
        g_p=mp.g_p,
        g_b=mp.g_b,
        sector_energies=energies,
        k_gs_label=gs,
        e_gs=energies[gs],
        mean_phonons=obs.mean_phonon_number,
        bare_overlap=obs.bare_overlap,
        seed=int(seed),
        residuals=residuals,
    )


def lambda_model(lam, mp_base):
    """Equal-coupling model at effective coupling ``lam`` with the base band."""
    return ModelParams.sweet_spot(lam, mp_base.t_e, mp_base.n_sites, mp_base.max_phonons, mp_base.eps_e)


def rabi_model(rabi, p, n_sites, max_phonons):
    """Model at Rabi frequency ``rabi`` with the array's detuning held fixed."""
    return ModelParams.from_physical(p.with_rabi(rabi), n_sites, max_phonons)


def _sweep(models, knobs, seed, tol, threads):
    threads = _default_threads(threads)
    out = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for i, (knob, mp) in enumerate(zip(knobs, models)):
            log.info("point %d/%d knob=%g", i + 1, len(knobs), knob)
            out.append(solve_point(mp, knob=knob, point=i, seed=seed, tol=tol, pool=pool))
    return out


def sweep_lambda(grid, mp_base, seed=0, tol=DEFAULT_TOL, threads=1):
    """Ground data along the equal-coupling line, g = sqrt(lam |t_e| / 3)."""
    grid = [float(x) for x in grid]
    return _sweep([lambda_model(x, mp_base) for x in grid], grid, seed, tol, threads)


def sweep_rabi(grid, p, n_sites, max_phonons, seed=0, tol=DEFAULT_TOL, threads=1):
    """Ground data versus Rabi frequency at fixed (sweet-spot) detuning.

    alpha = rabi / detuning is recomputed at every point, so t_e, eps_e and g
    all change along the sweep.
    """
    grid = [float(x) for x in grid]
    return _sweep([rabi_model(x, p, n_sites, max_phonons) for x in grid], grid, seed, tol, threads)


def transitions(points):
    """Indices i where K_gs differs between points i-1 and i."""
    return [i for i in range(1, len(points)) if points[i].k_gs_label != points[i - 1].k_gs_label]


def sector_energy(mp, label, seed=0, point=0, tol=DEFAULT_TOL):
    """Lowest eigenvalue of one sector, eps_e removed."""
    j = label % mp.n_sites
    _, eig = _solve_sector(mp, j, point_seed(seed, point, j), tol)
    return eig.energy - mp.eps_e


def find_critical(knob_lo, knob_hi, resolution, model, seed=0, tol=DEFAULT_TOL, threads=1, refine=False):
    """Bisect on the knob for the point where the ground sector changes.

    ``model`` maps a knob value to :class:`ModelParams`. With ``refine`` the
    crossing of the two competing sector energies inside the final bracket is
    also located by Brent's method and stored as ``crossing``.
    """
    if not knob_lo < knob_hi:
        raise InvalidParameterError(f"need knob_lo < knob_hi, got {knob_lo} >= {knob_hi}")
    if resolution <= 0:
        raise InvalidParameterError("resolution must be positive")
    threads = _default_threads(threads)
    points = []
    with ThreadPoolExecutor(max_workers=threads) as pool:

        def at(x):
            pt = solve_point(model(x), knob=x, point=len(points), seed=seed, tol=tol, pool=pool)
            points.append(pt)
            return pt

        lo, hi = float(knob_lo), float(knob_hi)
        p_lo, p_hi = at(lo), at(hi)
        if p_lo.k_gs_label == p_hi.k_gs_label:
            raise NoTransitionError(
                f"K_gs/pi = {p_lo.k_gs_over_pi:g} at both ends of [{lo:g}, {hi:g}]"
            )
        k_before = p_lo.k_gs_label
        steps = 0
        while hi - lo >= resolution:
            mid = 0.5 * (lo + hi)
            pm = at(mid)
            steps += 1
            if pm.k_gs_label == k_before:
                lo, p_lo = mid, pm
            else:
                hi, p_hi = mid, pm
            log.info("bisection step %d: [%g, %g]", steps, lo, hi)
    crossing = None
    if refine:
        a, b = p_lo.k_gs_label, p_hi.k_gs_label

        def gap(x):
            mp = model(x)
            return sector_energy(mp, b, seed, tol=tol) - sector_energy(mp, a, seed, tol=tol)

        crossing = scipy.optimize.brentq(gap, lo, hi, xtol=1e-12, rtol=1e-13)
    return TransitionReport(
        crossing=crossing,
        knob_critical=0.5 * (lo + hi),
        bracket=(lo, hi),
        k_before_over_pi=p_lo.k_gs_over_pi,
        k_after_over_pi=p_hi.k_gs_over_pi,
        steps=steps,
        points=points,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n_sites: int
    max_phonons: int
    e_gs: float
    k_gs_over_pi: float
    rel_change_m: float  # vs previous M at the same N, nan for the first
    rel_change_n: float  # vs previous N at the same M, nan for the first
    variational_ok: bool
    flagged: bool


def convergence_study(n_list, m_list, mp, seed=0, tol=DEFAULT_TOL, threshold=1e-3, threads=1):
    """E_gs over an (N, M) grid at fixed couplings.

    ``variational_ok`` is False when the energy rises on increasing M;
    ``flagged`` marks relative changes above ``threshold``.
    """
    if not n_list or not m_list:
        raise InvalidParameterError("n_list and m_list must be non-empty")
    n_list, m_list = sorted(n_list), sorted(m_list)
    table = {}
    for n in n_list:
        for m in m_list:
            mp_nm = ModelParams(mp.eps_e, mp.t_e, mp.g_p, mp.g_b, n, m)
            table[n, m] = solve_point(mp_nm, knob=0.0, seed=seed, tol=tol, threads=threads)
    rows = []
    for a, n in enumerate(n_list):
        for b, m in enumerate(m_list):
            pt = table[n, m]
            dm = dn = float("nan")
            ok = True
            if b > 0:
                prev = table[n, m_list[b - 1]].e_gs
                dm = abs(pt.e_gs - prev) / max(abs(pt.e_gs), 1e-300)
                ok = pt.e_gs <= prev + 1e-9 * max(1.0, abs(prev))
            if a > 0:
                prev = table[n_list[a - 1], m].e_gs
                dn = abs(pt.e_gs - prev) / max(abs(pt.e_gs), 1e-300)
            flagged = bool((dm == dm and dm > threshold) or (dn == dn and dn > threshold))
            rows.append(ConvergenceRow(n, m, pt.e_gs, pt.k_gs_over_pi, dm, dn, ok, flagged))
    return rows


def k_grid_over_pi(n_sites):
    return [k_value(j, n_sites) / np.pi for j in range(n_sites)]
