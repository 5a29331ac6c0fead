"""scikit-learn style wrapper: knob values in, sector spectra and K_gs out.

``X`` is a column of knob values (effective coupling or Rabi frequency).
``transform`` returns the lowest energy of every momentum sector with
columns ordered by K from -pi to pi; ``predict`` returns K_gs / pi.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .basis import k_label
from .eigensolver import DEFAULT_TOL
from .exceptions import InvalidParameterError
from .params import ModelParams
from .scan import lambda_model, rabi_model, solve_point


class PolaronSpectrum(TransformerMixin, BaseEstimator):
    """Momentum-resolved exact diagonalisation along one knob.

    Parameters
    ----------
    n_sites, max_phonons : int
        Ring length and total-phonon cap.
    knob : {"lambda", "rabi"}
        ``"lambda"`` moves along g_P = g_B at fixed ``t_e`` and ``eps_e``;
        ``"rabi"`` recomputes every model parameter from ``physical``.
    t_e, eps_e : float
        Bare band (units of hbar*omega_ph) for the ``"lambda"`` knob.
    physical : PhysicalParams, optional
        Array parameters for the ``"rabi"`` knob.
    """

    def __init__(
        self,
        n_sites=10,
        max_phonons=8,
        knob="lambda",
        t_e=-1.0,
        eps_e=0.0,
        physical=None,
        tol=DEFAULT_TOL,
        seed=0,
    ):
        self.n_sites = n_sites
        self.max_phonons = max_phonons
        self.knob = knob
        self.t_e = t_e
        self.eps_e = eps_e
        self.physical = physical
        self.tol = tol
        self.seed = seed

    def _model(self, x):
        if self.knob == "lambda":
            base = ModelParams(self.eps_e, self.t_e, 0.0, 0.0, self.n_sites, self.max_phonons)
            return lambda_model(x, base)
        if self.knob == "rabi":
            if self.physical is None:
                raise InvalidParameterError("knob='rabi' needs physical parameters")
            return rabi_model(x, self.physical, self.n_sites, self.max_phonons)
        raise InvalidParameterError(f"unknown knob {self.knob!r}")

    def _solve(self, X):
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single knob column, got {X.shape[1]}")
        cache = getattr(self, "_cache", {})
        out = []
        for i, x in enumerate(X[:, 0]):
            if x not in cache:
                cache[x] = solve_point(self._model(x), knob=x, point=i, seed=self.seed, tol=self.tol)
            out.append(cache[x])
        self._cache = cache
        return out

    def fit(self, X, y=None):
        self._cache = {}
        self._model(0.0)  # parameter validation
        self.points_ = self._solve(X)
        self.n_features_in_ = 1
        labels = sorted(k_label(j, self.n_sites) for j in range(self.n_sites))
        self.k_over_pi_ = np.array([2.0 * j / self.n_sites for j in labels])
        self._labels = labels
        return self

    def transform(self, X):
        check_is_fitted(self, "points_")
        pts = self._solve(X)
        return np.array([[p.sector_energies[j] for j in self._labels] for p in pts])

    def predict(self, X):
        check_is_fitted(self, "points_")
        return np.array([p.k_gs_over_pi for p in self._solve(X)])

    def ground_energy(self, X):
        check_is_fitted(self, "points_")
        return np.array([p.e_gs for p in self._solve(X)])
