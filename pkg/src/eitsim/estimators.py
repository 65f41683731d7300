"""scikit-learn style wrapper: Doppler-averaged transmittance with one fitted OD scale.

Absolute optical depths depend on the density, the cell length and the
dipole moment, which are often not known well enough to compare with a
measured spectrum.  ``TransmittanceRegressor`` keeps the line shape fixed by
the physical parameters and fits a single multiplicative factor on the
optical depth.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .atomdata import CS133, cs_six_level_scheme, mhz
from .doppler import VelocityDistribution, average_chi, transmittance

__all__ = ["TransmittanceRegressor"]


class TransmittanceRegressor(RegressorMixin, BaseEstimator):
    """Probe transmittance versus probe detuning (cyclic MHz, one feature).

    ``fit`` estimates ``od_scale_``, the factor multiplying the model's
    optical depth that best reproduces the target transmittance in the
    least-squares sense.  ``transform`` returns the unscaled optical depth.

    Parameters are cyclic MHz except ``gamma_sg`` (units of gamma),
    ``n0`` (cm^-3) and ``length`` (cm).
    """

    def __init__(self, model="six", control_rabi=12.0, delta_c=0.0, doppler_width=100.0,
                 gamma_sg=1e-4, n0=1.1e10, length=1.0, nodes=2048, scale_bounds=(1e-4, 1e4)):
        self.model = model
        self.control_rabi = control_rabi
        self.delta_c = delta_c
        self.doppler_width = doppler_width
        self.gamma_sg = gamma_sg
        self.n0 = n0
        self.length = length
        self.nodes = nodes
        self.scale_bounds = scale_bounds

    def _scheme(self):
        return cs_six_level_scheme(mhz(self.control_rabi), mhz(self.delta_c),
                                   gamma_sg=self.gamma_sg * CS133.gamma)

    def _optical_depth(self, X):
        dp = mhz(np.asarray(X, dtype=float)[:, 0])
        dist = VelocityDistribution.gaussian(mhz(self.doppler_width), self.nodes)
        x = average_chi(self._scheme(), dist, dp, self.model, n0=self.n0)
        return -np.log(transmittance(dp, x, length=self.length).t)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected one feature (probe detuning), got {X.shape[1]}")
        od = self._optical_depth(X)

        def loss(log_a):
            return float(np.sum((np.exp(-np.exp(log_a) * od) - y) ** 2))

        lo, hi = np.log(self.scale_bounds)
        r = minimize_scalar(loss, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        self.od_scale_ = float(np.exp(r.x))
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        X = check_array(X)
        return self._optical_depth(X)

    def predict(self, X):
        check_is_fitted(self, "od_scale_")
        X = check_array(X)
        return np.exp(-self.od_scale_ * self._optical_depth(X))
