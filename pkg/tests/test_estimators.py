import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from eitsim.estimators import TransmittanceRegressor


def small(**kw):
    kw.setdefault("nodes", 256)
    kw.setdefault("doppler_width", 10.0)
    return TransmittanceRegressor(**kw)


def test_params_round_trip():
    est = small(model="three")
    p = est.get_params()
    assert p["model"] == "three" and p["nodes"] == 256
    c = clone(est)
    assert c.get_params() == p
    c.set_params(length=2.0)
    assert c.length == 2.0


def test_fit_recovers_scale():
    X = np.linspace(-60, 60, 121)[:, None]
    truth = small()
    od = truth.transform(X)
    y = np.exp(-2.5 * od)
    est = small().fit(X, y)
    assert est.od_scale_ == pytest.approx(2.5, rel=1e-6)
    np.testing.assert_allclose(est.predict(X), y, atol=1e-8)
    assert est.score(X, y) == pytest.approx(1.0)


def test_not_fitted_and_shape_errors():
    X = np.zeros((5, 1))
    with pytest.raises(NotFittedError):
        small().predict(X)
    with pytest.raises(ValueError):
        small().fit(np.zeros((5, 2)), np.zeros(5))
    with pytest.raises(ValueError):
        small().fit(X, np.zeros(4))
