import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skewflow.core import CocycleSpec
from skewflow.signal_space import constant

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def scalar_exp(rate: float, label: str = "") -> CocycleSpec:
    """Phi(t, s) = e^{rate (t - s)} on R^1, with a log rule."""
    return CocycleSpec(
        1,
        lambda t, s, x: np.exp(rate * (np.asarray(t) - np.asarray(s)))[..., None, None],
        constant(1.0),
        label=label or f"exp({rate}u)",
        log_rule=lambda t, s, x: (rate * (np.asarray(t, float) - np.asarray(s, float)))[..., None],
    )


def diag_exp(rates, log_rule: bool = True) -> CocycleSpec:
    rates = np.asarray(rates, float)

    def logs(t, s, x):
        u = np.asarray(t, float) - np.asarray(s, float)
        return u[..., None] * rates

    def rule(t, s, x):
        lg = logs(t, s, x)
        out = np.zeros(lg.shape + (rates.size,))
        idx = np.arange(rates.size)
        out[..., idx, idx] = np.exp(lg)
        return out

    return CocycleSpec(rates.size, rule, constant(1.0), label=f"diag{rates.tolist()}",
                       log_rule=logs if log_rule else None)


@pytest.fixture
def scalar():
    return scalar_exp
