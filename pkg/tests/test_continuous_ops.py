import numpy as np
import pytest
from scipy import stats

from metaforge import make_continuous
from metaforge.errors import EncodingMismatch
from metaforge.operators.continuous import (
    reinit_continuous,
    search_mu_cauchy,
    search_mu_gaussian,
    search_mu_polynomial,
    search_mu_uniform,
)

SPEC = make_continuous(4, -2.0, 2.0)


def test_gaussian_sigma_zero_is_identity():
    rng = np.random.default_rng(0)
    parents = SPEC.sample(10, rng)
    out = search_mu_gaussian(parents, None, SPEC, {"sigma": 0.0}, {}, rng)
    assert np.array_equal(out, parents)


def test_reinit_uniform_ks_test():
    """Kolmogorov-Smirnov oracle vs the uniform cdf at alpha = 0.01."""
    spec = make_continuous(1, 0.0, 1.0)
    rng = np.random.default_rng(42)
    out = reinit_continuous(np.zeros((10_000, 1)), None, spec, {}, {}, rng)
    assert np.all((out >= 0.0) & (out <= 1.0))
    stat, pvalue = stats.kstest(out.ravel(), "uniform")
    assert pvalue > 0.01


def test_polynomial_eta_controls_step_size():
    """Monte-Carlo oracle: mean |child - parent| shrinks as eta grows."""
    spec = make_continuous(1, 0.0, 1.0)
    parents = np.full((10_000, 1), 0.5)

    def mean_step(eta, seed):
        rng = np.random.default_rng(seed)
        out = search_mu_polynomial(parents, None, spec, {"eta": eta, "rate": 1.0}, {}, rng)
        return np.abs(out - parents).mean()

    assert mean_step(20.0, 1) < mean_step(2.0, 1)


def test_polynomial_rate_zero_identity():
    rng = np.random.default_rng(3)
    parents = SPEC.sample(10, rng)
    out = search_mu_polynomial(parents, None, SPEC, {"eta": 20.0, "rate": 0.0}, {}, rng)
    assert np.array_equal(out, parents)


def test_uniform_rate_semantics():
    spec = make_continuous(1, 0.0, 1.0)
    parents = np.full((20_000, 1), 0.25)
    rng = np.random.default_rng(9)
    out = search_mu_uniform(parents, None, spec, {"rate": 0.3}, {}, rng)
    changed = np.mean(out != parents)
    assert changed == pytest.approx(0.3, abs=0.02)


@pytest.mark.parametrize(
    "fn,params",
    [
        (search_mu_gaussian, {"sigma": 0.5}),
        (search_mu_cauchy, {"scale": 0.5}),
        (search_mu_polynomial, {"eta": 5.0, "rate": 1.0}),
        (search_mu_uniform, {"rate": 1.0}),
        (reinit_continuous, {}),
    ],
)
def test_offspring_clipped_to_bounds(fn, params):
    rng = np.random.default_rng(11)
    parents = SPEC.sample(200, rng)
    out = fn(parents, None, SPEC, params, {}, rng)
    assert SPEC.contains(out)
    assert out.shape == parents.shape


def test_continuous_ops_reject_discrete():
    from metaforge import make_discrete

    with pytest.raises(EncodingMismatch):
        search_mu_gaussian(
            np.zeros((4, 3), dtype=np.int64), None, make_discrete(3, 5), {"sigma": 0.1}, {},
            np.random.default_rng(0),
        )
