import warnings

import pytest

import reflectedwalk as rw


def standard_distributions():
    """The six cross-validation distributions used throughout the suite."""
    out = {}
    out["simple-walk"] = rw.make_family("explicit", 1, probs=[0.5, 0.0, 0.5])
    out["binomial"] = rw.make_family("binomial", 2, n=3, p=0.4)
    out["poisson"] = rw.make_family("poisson", 2, lam=1.2)
    out["geometric"] = rw.make_family("geometric", 1, p=0.5)
    with warnings.catch_warnings():
        # A identically s has P(A=0) = 0, which is accepted with a warning
        warnings.simplefilter("ignore", UserWarning)
        out["a-equals-s"] = rw.make_family("deterministic", 2, c=2)
    out["a-zero"] = rw.make_family("deterministic", 2, c=0)
    return out


@pytest.fixture(scope="session")
def dists():
    return standard_distributions()


@pytest.fixture(scope="session")
def simple(dists):
    return dists["simple-walk"]
