import pytest

from distribution import (
    BetaFamily,
    BinomialFamily,
    GammaFamily,
    HypergeometricFamily,
    LaplaceFamily,
    NormalFamily,
    PoissonFamily,
    make_builtin,
)
from numerics import QuadratureConfig

EXACT = QuadratureConfig(exact=True)


@pytest.fixture(scope="session")
def exact_cfg():
    return EXACT


@pytest.fixture(scope="session")
def normal():
    return make_builtin(NormalFamily(mu=0.0, sigma2=1.0))


@pytest.fixture(scope="session")
def beta():
    return make_builtin(BetaFamily(alpha=2.0, beta=3.0))


@pytest.fixture(scope="session")
def gamma():
    return make_builtin(GammaFamily(alpha=1.3, beta=2.4))


@pytest.fixture(scope="session")
def laplace():
    return make_builtin(LaplaceFamily())


@pytest.fixture(scope="session")
def binomial():
    """Binomial(10, 1/2); pair with ``exact_cfg`` for rational arithmetic"""
    return make_builtin(BinomialFamily(n=10, p=0.5))


@pytest.fixture(scope="session")
def binomial20():
    return make_builtin(BinomialFamily(n=20, p=0.2))


@pytest.fixture(scope="session")
def poisson():
    return make_builtin(PoissonFamily(lam=3.0))


@pytest.fixture(scope="session")
def hypergeometric():
    return make_builtin(HypergeometricFamily(N=50, K=10, n=8))
