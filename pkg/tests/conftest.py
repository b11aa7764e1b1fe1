import numpy as np
import pytest

from pwlcones import EigenTriple, PwlSystem, example_system


@pytest.fixture(scope="session")
def ex1() -> PwlSystem:
    return example_system(1)


@pytest.fixture(scope="session")
def ex2() -> PwlSystem:
    return example_system(2)


@pytest.fixture(scope="session")
def symmetric_center() -> PwlSystem:
    # both shape ratios zero, zero real eigenvalues, unit rotation rates
    zone = EigenTriple(lam=0.0, alpha=0.0, beta=1.0)
    return PwlSystem.from_eigen(minus=zone, plus=zone)


def random_focus_eigen(rng: np.random.Generator, lam_scale=2.0, beta_range=(0.3, 2.0)) -> EigenTriple:
    return EigenTriple(
        lam=float(rng.uniform(-lam_scale, lam_scale)),
        alpha=float(rng.uniform(-lam_scale, lam_scale)),
        beta=float(rng.uniform(*beta_range)),
    )
