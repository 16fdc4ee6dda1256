#!/usr/bin/env python3
"""
Pytest configuration and fixtures
"""

import numpy as np
import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from maxop.funcmodel import sawtooth, tent
from maxop.kernels import make_kernel
from maxop.models import Base


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: dense oracles and full continuity runs")


@pytest.fixture(scope="session")
def poisson():
    """Ядро Пуассона"""
    return make_kernel("poisson")


@pytest.fixture(scope="session")
def heat():
    """Тепловое ядро"""
    return make_kernel("heat")


@pytest.fixture(scope="session")
def fracpoisson():
    """Дробное ядро Пуассона с alpha=0.5"""
    return make_kernel("fracpoisson", 0.5)


@pytest.fixture
def tent_fn():
    """Единичная палатка на [-1, 1]"""
    return tent()


@pytest.fixture
def sawtooth_fn():
    """Пила из трёх зубцов на [0, 3]"""
    return sawtooth(teeth=3, width=1.0, start=0.0)


@pytest.fixture
def signed_sawtooth():
    """Знакопеременная пила"""
    return sawtooth(teeth=4, width=1.0, start=-2.0, signed=True)


@pytest.fixture
def tent_grid():
    """Равномерная сетка на [-3, 3]"""
    return np.linspace(-3.0, 3.0, 61)


@pytest.fixture
def test_db():
    """Создает in-memory SQLite базу для тестов"""
    engine = create_engine(
        "sqlite:///:memory:",
        poolclass=StaticPool,
        connect_args={"check_same_thread": False}
    )
    Base.metadata.create_all(engine)
    SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    session = SessionLocal()

    yield session

    session.close()
    engine.dispose()
