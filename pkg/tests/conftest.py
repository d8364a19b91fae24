# tests/conftest.py

import logging
from typing import List

import pytest
from faker import Faker

from app.schemas.counts import PairedCounts

# ======================================================================================
# Logging Configuration
# ======================================================================================
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

fake = Faker()
Faker.seed(12345)

# Weiner et al. coronary artery disease data, x1..x8
WEINER = (473, 81, 29, 25, 22, 44, 46, 151)
# Roldán Nofuentes et al. data used in the worked example of the global test
ROLDAN = (152, 17, 7, 36, 25, 10, 11, 290)


# ======================================================================================
# Helper Functions
# ======================================================================================
def make_random_tables(count: int, low: int = 1, high: int = 300) -> List[PairedCounts]:
    """
    Reproducible nondegenerate tables: every cell drawn uniformly from [low, high].

    With low >= 1 all margins and predictive values are positive and strictly
    below one, so every statistic is defined.
    """
    return [
        PairedCounts.from_sequence([fake.random_int(min=low, max=high) for _ in range(8)])
        for _ in range(count)
    ]


# ======================================================================================
# Fixtures
# ======================================================================================
@pytest.fixture
def weiner() -> PairedCounts:
    return PairedCounts.from_sequence(WEINER)


@pytest.fixture
def roldan() -> PairedCounts:
    return PairedCounts.from_sequence(ROLDAN)


@pytest.fixture(scope="session")
def random_tables() -> List[PairedCounts]:
    """200 random nondegenerate tables shared by the property tests."""
    tables = make_random_tables(200)
    logger.info(f"Generated {len(tables)} random tables")
    return tables


@pytest.fixture(scope="session")
def many_random_tables() -> List[PairedCounts]:
    """500 random tables for the symmetry suites."""
    return make_random_tables(500)
