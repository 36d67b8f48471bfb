import pytest
from hypothesis import settings as hypothesis_settings

from trig_inverse.config import Settings

# First calls per modulus fill the character and lambda caches
hypothesis_settings.register_profile("trig_inverse", deadline=None, max_examples=200)
hypothesis_settings.load_profile("trig_inverse")


@pytest.fixture
def settings() -> Settings:
    return Settings()


SQUAREFREE_UP_TO_200 = [n for n in range(3, 201) if all(n % (p * p) for p in range(2, 15))]
