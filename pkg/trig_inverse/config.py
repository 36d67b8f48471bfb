from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Settings(BaseSettings):
    """Tolerances and runtime knobs."""
    # Character-sum identities (orthogonality, conductor-weighted sums)
    identity_tolerance: float = Field(1e-10, gt=0)
    # Matrix products: unitarity, diagonalization, reconstruction
    matrix_tolerance: float = Field(1e-8, gt=0)
    # Gauss sum reduction and product relation
    gauss_tolerance: float = Field(1e-9, gt=0)

    # Nonzero eigenvalues have modulus >= 1, so anything below this is zero
    zero_eigenvalue_tolerance: float = Field(1e-9, gt=0)

    # Elimination oracle, both relative to the largest entry of the matrix
    pivot_tolerance: float = Field(1e-12, gt=0)
    rank_tolerance: float = Field(1e-7, gt=0)

    # Relative tolerance for prod(eigenvalues) == det
    determinant_tolerance: float = Field(1e-6, gt=0)

    sweep_workers: int = Field(4, ge=1)
    log_level: str = "WARNING"
    schema_version: str = "1.0"

    model_config = SettingsConfigDict(extra="forbid", frozen=True)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # Everything comes from the command line; the environment is never read.
        return (init_settings,)


TOLERANCE_NAMES = (
    "identity_tolerance",
    "matrix_tolerance",
    "gauss_tolerance",
    "zero_eigenvalue_tolerance",
    "pivot_tolerance",
    "rank_tolerance",
    "determinant_tolerance",
)


@lru_cache()
def get_settings() -> Settings:
    """Cached settings to avoid reloading"""
    return Settings()
