from pydantic_settings import BaseSettings
from functools import lru_cache
from typing import Optional

class Settings(BaseSettings):
    # Reprodutibilidade
    NSZOO_SEED: Optional[int] = None  # Sobrepõe --seed quando definido
    DEFAULT_SEED: int = 0

    # Modelos finitos de dois níveis
    MODEL_MAX_DOMAIN: int = 4
    MODEL_MAX_LEVEL: int = 2
    MODEL_SEQ_LEN: int = 1
    MODEL_MAX_ENUM: int = 20000
    SOUNDNESS_BUDGET: int = 1000
    SOUNDNESS_MAX_PASSES: int = 16  # Reamostragens por instância até cobrir a cota
    INTERPRETATION_BUDGET: int = 64

    # Logging
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True

@lru_cache()
def get_settings():
    return Settings()

def resolve_seed(seed: Optional[int] = None) -> int:
    """Semente efetiva: NSZOO_SEED tem prioridade sobre a opção de linha de comando"""
    settings = get_settings()
    if settings.NSZOO_SEED is not None:
        return settings.NSZOO_SEED
    if seed is not None:
        return seed
    return settings.DEFAULT_SEED
