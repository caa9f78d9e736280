# config/settings.py
from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    # Logging (always written to stderr; stdout carries artifacts only)
    LOG_LEVEL: str = "WARNING"

    # Register parsing
    STRICT_REGISTER: bool = True  # reject unknown keys unless --lenient

    # Monte Carlo success prediction
    DEFAULT_TRIALS: int = 100_000
    DEFAULT_SEED: int = 0
    MC_CHUNK_SIZE: int = 50_000  # rows of draws generated per chunk

    # Export
    DOT_GRAPH_NAME: str = ""  # empty emits an anonymous digraph
    REPORT_WIDTH: int = 80

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"  # Allow extra fields from .env

settings = Settings()
