import os
from dataclasses import dataclass
from pathlib import Path

from mposym.errors import ParameterError

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0
DEFAULT_CAP = 2**12
MIN_CAP = 2**4

# Idempotent lifting
NEWTON_MAX_ITER = 64
NEWTON_TOL = 1e-12

# Eigenvalue clustering for generic-element splitting, relative to the spectral scale
CLUSTER_TOL = 1e-3
SPLIT_ATTEMPTS = 8
INVARIANCE_TOL = 1e-7
MAX_CONDITION = 1e8

# Integrality threshold for fusion multiplicities
INTEGRALITY_TOL = 1e-6

# Smallest eigenvalue accepted for a positive density matrix
POSITIVITY_TOL = 1e-10

ENV_PREFIX = "MPOSYM_"


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command: tolerance, seed, contraction cap and output."""

    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    cap: int = DEFAULT_CAP
    out: Path | None = None
    as_json: bool = True
    debug: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError(f"tolerance must be positive, got {self.tol}")
        if self.cap < MIN_CAP:
            raise ParameterError(f"contraction cap must be at least {MIN_CAP}, got {self.cap}")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a config from MPOSYM_* environment variables, then apply explicit overrides."""
        from dotenv import load_dotenv

        load_dotenv()
        values = {}
        try:
            if tol := os.getenv(f"{ENV_PREFIX}TOL"):
                values["tol"] = float(tol)
            if seed := os.getenv(f"{ENV_PREFIX}SEED"):
                values["seed"] = int(seed)
            if cap := os.getenv(f"{ENV_PREFIX}CAP"):
                values["cap"] = int(cap)
        except ValueError as e:
            raise ParameterError(f"Invalid {ENV_PREFIX}* environment value: {e}") from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def echo(self) -> dict:
        return {
            "tol": self.tol,
            "seed": self.seed,
            "cap": self.cap,
            "out": str(self.out) if self.out else None,
        }
