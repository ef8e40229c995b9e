"""
Runtime Settings

Environment-driven defaults for the toolkit. Values come from the process
environment, optionally seeded from a ``.env`` file.
"""

import os
import logging
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """Process-wide defaults; command-line flags override them per run."""

    threads: int = 1
    tol: float = 1e-10
    grid: int = 512
    output_dir: Path = Path("data/results")

    @classmethod
    def from_env(cls) -> "Settings":
        """
        Read settings from the environment.

        Returns:
            Settings with environment overrides applied

        Raises:
            ValueError: If a variable is set but cannot be parsed or is out of range
        """
        load_dotenv()

        threads = _read("VORTEX_SPECTRA_THREADS", int, cls.threads)
        tol = _read("VORTEX_SPECTRA_TOL", float, cls.tol)
        grid = _read("VORTEX_SPECTRA_GRID", int, cls.grid)
        output_dir = Path(os.getenv("VORTEX_SPECTRA_OUTPUT_DIR", str(cls.output_dir)))

        if threads < 1:
            raise ValueError(f"VORTEX_SPECTRA_THREADS must be >= 1, got {threads}")
        if tol <= 0:
            raise ValueError(f"VORTEX_SPECTRA_TOL must be positive, got {tol}")
        if grid < 16:
            raise ValueError(f"VORTEX_SPECTRA_GRID must be >= 16, got {grid}")

        logger.debug(f"Settings: threads={threads}, tol={tol}, grid={grid}, output_dir={output_dir}")
        return cls(threads=threads, tol=tol, grid=grid, output_dir=output_dir)


def _read(name, cast, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ValueError(f"{name} must be {cast.__name__}, got {raw!r}")
