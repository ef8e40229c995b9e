from pathlib import Path

import pytest

from src.config import Settings

VARIABLES = (
    "VORTEX_SPECTRA_THREADS",
    "VORTEX_SPECTRA_TOL",
    "VORTEX_SPECTRA_GRID",
    "VORTEX_SPECTRA_OUTPUT_DIR",
)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    # Keep a developer's .env out of the way
    monkeypatch.chdir(tmp_path)
    for name in VARIABLES:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    settings = Settings.from_env()
    assert settings.threads == 1
    assert settings.tol == 1e-10
    assert settings.grid == 512
    assert settings.output_dir == Path("data/results")


def test_environment_overrides(clean_env):
    clean_env.setenv("VORTEX_SPECTRA_THREADS", "4")
    clean_env.setenv("VORTEX_SPECTRA_TOL", "1e-8")
    clean_env.setenv("VORTEX_SPECTRA_GRID", "256")
    clean_env.setenv("VORTEX_SPECTRA_OUTPUT_DIR", "out")
    settings = Settings.from_env()
    assert (settings.threads, settings.tol, settings.grid) == (4, 1e-8, 256)
    assert settings.output_dir == Path("out")


def test_blank_value_uses_default(clean_env):
    clean_env.setenv("VORTEX_SPECTRA_GRID", " ")
    assert Settings.from_env().grid == 512


def test_dotenv_file(clean_env, tmp_path):
    (tmp_path / ".env").write_text("VORTEX_SPECTRA_THREADS=3\n")
    assert Settings.from_env().threads == 3


@pytest.mark.parametrize(
    "name, value",
    [
        ("VORTEX_SPECTRA_THREADS", "0"),
        ("VORTEX_SPECTRA_THREADS", "many"),
        ("VORTEX_SPECTRA_TOL", "-1"),
        ("VORTEX_SPECTRA_GRID", "8"),
    ],
)
def test_invalid_values(clean_env, name, value):
    clean_env.setenv(name, value)
    with pytest.raises(ValueError):
        Settings.from_env()
