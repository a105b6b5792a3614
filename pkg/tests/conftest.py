"""
conftest.py

Pytest configuration shared by every test module.
"""
import pytest

from src.utils.logger import reset_logger


@pytest.fixture(autouse=True)
def release_log_files():
    """Close the file handlers a test attached to the package logger."""
    yield
    reset_logger()
