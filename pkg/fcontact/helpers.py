from .constants import *
from .exceptions import ConfigError
import os


def _from_environment(key_name, cast):
    raw = os.environ[key_name]
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"Environment variable {key_name} has malformed value {raw!r}") from None


def get_sample_count(samples):
    """
    Helper function to get `samples` from passed variable or environment variable
    """
    if samples is not None:
        _samples = int(samples)
    elif FCONTACT_SAMPLES_KEY_NAME in os.environ:
        _samples = _from_environment(FCONTACT_SAMPLES_KEY_NAME, int)
    else:
        _samples = DEFAULT_SAMPLE_COUNT
    if _samples < 1:
        raise ConfigError(f"Sample count must be positive, got {_samples}")
    return _samples


def get_seed(seed):
    """
    Helper function to get `seed` from passed variable or environment variable
    """
    if seed is not None:
        _seed = int(seed)
    elif FCONTACT_SEED_KEY_NAME in os.environ:
        _seed = _from_environment(FCONTACT_SEED_KEY_NAME, int)
    else:
        _seed = DEFAULT_SEED
    return _seed


def get_tolerance(tol):
    """
    Helper function to get `tol` from passed variable or environment variable
    """
    if tol is not None:
        _tol = float(tol)
    elif FCONTACT_TOLERANCE_KEY_NAME in os.environ:
        _tol = _from_environment(FCONTACT_TOLERANCE_KEY_NAME, float)
    else:
        _tol = DEFAULT_TOLERANCE
    if not _tol > 0:
        raise ConfigError(f"Tolerance must be positive, got {_tol}")
    return _tol
