import numpy as np
import pytest

from cli.error_handler import EXIT_CONFIG, EXIT_FAILURE, EXIT_NUMERICAL, handle_cli_error
from core.exceptions import (
    ConfigError,
    DataFormatError,
    DegenerateChain,
    InvalidRange,
    NotPositiveDefinite,
    OutOfHull,
)


@pytest.mark.parametrize(
    "error,code",
    [
        (ConfigError("bad"), EXIT_CONFIG),
        (DataFormatError("bad"), EXIT_CONFIG),
        (OutOfHull("bad"), EXIT_CONFIG),
        (FileNotFoundError("gone"), EXIT_CONFIG),
        (InvalidRange("bad"), EXIT_CONFIG),
        (NotPositiveDefinite("pivot"), EXIT_NUMERICAL),
        (DegenerateChain("flat"), EXIT_NUMERICAL),
        (np.linalg.LinAlgError("lapack"), EXIT_NUMERICAL),
        (RuntimeError("boom"), EXIT_FAILURE),
    ],
)
def test_exit_codes(error, code):
    message, exit_code = handle_cli_error(error, "fit")
    assert exit_code == code
    assert str(error) in message
