"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration and file-format
problems exit with 2, numerical failures (rank collapse, empty spectra)
with 3.
"""


class GridfrError(Exception):
    """Base class for all gridfr errors."""


class ConfigError(GridfrError, ValueError):
    """Invalid parameter or experiment configuration."""


class FormatError(GridfrError, ValueError):
    """Malformed raster/sample/image file."""


class NumericalError(GridfrError, RuntimeError):
    """Numerical failure such as rank collapse or an all-zero operator."""
