"""Exact arithmetic for banded monads on products of projective spaces."""

__version__ = "0.1.0"

from .picard import Polarization, SpaceSpec  # noqa: E402
from .monad import MonadDescriptor, build_monad  # noqa: E402
from .linalg import BACKEND  # noqa: E402

__all__ = ["SpaceSpec", "Polarization", "MonadDescriptor", "build_monad", "BACKEND", "__version__"]
