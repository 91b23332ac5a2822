"""This module contains utility functions and classes shared across manistat.

The module includes the following functions:
- `get_logger`: Creates and returns a logger with the specified name.
- `derive_seed`: Derives a 64-bit child seed from a parent seed and integer keys.
- `substream_rng`: Returns a numpy Generator for the substream (seed, *keys).
- `stable_key`: Maps a string label to a stable 32-bit integer key.

The module also includes the following classes:
- `Timer`: A simple timer class for measuring elapsed time.

Typical usage example:

    logger = get_logger(__name__)
    rng = substream_rng(seed, replicate, 3)
    with Timer() as timer:
        ...
    logger.info(f"took {timer.elapsed:.2f}s")
"""

import datetime
import logging
import os
import zlib
from typing import Any

import colorlog
import numpy as np

_LOG_FORMAT = "%(asctime)s : %(levelname)s : %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Creates and returns a logger with the specified name.

    Args:
        name: The name of the logger.

    Returns:
        A logger instance with the specified name.
    """
    root = logging.getLogger()
    if not root.handlers:
        handler = colorlog.StreamHandler()
        handler.setFormatter(
            colorlog.ColoredFormatter("%(log_color)s" + _LOG_FORMAT)
        )
        root.addHandler(handler)
    root.setLevel(logging.getLevelName(os.environ.get("LOG_LEVEL", "INFO")))
    logger = logging.getLogger(name)
    return logger


class Timer:
    """A simple timer class for measuring elapsed time."""

    def __init__(self) -> None:
        """Initializes the timer."""
        self.start = datetime.datetime.now().astimezone(datetime.timezone.utc)
        self.stop = self.start

    def __enter__(self) -> "Timer":
        """Starts the timer."""
        return self

    def __exit__(self, *args: Any) -> None:
        """Stops the timer."""
        self.stop = datetime.datetime.now().astimezone(datetime.timezone.utc)

    @property
    def elapsed(self) -> float:
        """Calculates the elapsed time in seconds."""
        return (self.stop - self.start).total_seconds()


def stable_key(label: str) -> int:
    """Maps a label to a 32-bit integer that is stable across processes."""
    return zlib.crc32(label.encode("utf-8"))


def derive_seed(seed: int, *keys: int) -> int:
    """Derives a child seed from `seed` and a path of integer keys.

    The result depends only on its arguments, never on call order or on
    which worker evaluates it.

    Args:
        seed: The parent 64-bit seed.
        *keys: Non-negative integers identifying the child stream.

    Returns:
        A 64-bit unsigned integer seed.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def substream_rng(seed: int, *keys: int) -> np.random.Generator:
    """Returns an independent random generator for the substream (seed, *keys)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=keys))
    )
