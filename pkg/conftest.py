"""Pytest wiring: parse absl flags so absltest helpers work under pytest."""

import sys

from absl import flags


def pytest_configure(config) -> None:
    del config  # Unused.
    if not flags.FLAGS.is_parsed():
        flags.FLAGS(sys.argv[:1], known_only=True)
