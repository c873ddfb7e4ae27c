"""Counter-based random streams with stable key derivation.

Every randomized object in the library (measurement matrices, noise
vectors, synthetic data, Monte-Carlo probes) draws from its own Philox
stream whose 128-bit key is derived by hashing a tuple of labels.  Keys
are content-addressed, so the same ``(seed, "map")`` tuple always yields
the same matrix, independent of call order or process layout.

Stream tags in use:

* ``"map"``    - entries of a measurement matrix
* ``"noise"``  - additive measurement noise
* ``"data"``   - synthetic low-rank factors
* ``"rip"``    - isometry-distortion probe tensors
* ``"probe"``  - generic perturbation draws in numerical checks
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_key", "stream"]


def derive_key(*parts: int | str) -> int:
    """Derive a 128-bit Philox key from a tuple of integers and strings.

    The encoding is injective (type tag + length framing), so distinct
    tuples never collide by construction of the framing, and blake2b
    makes collisions between framings astronomically unlikely.
    """
    h = hashlib.blake2b(digest_size=16)
    for part in parts:
        if isinstance(part, bool) or not isinstance(part, (int, str)):
            raise TypeError(f"key parts must be int or str, got {type(part).__name__}")
        data = str(part).encode() if isinstance(part, int) else part.encode()
        tag = b"i" if isinstance(part, int) else b"s"
        h.update(tag + len(data).to_bytes(4, "little") + data)
    return int.from_bytes(h.digest(), "little")


def stream(*parts: int | str) -> np.random.Generator:
    """Return a Generator on the Philox stream keyed by `parts`."""
    return np.random.Generator(np.random.Philox(key=derive_key(*parts)))
