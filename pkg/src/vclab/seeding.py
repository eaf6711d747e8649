"""Seed splitting.

Every random stream in the package is derived from a single 64-bit root seed
and a tuple of keys, never from global state::

    rng = derive_rng(seed, "lemma1", n, set_index)

String keys are mapped to 32-bit integers with CRC32, integer keys are used
as-is, and the resulting tuple becomes the ``spawn_key`` of a
:class:`numpy.random.SeedSequence`.  Two calls with equal ``(seed, *keys)``
produce identical streams regardless of call order or worker count.
"""

import os
import zlib

import numpy as np

DEFAULT_SEED = 20240611
SEED_ENV_VAR = "VC_LAB_SEED"


def _key(k):
    if isinstance(k, str):
        return zlib.crc32(k.encode("utf-8"))
    return int(k) & 0xFFFFFFFF


def derive_seed_sequence(seed, *keys):
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                  spawn_key=tuple(_key(k) for k in keys))


def derive_rng(seed, *keys):
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


def resolve_seed(seed=None):
    """Explicit seed, else ``$VC_LAB_SEED``, else the package default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_SEED
