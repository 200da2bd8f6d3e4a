"""Sub-seed derivation.

``derive_seed(master, *keys)`` folds each key into the state with a
splitmix64 step. String keys are reduced to 64 bits with BLAKE2b first, so
a sub-seed depends only on its own key path. Adding an algorithm or view
therefore leaves every other sub-seed unchanged.
"""
import hashlib

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def _key_bits(key):
    if isinstance(key, int):
        return key & MASK
    digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master, *keys):
    """A 63-bit seed (fits numpy's default_rng and signed int64)."""
    state = splitmix64(int(master) & MASK)
    for key in keys:
        state = splitmix64(state ^ _key_bits(key))
    return state >> 1
