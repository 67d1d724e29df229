"""Deterministic seed splitting.

Every random quantity in blab is drawn from a generator seeded by
``derive_seed(master, tag, *index)``.  There is no global generator.
"""
import zlib

import numpy as np

FORMAT_VERSION = "v1"


def _tag_word(tag):
    return zlib.crc32(tag.encode("utf-8"))


def derive_seed(master, tag, *index):
    """Return a 64-bit seed determined by ``(master, tag, index...)``.

    The mapping goes through :class:`numpy.random.SeedSequence`, so seeds for
    different tags or indices are statistically independent.
    """
    if master < 0 or master >= 2**64:
        raise ValueError(f"master seed must be a u64, got {master}")
    words = [int(master) & 0xFFFFFFFF, int(master) >> 32, _tag_word(tag)]
    words.extend(int(i) for i in index)
    ss = np.random.SeedSequence(words)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(master, tag, *index):
    return np.random.Generator(np.random.PCG64(derive_seed(master, tag, *index)))
