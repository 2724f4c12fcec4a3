"""
Counter-based random streams.

Every random component of a replication draws from its own Philox generator keyed by
(master seed, component label, indices...). Streams never overlap and any component can be
regenerated in isolation, in any order and on any worker.
"""

from enum import IntEnum

import numpy as np


class StreamLabel(IntEnum):
    PATH = 0
    TIMES = 1
    NOISE = 2
    LIMIT = 3
    REFINE = 4
    COUNTEREXAMPLE = 5


def stream(seed: int, label: StreamLabel, *indices: int) -> np.random.Generator:
    """
    Return the generator for (seed, label, *indices).

    Parameters:
        seed (int): Master seed, a non-negative integer.
        label (StreamLabel): Component the stream feeds.
        *indices (int): Further keys, e.g. grid index and replication number.

    Returns:
        numpy.random.Generator: A fresh generator positioned at the start of the stream.
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(label), *map(int, indices)))
    return np.random.Generator(np.random.Philox(sequence))
