import random

import pytest


def random_text(rng, max_len=400, sigmas=(2, 4, 26, 256), min_len=1):
    n = rng.randint(min_len, max_len)
    sigma = rng.choice(sigmas)
    return bytes(rng.randrange(sigma) for _ in range(n))


def naive_locate(text, pattern):
    m = len(pattern)
    return [i for i in range(len(text) - m + 1) if text[i:i + m] == pattern]


@pytest.fixture(scope="session")
def mutated_copies_corpus():
    """500 near-copies of a 200-byte random block, 1% point mutations."""
    rng = random.Random(0xC0F)
    block = bytes(rng.randrange(256) for _ in range(200))
    parts = []
    for _ in range(500):
        copy = bytearray(block)
        for i in range(len(copy)):
            if rng.random() < 0.01:
                copy[i] = rng.randrange(256)
        parts.append(bytes(copy))
    return b"".join(parts)
