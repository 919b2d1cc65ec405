"""Chaining-hash reverse dictionary from symbol digrams to rule ids.

Buckets store only the rule ids (the left-hand sides); on every probe the
candidate's digram is re-derived through a resolver callback and compared,
so the table never keeps digram copies of its own.  The hash seed is fixed:
two builds that insert the same rules produce identical tables.
"""

from .errors import StructureError

_MASK = (1 << 64) - 1


def _mix(x, y):
    # splitmix64-style finalizer over the packed pair; seed is fixed so that
    # online and batch builds stay bit-identical.
    h = (x * 0x9E3779B97F4A7C15 + y * 0xBF58476D1CE4E5B9 + 0x94D049BB133111EB) & _MASK
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & _MASK
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & _MASK
    return h ^ (h >> 31)


class ReverseDict:
    """Digram -> rule id map; expected chain length <= 1/load_factor."""

    def __init__(self, resolver, load_factor=0.8, initial_buckets=64):
        if not 0.0 < load_factor <= 1.0:
            raise StructureError(f"load factor must be in (0, 1], got {load_factor}")
        self._resolver = resolver
        self._alpha = load_factor
        self._buckets = [[] for _ in range(initial_buckets)]
        self._count = 0

    def __len__(self):
        return self._count

    @property
    def bucket_count(self):
        return len(self._buckets)

    @property
    def load_factor(self):
        return self._alpha

    def lookup_or_insert(self, x, y, next_id):
        """Return (id, created): existing id for (x, y), or record next_id.

        The resolver must already map next_id to (x, y) when this is
        called: an insert can trigger a rehash, which re-derives the digram
        of every stored id including the new one.
        """
        nb = len(self._buckets)
        chain = self._buckets[_mix(x, y) % nb]
        resolver = self._resolver
        for k in chain:
            if resolver(k) == (x, y):
                return k, False
        chain.append(next_id)
        self._count += 1
        if self._count * 1.0 > nb / self._alpha:
            self._rehash(nb * 2)
        return next_id, True

    def lookup_readonly(self, x, y):
        """Existing id for (x, y) or None; never mutates."""
        chain = self._buckets[_mix(x, y) % len(self._buckets)]
        resolver = self._resolver
        for k in chain:
            if resolver(k) == (x, y):
                return k
        return None

    def _rehash(self, new_size):
        resolver = self._resolver
        fresh = [[] for _ in range(new_size)]
        for chain in self._buckets:
            for k in chain:
                x, y = resolver(k)
                fresh[_mix(x, y) % new_size].append(k)
        self._buckets = fresh

    def force_rehash(self):
        """Rebuild at double size (test hook for the rehash-preservation property)."""
        self._rehash(len(self._buckets) * 2)
