"""Counter-based random streams (Philox4x32-10).

Every uniform is a pure function of ``(seed, domain, path, period)``, so a
path draws the same numbers whatever the replication count or worker split.
The compiled kernel implements the same generator bit for bit.
"""

from __future__ import annotations

MASK32 = 0xFFFFFFFF
PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
INV_2_32 = 1.0 / 4294967296.0

# stream domains
DOMAIN_EQUILIBRIUM = 0
DOMAIN_BENCHMARK = 1

# word slots inside a period block of an equilibrium path
SLOT_COST, SLOT_SIGNAL, SLOT_TAG, SLOT_THETA = 0, 1, 2, 3


def philox4x32(counter: tuple[int, int, int, int], key: tuple[int, int]) -> tuple[int, int, int, int]:
    c0, c1, c2, c3 = counter
    k0, k1 = key
    for _ in range(10):
        p0 = PHILOX_M0 * c0
        p1 = PHILOX_M1 * c2
        c0, c1, c2, c3 = (
            ((p1 >> 32) ^ c1 ^ k0) & MASK32,
            p1 & MASK32,
            ((p0 >> 32) ^ c3 ^ k1) & MASK32,
            p0 & MASK32,
        )
        k0 = (k0 + PHILOX_W0) & MASK32
        k1 = (k1 + PHILOX_W1) & MASK32
    return c0, c1, c2, c3


def word_to_uniform(w: int) -> float:
    """Map a 32-bit word to the open interval (0, 1)."""
    return (w + 0.5) * INV_2_32


def split_seed(seed: int) -> tuple[int, int]:
    seed &= 0xFFFFFFFFFFFFFFFF
    return seed & MASK32, seed >> 32


def block_uniforms(seed: int, domain: int, path: int, period: int) -> tuple[float, float, float, float]:
    words = philox4x32(
        (period & MASK32, path & MASK32, (path >> 32) & MASK32, domain & MASK32),
        split_seed(seed),
    )
    return tuple(word_to_uniform(w) for w in words)  # type: ignore[return-value]


class PathStream:
    """The random stream owned by one simulated path.

    ``block(t)`` returns the four uniforms of period ``t``; period 0 is
    reserved for path-level draws such as the state.
    """

    def __init__(self, seed: int, path: int, domain: int = DOMAIN_EQUILIBRIUM):
        self.seed = seed
        self.path = path
        self.domain = domain
        self._next = 0
        self._buffer: list[float] = []

    def block(self, t: int) -> tuple[float, float, float, float]:
        return block_uniforms(self.seed, self.domain, self.path, t)

    def random(self) -> float:
        """Sequential uniforms from a side counter range, for ad hoc draws."""
        if not self._buffer:
            self._buffer = list(block_uniforms(self.seed, self.domain | 0x80000000, self.path, self._next))
            self._next += 1
        return self._buffer.pop(0)


def philox4x32_array(counters, key: tuple[int, int]):
    """Vectorised Philox over an ``(n, 4)`` uint32 counter array."""
    import numpy as np

    c = np.asarray(counters, dtype=np.uint64) & MASK32
    c0, c1, c2, c3 = (c[:, i].copy() for i in range(4))
    k0, k1 = key
    m0, m1, mask = np.uint64(PHILOX_M0), np.uint64(PHILOX_M1), np.uint64(MASK32)
    sh = np.uint64(32)
    for _ in range(10):
        p0 = m0 * c0
        p1 = m1 * c2
        c0, c1, c2, c3 = (
            (p1 >> sh) ^ c1 ^ np.uint64(k0),
            p1 & mask,
            (p0 >> sh) ^ c3 ^ np.uint64(k1),
            p0 & mask,
        )
        k0 = (k0 + PHILOX_W0) & MASK32
        k1 = (k1 + PHILOX_W1) & MASK32
    return np.stack([c0, c1, c2, c3], axis=1).astype(np.uint32)


def block_uniforms_array(seed: int, domain: int, paths, period: int):
    """``block_uniforms`` for many paths at one period; returns an ``(n, 4)`` float array."""
    import numpy as np

    paths = np.asarray(paths, dtype=np.uint64)
    ctr = np.empty((len(paths), 4), dtype=np.uint64)
    ctr[:, 0] = period & MASK32
    ctr[:, 1] = paths & np.uint64(MASK32)
    ctr[:, 2] = paths >> np.uint64(32)
    ctr[:, 3] = domain & MASK32
    words = philox4x32_array(ctr, split_seed(seed))
    return (words.astype(np.float64) + 0.5) * INV_2_32
