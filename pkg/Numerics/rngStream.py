import hashlib
import numpy as np
from GlobalUtils.globalUtils import ArgumentError

UINT64_LIMIT = 2**64


def derive_stream_id(*names) -> int:
    """Maps a path of names (e.g. "train", 1, 3, "MLP") onto a stable 64-bit stream id.

    blake2b is used instead of hash() so ids survive interpreter restarts and PYTHONHASHSEED.
    """
    label = "/".join(str(name) for name in names).encode('utf-8')
    digest = hashlib.blake2b(label, digest_size=8).digest()
    return int.from_bytes(digest, 'little')


class RngStream:
    """Seeded draw sequence backed by numpy's counter-based Philox generator.

    The 128-bit Philox key is (seed << 64) | stream_id, so every (seed, stream_id)
    pair yields its own reproducible sequence. A stream is stateful: it must be owned
    by a single consumer.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= int(seed) < UINT64_LIMIT:
            raise ArgumentError(f"RngStream - seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= int(stream_id) < UINT64_LIMIT:
            raise ArgumentError(f"RngStream - stream_id must be a 64-bit unsigned integer, got {stream_id}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.generator = np.random.Generator(np.random.Philox(key=(self.seed << 64) | self.stream_id))

    @classmethod
    def named(cls, seed: int, *names) -> 'RngStream':
        return cls(seed, derive_stream_id(*names))

    def child(self, *names) -> 'RngStream':
        return RngStream.named(self.seed, self.stream_id, *names)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles in [0, 1), each the top 53 bits of one Philox output word."""
        return self.generator.random(n)

    def normal(self, n: int) -> np.ndarray:
        """n standard normals by Box-Muller; consumes 2 * ceil(n / 2) uniforms."""
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        return np.column_stack((radius * np.cos(angle), radius * np.sin(angle))).reshape(-1)[:n]

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniform(n), kind='stable')

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"
