"""Seeded 64-bit linear congruential generator.

All randomized behavior that must be stable across platforms and processes
(subtask draws, LDA chain, synthetic corpora in tests) goes through this
generator rather than ``random`` or numpy's RNGs.  It is the MMIX LCG:

    x <- (x * 6364136223846793005 + 1442695040888963407) mod 2**64

Uniform doubles take the top 53 bits: ``(x >> 11) * 2**-53``.
"""

MASK64 = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407


class Lcg64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state * _MUL + _INC) & MASK64
        return self.state

    def uniform(self):
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def index(self, n):
        """Uniform index in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def uniform_range(self, lo, hi):
        return lo + (hi - lo) * self.uniform()
