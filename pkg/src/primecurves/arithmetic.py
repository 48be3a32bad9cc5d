"""Primes up to a bound and p-adic valuations of factorials.

Everything here is exact integer arithmetic. Valuations are only turned into
floats when a series is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from types import MappingProxyType
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class PrimeList:
    """All primes ``<= n`` in increasing order."""

    n: int
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, i):
        return self.primes[i]


@dataclass(frozen=True)
class ValuationTable:
    """Map ``p -> v_p(n!)`` for every prime ``p <= n``."""

    n: int
    entries: Mapping[int, int]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(self.entries)

    @property
    def valuations(self) -> tuple[int, ...]:
        return tuple(self.entries.values())


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    for d in range(3, isqrt(k) + 1, 2):
        if k % d == 0:
            return False
    return True


def primes_up_to(n: int) -> PrimeList:
    """Sieve of Eratosthenes. ``n = 1`` gives an empty list."""
    n = int(n)
    if n < 1:
        raise ValueError(f"prime bound must be >= 1, got {n}")
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return PrimeList(n, tuple(int(p) for p in np.flatnonzero(sieve)))


def legendre_valuation(p: int, n: int) -> int:
    """Exponent of the prime ``p`` in ``n!``, via Legendre's formula.

    Accumulates ``floor(n / p^k)`` by repeated integer division, so no
    factorial (and no power of ``p``) is ever formed.
    """
    p, n = int(p), int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    v = 0
    while n:
        n //= p
        v += n
    return v


def valuation_table(n: int) -> ValuationTable:
    n = int(n)
    if n < 2:
        raise ValueError(f"valuation table needs n >= 2, got {n}")
    entries = {p: legendre_valuation(p, n) for p in primes_up_to(n)}
    return ValuationTable(n, MappingProxyType(entries))
