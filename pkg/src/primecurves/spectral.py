"""The prime-frequency series and its three randomized controls.

Each model is a finite exponential sum ``F(t) = sum_k w_k exp(i f_k t)`` with
distinct positive integer frequencies ``f_k`` and the factorial valuations as
weights. Every control keeps the weight multiset of the prime model and
changes only how weights meet frequencies:

* ``RANDOM_FREQUENCY``: frequencies are a uniform ``pi(n)``-subset of ``1..n``.
* ``CRAMER``: frequencies are the first ``pi(n)`` integers kept by independent
  Bernoulli(1/log k) trials on ``2..n``.
* ``SHUFFLED``: prime frequencies, weights permuted uniformly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .arithmetic import valuation_table
from .rng import make_generator

DEFAULT_MAX_ATTEMPTS = 1000


class ModelKind(str, enum.Enum):
    PRIME = "prime"
    RANDOM_FREQUENCY = "random-frequency"
    CRAMER = "cramer"
    SHUFFLED = "shuffled"

    @classmethod
    def parse(cls, value: "str | ModelKind") -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"random": cls.RANDOM_FREQUENCY, "randomfrequency": cls.RANDOM_FREQUENCY}
        try:
            return aliases.get(key) or cls(key)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown model kind {value!r} (expected one of: {names})") from None

    @property
    def randomized(self) -> bool:
        return self is not ModelKind.PRIME


class CramerExhaustedError(RuntimeError):
    """Every Cramér redraw selected fewer than ``pi(n)`` integers."""

    def __init__(self, n: int, needed: int, attempts: int, seed: int | None):
        self.n, self.needed, self.attempts, self.seed = n, needed, attempts, seed
        super().__init__(
            f"Cramér model for n={n}: fewer than {needed} integers selected "
            f"in each of {attempts} attempts (seed={seed})"
        )


def _frozen(a, dtype=np.int64):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralModel:
    n: int
    frequencies: np.ndarray
    weights: np.ndarray
    kind: ModelKind
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "frequencies", _frozen(self.frequencies))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.frequencies.shape != self.weights.shape or self.frequencies.ndim != 1:
            raise ValueError("frequencies and weights must be 1-D and of equal length")

    @property
    def terms(self) -> list[tuple[int, int]]:
        return [(int(f), int(w)) for f, w in zip(self.frequencies, self.weights)]

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def __eq__(self, other):
        if not isinstance(other, SpectralModel):
            return NotImplemented
        return (
            (self.n, self.kind, self.seed) == (other.n, other.kind, other.seed)
            and np.array_equal(self.frequencies, other.frequencies)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SamplingGrid:
    """``N`` equispaced nodes on ``[-pi, pi]``, both ends included."""

    count: int
    nodes: np.ndarray = field(repr=False)

    @classmethod
    def uniform(cls, count: int) -> "SamplingGrid":
        count = int(count)
        if count < 2:
            raise ValueError(f"sampling grid needs at least 2 nodes, got {count}")
        # integer numerators keep t_j == -t_{N+1-j} bit-exactly and the ends at +-pi
        num = 2 * np.arange(count, dtype=np.int64) - (count - 1)
        nodes = math.pi * (num / (count - 1))
        nodes.setflags(write=False)
        return cls(count, nodes)


@dataclass(frozen=True, eq=False)
class CurveSample:
    points: np.ndarray
    model: SpectralModel
    grid: SamplingGrid

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]


def _check_n(n: int, minimum: int = 2) -> int:
    n = int(n)
    if n < minimum:
        raise ValueError(f"n must be >= {minimum}, got {n}")
    return n


def _prime_terms(n: int) -> tuple[np.ndarray, np.ndarray]:
    table = valuation_table(n)
    return np.array(table.primes, dtype=np.int64), np.array(table.valuations, dtype=np.int64)


def build_prime_model(n: int) -> SpectralModel:
    n = _check_n(n)
    primes, weights = _prime_terms(n)
    return SpectralModel(n, primes, weights, ModelKind.PRIME)


def partial_fisher_yates(population: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``k``-subset of ``0..population-1`` (in selection order).

    Runs the first ``k`` steps of a Fisher-Yates shuffle.
    """
    if not 0 <= k <= population:
        raise ValueError(f"cannot choose {k} of {population}")
    pool = np.arange(population, dtype=np.int64)
    for i in range(k):
        j = int(rng.integers(i, population))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k].copy()


def build_random_frequency_model(n: int, seed: int) -> SpectralModel:
    n = _check_n(n)
    primes, weights = _prime_terms(n)
    rng = make_generator(seed)
    freqs = np.sort(partial_fisher_yates(n, primes.size, rng) + 1)
    return SpectralModel(n, freqs, weights, ModelKind.RANDOM_FREQUENCY, int(seed))


def cramer_probabilities(n: int) -> np.ndarray:
    """Selection probability for each k in ``2..n``; k = 2 is clamped to 1."""
    k = np.arange(2, n + 1, dtype=np.float64)
    return np.minimum(1.0, 1.0 / np.log(k))


def build_cramer_model(n: int, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> SpectralModel:
    n = _check_n(n, 5)
    if max_attempts < 1:
        raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
    primes, weights = _prime_terms(n)
    needed = primes.size
    candidates = np.arange(2, n + 1, dtype=np.int64)
    prob = cramer_probabilities(n)
    rng = make_generator(seed)
    for _ in range(max_attempts):
        selected = candidates[rng.random(prob.size) < prob]
        if selected.size >= needed:
            return SpectralModel(n, selected[:needed], weights, ModelKind.CRAMER, int(seed))
    raise CramerExhaustedError(n, needed, max_attempts, seed)


def build_shuffled_model(n: int, seed: int) -> SpectralModel:
    n = _check_n(n)
    primes, weights = _prime_terms(n)
    rng = make_generator(seed)
    return SpectralModel(n, primes, weights[rng.permutation(weights.size)], ModelKind.SHUFFLED, int(seed))


def build_model(
    kind: ModelKind | str, n: int, seed: int | None = None, max_attempts: int = DEFAULT_MAX_ATTEMPTS
) -> SpectralModel:
    kind = ModelKind.parse(kind)
    if kind is ModelKind.PRIME:
        return build_prime_model(n)
    if seed is None:
        raise ValueError(f"{kind.value} model needs a seed")
    if kind is ModelKind.RANDOM_FREQUENCY:
        return build_random_frequency_model(n, seed)
    if kind is ModelKind.CRAMER:
        return build_cramer_model(n, seed, max_attempts)
    return build_shuffled_model(n, seed)


def _eval_fft(model: SpectralModel, grid: SamplingGrid) -> tuple[np.ndarray, np.ndarray]:
    # t_j = -pi + 2 pi j / L with L = N - 1, so F(t_j) = L * ifft(c)[j] where
    # c[f mod L] collects w (-1)^f; node N-1 repeats node 0 for integer f
    length = grid.count - 1
    coeffs = np.zeros(length, dtype=np.complex128)
    signs = np.where(model.frequencies % 2 == 0, 1.0, -1.0)
    np.add.at(coeffs, model.frequencies % length, model.weights * signs)
    z = np.fft.ifft(coeffs) * length
    z = np.append(z, z[0])
    return z.real.copy(), z.imag.copy()


def evaluate(model: SpectralModel, grid: SamplingGrid | int, method: str = "direct") -> CurveSample:
    """Sample ``(Re F(t_j), Im F(t_j))`` on the grid.

    ``method="direct"`` sums the cos/sin terms at every node (the reference
    path). ``method="fft"`` reads the same values off one inverse FFT of length
    ``N - 1``; it agrees with direct summation to rounding.
    """
    if not isinstance(grid, SamplingGrid):
        grid = SamplingGrid.uniform(grid)
    if method == "direct":
        x, y = _kernels.eval_series(grid.nodes, model.frequencies, model.weights)
    elif method == "fft":
        x, y = _eval_fft(model, grid)
    else:
        raise ValueError(f"unknown evaluation method {method!r} (expected direct or fft)")
    points = np.column_stack((x, y))
    points.setflags(write=False)
    return CurveSample(points, model, grid)


def l2_norm_squared(model: SpectralModel) -> float:
    """Closed form ``2 pi sum w^2`` (orthogonality of distinct integer frequencies)."""
    return 2.0 * math.pi * float(np.sum(model.weights.astype(np.float64) ** 2))


def trapezoid_l2_norm_squared(sample: CurveSample) -> float:
    """Trapezoidal estimate of the integral of ``|F|^2`` over ``[-pi, pi]``."""
    mod2 = sample.x**2 + sample.y**2
    h = 2.0 * math.pi / (sample.grid.count - 1)
    return h * (float(np.sum(mod2)) - 0.5 * (mod2[0] + mod2[-1]))
