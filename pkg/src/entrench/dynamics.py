"""Synchronous stepping of the fully spatial, relocation and telephoning models.

One step is: optional relocation (sequential pair swaps), then every site
picks a partner and updates against the relocated snapshot. All randomness
comes from :mod:`entrench.rng`, keyed by ``(seed, step, site)`` for the
interaction phase and ``(seed, step, swap)`` for relocation, so the result
does not depend on thread count or site-visit order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numba as nb
import numpy as np

from entrench import rng as crng
from entrench.lattice import Configuration, TorusGeometry
from entrench.metrics import histogram, interface_density
from entrench.spectrum import InfluenceKind, check_spectrum, influence_table, update_tables


class Mixing(str, enum.Enum):
    NONE = "none"
    RELOCATION = "relocation"
    TELEPHONING = "telephoning"


@dataclass(frozen=True)
class MixingMode:
    """Exactly one mixing mechanism and its level (``rel`` or ``tel``)."""

    kind: Mixing = Mixing.NONE
    level: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Mixing(self.kind))
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"mixing level must lie in [0, 1], got {self.level}")
        if self.kind is Mixing.NONE and self.level != 0.0:
            raise ValueError("the fully spatial model takes no mixing level")

    @classmethod
    def fully_spatial(cls) -> "MixingMode":
        return cls(Mixing.NONE, 0.0)

    @classmethod
    def relocation(cls, rel: float) -> "MixingMode":
        return cls(Mixing.RELOCATION, rel)

    @classmethod
    def telephoning(cls, tel: float) -> "MixingMode":
        return cls(Mixing.TELEPHONING, tel)

    @classmethod
    def parse(cls, mode: str, level: float = 0.0) -> "MixingMode":
        kind = Mixing(mode.strip().lower())
        return cls(kind, 0.0 if kind is Mixing.NONE else float(level))

    @property
    def rel(self) -> float:
        return self.level if self.kind is Mixing.RELOCATION else 0.0

    @property
    def tel(self) -> float:
        return self.level if self.kind is Mixing.TELEPHONING else 0.0

    @property
    def loc(self) -> float:
        return 1.0 - self.tel

    def __str__(self) -> str:
        return self.kind.value if self.kind is Mixing.NONE else f"{self.kind.value}:{self.level:g}"


@dataclass(frozen=True)
class ModelParams:
    L: int = 2
    p_a: float = 0.01
    influence: InfluenceKind = InfluenceKind.UNIFORM
    mixing: MixingMode = field(default_factory=MixingMode.fully_spatial)
    geometry: TorusGeometry = field(default_factory=TorusGeometry)
    seed: int = 0
    # telephoning: exactly round(tel * N) global callers per step instead of i.i.d. draws
    exact_partition: bool = False

    def __post_init__(self):
        check_spectrum(self.L)
        if not 0.0 <= self.p_a <= 1.0:
            raise ValueError(f"p_a must lie in [0, 1], got {self.p_a}")
        object.__setattr__(self, "influence", InfluenceKind.parse(self.influence))
        crng.split_seed(self.seed)

    @property
    def population(self) -> int:
        return self.geometry.size


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def relocation_swaps(rel: float, population: int) -> int:
    """Number of sequential swaps for relocation fraction ``rel``."""
    return round_half_up(rel * population) // 2


# --------------------------------------------------------------------------
# kernels


@nb.njit(cache=True, inline="always")
def _pick_local(cells, nbr, x, wtab, L, word):
    total = 0
    for k in range(8):
        total += wtab[cells[nbr[x, k]] + L]
    r = crng.bounded(word, total)
    for k in range(8):
        r -= wtab[cells[nbr[x, k]] + L]
        if r < 0:
            return nbr[x, k]
    return nbr[x, 7]


@nb.njit(cache=True, inline="always")
def _pick_global(n, x, word):
    z = crng.bounded(word, n - 1)
    if z >= x:
        z += 1
    return z


@nb.njit(cache=True)
def _pick_local_single(cells, nbr, x, wtab, L, word):
    return _pick_local(cells, nbr, x, wtab, L, word)


@nb.njit(cache=True)
def _pick_global_single(n, x, word):
    return _pick_global(n, x, word)


@nb.njit(cache=True)
def _relocate(cells, swaps, k0, k1, step):
    n = cells.size
    for s in range(swaps):
        w0, w1, _, _ = crng.draw(k0, k1, step, s, np.uint64(crng.STREAM_RELOCATE))
        i = crng.bounded(w0, n)
        j = _pick_global(n, i, w1)
        tmp = cells[i]
        cells[i] = cells[j]
        cells[j] = tmp


@nb.njit(cache=True, parallel=True)
def _interact(src, dst, nbr, wtab, table, L, k0, k1, step, pa_t, tel_t, mask, use_mask):
    n = src.size
    for x in nb.prange(n):
        w0, w1, w2, _ = crng.draw(k0, k1, step, x, np.uint64(0))
        if use_mask:
            glob = mask[x]
        else:
            glob = w2 < tel_t
        if glob:
            z = _pick_global(n, x, w0)
        else:
            z = _pick_local(src, nbr, x, wtab, L, w0)
        amp = 1 if w1 < pa_t else 0
        dst[x] = table[amp, src[x] + L, src[z] + L]


# --------------------------------------------------------------------------
# single-draw helpers


def _word(rng: np.random.Generator) -> np.uint64:
    return np.uint64(rng.integers(0, crng.TWO32))


def select_local_partner(config: Configuration, site: int,
                         influence: InfluenceKind | str, rng: np.random.Generator) -> int:
    """Moore neighbor chosen with probability proportional to its influence."""
    if not 0 <= site < config.size:
        raise IndexError(f"site {site} out of range")
    wtab = influence_table(influence, config.L)
    return int(_pick_local_single(config.cells, config.geometry.neighbor_table(), site,
                                  wtab, config.L, _word(rng)))


def select_global_partner(population: int, site: int, rng: np.random.Generator) -> int:
    """Uniform choice among the ``population - 1`` other sites."""
    if population < 2:
        raise ValueError("global partner needs a population of at least 2")
    if not 0 <= site < population:
        raise IndexError(f"site {site} out of range")
    return int(_pick_global_single(population, site, _word(rng)))


def relocate(config: Configuration, rel: float, seed: int, step: int = 0) -> Configuration:
    """Apply ``round(rel * N) // 2`` sequential random pair swaps."""
    if not 0.0 <= rel <= 1.0:
        raise ValueError(f"rel must lie in [0, 1], got {rel}")
    out = config.copy()
    k0, k1 = crng.split_seed(seed)
    _relocate(out.cells, relocation_swaps(rel, config.size), k0, k1, np.uint64(step))
    return out


# --------------------------------------------------------------------------
# stepping


class Engine:
    """Double-buffered stepper for one parameter set.

    ``state`` is the current configuration's cell array; ``advance`` writes
    the next generation into the spare buffer and swaps.
    """

    def __init__(self, params: ModelParams, init: Configuration, step: int = 0):
        if init.geometry != params.geometry or init.L != params.L:
            raise ValueError(f"initial configuration ({init.geometry}, L={init.L}) does not match "
                             f"params ({params.geometry}, L={params.L})")
        self.params = params
        self.step_index = int(step)
        self.state = init.cells.copy()
        self._spare = np.empty_like(self.state)
        self._nbr = params.geometry.neighbor_table()
        self._wtab = influence_table(params.influence, params.L)
        self._table = update_tables(params.L)
        self._k0, self._k1 = crng.split_seed(params.seed)
        self._pa_t = crng.probability_threshold(params.p_a)
        self._tel_t = crng.probability_threshold(params.mixing.tel)
        self._swaps = relocation_swaps(params.mixing.rel, params.population)
        self._partition = params.exact_partition and params.mixing.kind is Mixing.TELEPHONING
        self._mask = np.zeros(self.state.size if self._partition else 1, dtype=np.bool_)

    def _global_mask(self, step: int) -> np.ndarray:
        n = self.state.size
        keys = crng.words(self.params.seed, step, n, crng.STREAM_PARTITION)[:, 0]
        order = np.argsort(keys, kind="stable")
        self._mask[:] = False
        self._mask[order[:round_half_up(self.params.mixing.tel * n)]] = True
        return self._mask

    def advance(self) -> None:
        step = np.uint64(self.step_index)
        if self._swaps:
            _relocate(self.state, self._swaps, self._k0, self._k1, step)
        if self._partition:
            self._global_mask(self.step_index)
        _interact(self.state, self._spare, self._nbr, self._wtab, self._table, self.params.L,
                  self._k0, self._k1, step, self._pa_t, self._tel_t, self._mask, self._partition)
        self.state, self._spare = self._spare, self.state
        self.step_index += 1

    def consensus(self) -> bool:
        pos = int(np.count_nonzero(self.state > 0))
        return pos == 0 or pos == self.state.size

    def configuration(self) -> Configuration:
        return Configuration(self.params.geometry, self.params.L, self.state.copy())


def step(config: Configuration, params: ModelParams, step_index: int = 0) -> Configuration:
    """One synchronous generation; ``step_index`` selects the random counters."""
    engine = Engine(params, config, step_index)
    engine.advance()
    return engine.configuration()


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    counts: tuple[int, ...]
    interface_density: float
    consensus: bool

    def frequencies(self) -> tuple[float, ...]:
        n = sum(self.counts)
        return tuple(c / n for c in self.counts)


def metrics_record(t: int, config: Configuration) -> MetricsRecord:
    hist = histogram(config)
    rho = interface_density(config)
    return MetricsRecord(t, hist.counts, rho, rho == 0.0)


@dataclass
class RunResult:
    consensus_time: int | None
    steps: int
    final: Configuration
    records: list[MetricsRecord]

    @property
    def censored(self) -> bool:
        return self.consensus_time is None


Observer = Callable[[int, Configuration], None]


def run(params: ModelParams, init: Configuration, max_steps: int,
        observers: Iterable[Observer] = (), record_every: int = 0,
        start_step: int = 0) -> RunResult:
    """Step until consensus or ``max_steps``; a timeout is reported as censored.

    ``consensus_time`` is the first step index at which every attitude shares
    a sign (0 if ``init`` is already at consensus). ``record_every > 0`` keeps
    a :class:`MetricsRecord` at that cadence plus the final step. Observers
    are called with ``(step, configuration)`` at every step, which costs a
    copy per step; leave them empty in sweeps.
    """
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    observers = list(observers)
    engine = Engine(params, init, start_step)
    records: list[MetricsRecord] = []

    def observe(t: int, final: bool = False) -> None:
        if observers or (record_every and (t % record_every == 0 or final)):
            cfg = engine.configuration()
            for ob in observers:
                ob(t, cfg)
            if record_every and (t % record_every == 0 or final):
                if not records or records[-1].step != t:
                    records.append(metrics_record(t, cfg))

    t = start_step
    observe(t)
    done = engine.consensus()
    while not done and t - start_step < max_steps:
        engine.advance()
        t += 1
        done = engine.consensus()
        observe(t, final=done)
    if not done and record_every:
        observe(t, final=True)
    return RunResult(t if done else None, t - start_step, engine.configuration(), records)
