"""Attitude spectrum, influence functions and the pairwise update rule.

Attitudes are nonzero integers in ``{-L, ..., -1, 1, ..., L}``. The sign is
the opinion and the magnitude is the entrenchment. Plain ``int`` values are
used throughout; :func:`check_attitude` enforces the invariants.
"""

from __future__ import annotations

import enum

import numpy as np


class InfluenceKind(str, enum.Enum):
    QUADRATIC = "quadratic"
    LINEAR = "linear"
    UNIFORM = "uniform"
    COLINEAR = "colinear"
    COQUADRATIC = "coquadratic"

    @classmethod
    def parse(cls, value: "InfluenceKind | str") -> "InfluenceKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown influence kind {value!r}; expected one of "
                         f"{[k.value for k in cls]}")


def check_spectrum(L: int) -> int:
    if int(L) != L or L < 1:
        raise ValueError(f"spectrum bound L must be a positive integer, got {L!r}")
    return int(L)


def check_attitude(a: int, L: int) -> int:
    L = check_spectrum(L)
    if int(a) != a:
        raise ValueError(f"attitude must be an integer, got {a!r}")
    a = int(a)
    if a == 0 or abs(a) > L:
        raise ValueError(f"attitude {a} outside spectrum {{±1..±{L}}}")
    return a


def attitudes(L: int) -> list[int]:
    """All 2L attitudes in spectrum order, left to right."""
    L = check_spectrum(L)
    return list(range(-L, 0)) + list(range(1, L + 1))


def influence(kind: InfluenceKind | str, a: int, L: int) -> int:
    """Influence weight of an individual holding attitude ``a``.

    Weights are exact positive integers for every kind.
    """
    kind = InfluenceKind.parse(kind)
    a = check_attitude(a, L)
    m = abs(a)
    if kind is InfluenceKind.QUADRATIC:
        return m * m
    if kind is InfluenceKind.LINEAR:
        return m
    if kind is InfluenceKind.UNIFORM:
        return 1
    if kind is InfluenceKind.COLINEAR:
        return L + 1 - m
    return (L + 1 - m) ** 2


def _position(a: int, L: int) -> int:
    # index along the spectrum with zero skipped: -L -> 0, ..., -1 -> L-1, 1 -> L, ..., L -> 2L-1
    return a + L if a < 0 else a + L - 1


def _attitude(pos: int, L: int) -> int:
    return pos - L if pos < L else pos - L + 1


def update_attitude(focal: int, partner: int, amplify: bool, L: int) -> int:
    """New attitude of ``focal`` after interacting with ``partner``.

    Without amplification the focal attitude moves one allowable step toward
    the partner's value (crossing from +1 to -1 directly). With amplification
    it moves one step in the direction of the partner's sign, clamped to the
    spectrum. The Bernoulli draw for ``amplify`` is made by the caller.
    """
    focal = check_attitude(focal, L)
    partner = check_attitude(partner, L)
    pf = _position(focal, L)
    if amplify:
        direction = 1 if partner > 0 else -1
        pos = min(max(pf + direction, 0), 2 * L - 1)
    else:
        pp = _position(partner, L)
        pos = pf + (pp > pf) - (pp < pf)
    return _attitude(pos, L)


def influence_table(kind: InfluenceKind | str, L: int) -> np.ndarray:
    """Weights indexed by ``a + L`` (slot ``L`` is unused and holds 0)."""
    L = check_spectrum(L)
    table = np.zeros(2 * L + 1, dtype=np.int64)
    for a in attitudes(L):
        table[a + L] = influence(kind, a, L)
    return table


def update_tables(L: int) -> np.ndarray:
    """Lookup array ``T[amp, focal + L, partner + L]`` of updated attitudes.

    Row/column ``L`` (attitude 0) is unused and holds 0.
    """
    L = check_spectrum(L)
    size = 2 * L + 1
    table = np.zeros((2, size, size), dtype=np.int8)
    for amp in (0, 1):
        for f in attitudes(L):
            for p in attitudes(L):
                table[amp, f + L, p + L] = update_attitude(f, p, bool(amp), L)
    return table
