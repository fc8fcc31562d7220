"""Simply-laced Cartan data and the index bookkeeping of the fermionic sums.

Node numbering follows Bourbaki:

* ``A_r``: the chain 1 - 2 - ... - r.
* ``D_r``: the chain 1 - 2 - ... - (r-2), with r-1 and r both attached to r-2.
* ``E_r``: the chain 1 - 3 - 4 - 5 - ... - r, with node 2 attached to node 4.

Vectors indexed by a root label and a level (``n``, ``m``, ``p``) are stored as
``r`` rows of length ``k``: ``n[alpha][i - 1]`` is the count at root ``alpha + 1``
and level ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import sympy

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CartanData:
    label: str
    rank: int
    C: Matrix
    delta: int
    lam: Matrix
    Cinv: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.label}{self.rank}"

    def neighbours(self, alpha: int) -> list[int]:
        """0-based indices of the nodes joined to ``alpha`` in the Dynkin diagram."""
        return [b for b in range(self.rank) if b != alpha and self.C[alpha][b] != 0]

    def lambda_row_sum(self, alpha: int) -> int:
        return sum(self.lam[alpha])


def _edges(label: str, rank: int) -> list[tuple[int, int]]:
    if label == "A":
        return [(i, i + 1) for i in range(rank - 1)]
    if label == "D":
        return [(i, i + 1) for i in range(rank - 3)] + [(rank - 3, rank - 2), (rank - 3, rank - 1)]
    if label == "E":
        chain = [0] + list(range(2, rank))
        return [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)] + [(1, 3)]
    raise AssertionError(label)


def parse_algebra(text: str) -> tuple[str, int]:
    """Split ``"D4"`` into ``("D", 4)``."""
    text = text.strip().upper()
    if len(text) < 2 or not text[1:].isdigit():
        raise ValueError(f"cannot parse algebra {text!r}; expected e.g. A1, D4, E6")
    return text[0], int(text[1:])


@lru_cache(maxsize=None)
def build_cartan(label: str, rank: int) -> CartanData:
    label = label.upper()
    ok = (
        (label == "A" and rank >= 1)
        or (label == "D" and rank >= 4)
        or (label == "E" and rank in (6, 7, 8))
    )
    if not ok:
        raise ValueError(f"unsupported simply-laced algebra {label}{rank}")

    C = [[2 if a == b else 0 for b in range(rank)] for a in range(rank)]
    for a, b in _edges(label, rank):
        C[a][b] = C[b][a] = -1

    M = sympy.Matrix(C)
    delta = int(M.det())
    inv = M.inv()
    Cinv = tuple(tuple(Fraction(int(inv[a, b].p), int(inv[a, b].q)) for b in range(rank)) for a in range(rank))
    lam = []
    for a in range(rank):
        row = []
        for b in range(rank):
            x = delta * Cinv[a][b]
            assert x.denominator == 1
            row.append(int(x))
        lam.append(tuple(row))

    return CartanData(
        label=label,
        rank=rank,
        C=tuple(tuple(r) for r in C),
        delta=delta,
        lam=tuple(lam),
        Cinv=Cinv,
    )


def cartan_from_name(text: str) -> CartanData:
    return build_cartan(*parse_algebra(text))


def min_matrix(k: int) -> Matrix:
    return tuple(tuple(min(i, j) for j in range(1, k + 1)) for i in range(1, k + 1))


@dataclass(frozen=True)
class FusionInput:
    """A product of KR modules.

    ``counts`` maps ``(alpha, i)`` with 1-based ``alpha`` to the number of copies
    of the KR module with highest weight ``i * omega_alpha``.
    """

    cartan: CartanData
    counts: tuple[tuple[tuple[int, int], int], ...] = ()
    lambda_weight: Optional[tuple[int, ...]] = None
    k: Optional[int] = None

    def __post_init__(self):
        r = self.cartan.rank
        merged: dict[tuple[int, int], int] = {}
        for (alpha, i), c in self.counts:
            if not 1 <= alpha <= r:
                raise ValueError(f"root index {alpha} outside [1, {r}]")
            if i < 1:
                raise ValueError(f"KR level must be >= 1, got {i}")
            if c < 0:
                raise ValueError("KR multiplicities must be nonnegative")
            merged[(alpha, i)] = merged.get((alpha, i), 0) + c
        object.__setattr__(self, "counts", tuple(sorted((key, c) for key, c in merged.items() if c)))
        if self.lambda_weight is not None:
            lw = tuple(int(x) for x in self.lambda_weight)
            if len(lw) != r or min(lw, default=0) < 0:
                raise ValueError(f"weight must be {r} nonnegative integers")
            object.__setattr__(self, "lambda_weight", lw)
        if self.k is not None and self.k < max(1, self.max_level):
            raise ValueError(f"k={self.k} below the largest KR level {self.max_level}")

    @classmethod
    def from_mapping(cls, cartan: CartanData, counts: Mapping[tuple[int, int], int], **kw) -> "FusionInput":
        return cls(cartan, tuple(counts.items()), **kw)

    @property
    def max_level(self) -> int:
        return max((i for (_, i), _c in self.counts), default=0)

    def count_map(self) -> dict[tuple[int, int], int]:
        return dict(self.counts)

    def n_rows(self, k: int) -> list[list[int]]:
        if k < self.max_level:
            raise ValueError(f"k={k} below the largest KR level {self.max_level}")
        rows = [[0] * k for _ in range(self.cartan.rank)]
        for (alpha, i), c in self.counts:
            rows[alpha - 1][i - 1] = c
        return rows

    def weighted_totals(self) -> list[int]:
        """``sum_i i * n[alpha, i]`` for each root."""
        tot = [0] * self.cartan.rank
        for (alpha, i), c in self.counts:
            tot[alpha - 1] += i * c
        return tot


def _check_shape(rows: Sequence[Sequence[int]], r: int, k: int, what: str) -> None:
    if len(rows) != r or any(len(row) != k for row in rows):
        raise ValueError(f"{what} must have shape {r}x{k}")


def p_vector(cartan: CartanData, n: Sequence[Sequence[int]], m: Sequence[Sequence[int]]) -> list[list[int]]:
    """``p = (I x A) n - (C x A) m``."""
    r = cartan.rank
    k = len(n[0]) if n else 0
    _check_shape(n, r, k, "n")
    _check_shape(m, r, k, "m")
    # (C x A) m = A applied levelwise to (C m)
    cm = [[sum(cartan.C[a][b] * m[b][i] for b in range(r)) for i in range(k)] for a in range(r)]
    out = []
    for a in range(r):
        diff = [n[a][i] - cm[a][i] for i in range(k)]
        out.append([sum(min(i, j) * diff[j - 1] for j in range(1, k + 1)) for i in range(1, k + 1)])
    return out


def q_vectors(fi: FusionInput, m: Sequence[Sequence[int]], k: Optional[int] = None, ell: Optional[Sequence[int]] = None):
    """Return ``(q0, q, p)`` for the summation vector ``m``.

    ``q[alpha][j]`` is ``q_{alpha, j}`` for ``j = 0..k`` (column 0 repeats ``q0``).
    """
    k = k if k is not None else (fi.k or len(m[0]))
    ell = tuple(ell) if ell is not None else fi.lambda_weight
    if ell is None:
        raise ValueError("a weight is required")
    n = fi.n_rows(k)
    p = p_vector(fi.cartan, n, m)
    q0 = [ell[a] - p[a][k - 1] for a in range(fi.cartan.rank)]
    q = [[q0[a]] + [q0[a] + p[a][j] for j in range(k)] for a in range(fi.cartan.rank)]
    return q0, q, p


def quadratic_form(fi: FusionInput, m: Sequence[Sequence[int]], k: Optional[int] = None) -> Fraction:
    """``Q(m, n) = -1/2 m . (p + (I x A) n)``."""
    k = k if k is not None else (fi.k or len(m[0]))
    return Fraction(quadratic_form_doubled(fi.cartan, fi.n_rows(k), m), 2)


def quadratic_form_doubled(cartan: CartanData, n: Sequence[Sequence[int]], m: Sequence[Sequence[int]]) -> int:
    r = cartan.rank
    k = len(n[0]) if n else 0
    p = p_vector(cartan, n, m)
    total = 0
    for a in range(r):
        for i in range(1, k + 1):
            if m[a][i - 1]:
                an = sum(min(i, j) * n[a][j - 1] for j in range(1, k + 1))
                total += m[a][i - 1] * (p[a][i - 1] + an)
    return -total


def quadratic_form_abel(cartan: CartanData, n, m, ell) -> Fraction:
    """Same value as :func:`quadratic_form` when ``q0 = 0``, written through
    successive differences of the ``q`` vectors (uses ``lam`` and ``delta``)."""
    r, lam, delta = cartan.rank, cartan.lam, cartan.delta
    k = len(n[0])
    p = p_vector(cartan, n, m)
    q0 = [ell[a] - p[a][k - 1] for a in range(r)]
    q = [[q0[a]] + [q0[a] + p[a][j] for j in range(k)] for a in range(r)]

    def form(x):
        return sum(x[a] * lam[a][b] * x[b] for a in range(r) for b in range(r))

    total = 0
    for j in range(1, k + 1):
        dq = [q[a][j - 1] - q[a][j] for a in range(r)]
        tail = [sum(n[a][i - 1] for i in range(j, k + 1)) for a in range(r)]
        total += form(dq) - form(tail)
    return Fraction(total, 2 * delta)
