"""Restricted (M) and unrestricted (N) fermionic sums at finite truncation level k.

Both sums run over ``m`` with ``q0 = 0``.  Row ``k`` of ``p`` turns that
condition into ``sum_i i * m[b][i] = K_b`` with ``K = C^-1 (N - ell)`` and
``N_a = sum_i i * n[a][i]``, so the domain is a product of bounded partition
sets, one per root.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .cartan import CartanData, FusionInput, build_cartan, p_vector, quadratic_form_doubled
from .scalars import LaurentPoly, QPoly, TheoremViolation, q_to_v, qbinomial

Weight = tuple[int, ...]


def worker_count() -> int:
    """Worker processes allowed by ``QQFUSION_THREADS`` (default 1)."""
    raw = os.environ.get("QQFUSION_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class MultiplicityResult:
    """Graded multiplicities ``ell -> M(v)`` with ``v = q^-1``; zero entries omitted."""

    algebra: str
    entries: dict[Weight, QPoly] = field(default_factory=dict)
    method: str = "msum"
    k_used: int = 0

    def __post_init__(self):
        self.entries = {tuple(k): v for k, v in self.entries.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiplicityResult):
            return NotImplemented
        return self.algebra == other.algebra and self.entries == other.entries

    def same_as(self, other: "MultiplicityResult") -> bool:
        return self == other

    def sorted_items(self) -> list[tuple[Weight, QPoly]]:
        """Components in reverse lex order of the weight (highest first)."""
        return sorted(self.entries.items(), key=lambda kv: kv[0], reverse=True)

    def at_v_equals_one(self) -> dict[Weight, int]:
        return {k: v.at_one() for k, v in self.entries.items()}

    def check_graded(self) -> None:
        for ell, poly in self.entries.items():
            if any(e < 0 for e in poly.raw_terms):
                raise TheoremViolation(f"negative v-exponent at {ell}: {poly}")
            if self.method == "msum" and any(c < 0 for c in poly.raw_terms.values()):
                raise TheoremViolation(f"negative coefficient at {ell}: {poly}")


# k selection and summation domain ----------------------------------------------------

def _cinv_times(cartan: CartanData, vec: Sequence[int]) -> list[Fraction]:
    r = cartan.rank
    return [sum((cartan.Cinv[b][a] * vec[a] for a in range(r)), Fraction(0)) for b in range(r)]


def auto_k(fi: FusionInput) -> int:
    """Truncation level large enough for every weight, plus one for a stability margin.

    Beyond ``max(max KR level, max_b (C^-1 N)_b)`` every extra level carries
    ``m = 0`` and contributes a trivial factor; the ``ceil(sum N / 2)`` term is
    the A1 bound generalized conservatively.
    """
    totals = fi.weighted_totals()
    kmax = _cinv_times(fi.cartan, totals)
    base = max(fi.max_level, math.ceil(sum(totals) / 2), max((math.floor(x) for x in kmax), default=0))
    return base + 1


def root_targets(fi: FusionInput, ell: Sequence[int]) -> Optional[list[int]]:
    """``K_b`` for each root, or ``None`` if some ``K_b`` is not a nonnegative integer."""
    totals = fi.weighted_totals()
    diff = [totals[a] - ell[a] for a in range(fi.cartan.rank)]
    out = []
    for x in _cinv_times(fi.cartan, diff):
        if x.denominator != 1 or x < 0:
            return None
        out.append(int(x))
    return out


@lru_cache(maxsize=None)
def _partitions(total: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    """Multiplicity vectors ``(m_1..m_max_part)`` with ``sum_i i * m_i = total``."""
    if total == 0:
        return ((0,) * max_part,)
    if max_part == 0:
        return ()
    out = []
    for c in range(total // max_part + 1):
        for rest in _partitions(total - c * max_part, max_part - 1):
            out.append(rest + (c,))
    return tuple(out)


def enumerate_m(fi: FusionInput, ell: Sequence[int], k: int) -> Iterator[list[list[int]]]:
    """All ``m`` (shape ``r x k``) with ``q0 = 0``."""
    targets = root_targets(fi, ell)
    if targets is None:
        return
    per_root = [_partitions(K, k) for K in targets]
    for combo in itertools.product(*per_root):
        yield [list(row) for row in combo]


def dominant_weights(fi: FusionInput) -> list[Weight]:
    """Weights ``ell >= 0`` with every ``K_b`` a nonnegative integer."""
    c = fi.cartan
    r = c.rank
    totals = fi.weighted_totals()
    upper = [math.floor(x) for x in _cinv_times(c, totals)]
    out = []
    for K in itertools.product(*(range(u + 1) for u in upper)):
        ell = tuple(totals[a] - sum(c.C[a][b] * K[b] for b in range(r)) for a in range(r))
        if min(ell, default=0) >= 0:
            out.append(ell)
    return sorted(out, reverse=True)


# the sums --------------------------------------------------------------------------

def _fermionic_sum(fi: FusionInput, ell: Sequence[int], k: Optional[int], restricted: bool) -> QPoly:
    ell = tuple(ell)
    if len(ell) != fi.cartan.rank or min(ell, default=0) < 0:
        raise ValueError(f"weight must be {fi.cartan.rank} nonnegative integers")
    k = k or fi.k or auto_k(fi)
    n = fi.n_rows(k)
    r = fi.cartan.rank
    acc: dict[int, int] = {}
    for m in enumerate_m(fi, ell, k):
        p = p_vector(fi.cartan, n, m)
        if restricted and any(x < 0 for row in p for x in row):
            continue
        term = LaurentPoly({0: 1}, var="q")
        for a in range(r):
            for i in range(k):
                if m[a][i]:
                    term = term * qbinomial(m[a][i], p[a][i])
                    if not term:
                        break
            if not term:
                break
        if not term:
            continue
        twice_q = quadratic_form_doubled(fi.cartan, n, m)
        if twice_q % 2:
            raise TheoremViolation("quadratic form is not an integer")
        shift = twice_q // 2
        for e, c in term.raw_terms.items():
            s = acc.get(e + shift, 0) + c
            if s:
                acc[e + shift] = s
            else:
                acc.pop(e + shift, None)
    result = q_to_v(LaurentPoly(acc, var="q"))
    if any(e < 0 for e in result.raw_terms):
        raise TheoremViolation(f"fermionic sum has negative powers of v: {result}")
    return result


def m_sum(fi: FusionInput, ell: Sequence[int], k: Optional[int] = None) -> QPoly:
    """Restricted sum (``p >= 0`` everywhere), as a polynomial in ``v``."""
    return _fermionic_sum(fi, ell, k, restricted=True)


def n_sum(fi: FusionInput, ell: Sequence[int], k: Optional[int] = None) -> QPoly:
    """Unrestricted sum, as a polynomial in ``v``."""
    return _fermionic_sum(fi, ell, k, restricted=False)


def _sum_job(args):
    label, rank, counts, ell, k, restricted = args
    fi = FusionInput(build_cartan(label, rank), counts)
    return ell, _fermionic_sum(fi, ell, k, restricted)


def fusion_decompose_fermionic(fi: FusionInput, method: str = "msum", k: Optional[int] = None) -> MultiplicityResult:
    """Every nonzero multiplicity, by the M-sum (default) or the N-sum."""
    if method not in ("msum", "nsum"):
        raise ValueError("method must be 'msum' or 'nsum'")
    restricted = method == "msum"
    k = k or fi.k or auto_k(fi)
    weights = [fi.lambda_weight] if fi.lambda_weight is not None else dominant_weights(fi)
    workers = worker_count()
    c = fi.cartan
    if workers > 1 and len(weights) > 1:
        jobs = [(c.label, c.rank, fi.counts, ell, k, restricted) for ell in weights]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = dict(pool.map(_sum_job, jobs))
    else:
        entries = {ell: _fermionic_sum(fi, ell, k, restricted) for ell in weights}
    result = MultiplicityResult(c.name, entries, method=method, k_used=k)
    result.check_graded()
    return result
