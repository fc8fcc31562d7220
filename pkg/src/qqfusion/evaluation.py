"""Matrix-element route to graded multiplicities.

A product of Q-system solutions is pushed through the polynomiality map
:func:`phi` (drop monomials with negative powers of the level-1 generators and
evaluate the leftmost level-0 block) and paired with the moments
``mu[ell, j] = <0| prod Q[a,1]^j_a |ell>``.  For A1 there is a second route
through the constant term of a truncated series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cartan import CartanData, FusionInput
from .fermionic import MultiplicityResult, dominant_weights, n_sum
from .qsystem import QSolutionTable, shared_table
from .qtorus import TorusElement, monomial_inverse, product, product_all
from .scalars import QPoly, TheoremViolation, TPoly, embed_q, extract_v, gaussian_binomial, v_to_t

Weight = tuple[int, ...]


class MomentOutOfRange(LookupError):
    """A moment outside the table bounds was requested; build a larger table."""


@dataclass
class Q1Polynomial:
    """``sum_j c_j(t) prod_a Q[a,1]^j_a`` with nonnegative ``j``."""

    rank: int
    terms: dict[Weight, TPoly] = field(default_factory=dict)

    def __post_init__(self):
        for j in self.terms:
            if len(j) != self.rank or min(j, default=0) < 0:
                raise ValueError(f"bad exponent {j}")
        self.terms = {tuple(j): c for j, c in self.terms.items() if c}

    def degree_bounds(self) -> Weight:
        return tuple(max((j[a] for j in self.terms), default=0) for a in range(self.rank))

    def to_torus(self, cartan: CartanData) -> TorusElement:
        zero = (0,) * cartan.rank
        return TorusElement(cartan, {zero + j: c for j, c in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for j in sorted(self.terms, reverse=True):
            gens = "*".join(
                (f"Q[{a + 1},1]" if e == 1 else f"Q[{a + 1},1]^{e}") for a, e in enumerate(j) if e
            )
            parts.append(f"({self.terms[j]})" + (f"*{gens}" if gens else ""))
        return " + ".join(parts)


def phi(p: TorusElement) -> Q1Polynomial:
    """Polynomial in the level-1 generators representing ``<0| p``.

    Valid for ``p`` in the algebra generated by ``Q[a,0]^(+-1)`` and
    ``Q[a,i]`` with ``i >= 1``; outside it the result is not meaningful.
    """
    c = p.cartan
    r = c.rank
    rows = [c.lambda_row_sum(a) for a in range(r)]
    out: dict[Weight, dict[int, int]] = {}
    for key, coeff in p.raw_terms.items():
        a, b = key[:r], key[r:]
        if min(b) < 0:
            continue
        shift = -2 * sum(a[i] * rows[i] for i in range(r))
        acc = out.setdefault(b, {})
        for e, x in coeff.items():
            s = acc.get(e + shift, 0) + x
            if s:
                acc[e + shift] = s
            else:
                del acc[e + shift]
    return Q1Polynomial(r, {j: TPoly(v) for j, v in out.items() if v})


# moments ----------------------------------------------------------------------------

def _moment_prefactor_doubled(cartan: CartanData, ell: Sequence[int], j: Sequence[int]) -> int:
    """Doubled t-exponent ``-(sum ell_a lam_aa + sum_ab [(j_a+1) lam_ab (j_b+1) - lam_ab])``."""
    r = cartan.rank
    lam = cartan.lam
    total = sum(ell[a] * lam[a][a] for a in range(r))
    total += sum((j[a] + 1) * lam[a][b] * (j[b] + 1) - lam[a][b] for a in range(r) for b in range(r))
    return -total


def moment_from_nsum(cartan: CartanData, ell: Sequence[int], j: Sequence[int]) -> TPoly:
    """``mu[ell, j]`` seeded by the unrestricted sum with ``n[a,1] = j_a``."""
    fi = FusionInput(cartan, tuple(((a + 1, 1), j[a]) for a in range(cartan.rank) if j[a]))
    mult = n_sum(fi, ell)
    return v_to_t(mult, cartan.delta).map_exponents(
        lambda e: e + _moment_prefactor_doubled(cartan, ell, j), cls=TPoly
    )


def moment_closed_form_A1(ell: int, j: int) -> TPoly:
    """A1 moments from the second change of basis, with ``q = t^-2``."""
    if j < ell or (j - ell) % 2:
        return TPoly()
    h = (j - ell) // 2
    diff = gaussian_binomial(j, h) - gaussian_binomial(j, h - 1)
    return embed_q(diff, 2).map_exponents(lambda e: e - ell * (ell + 3), cls=TPoly)


class MomentTable:
    """Lazily filled table of ``mu[ell, j]`` inside fixed bounds."""

    def __init__(self, cartan: CartanData, max_ell: Sequence[int] | int, max_j: Sequence[int] | int):
        r = cartan.rank
        self.cartan = cartan
        self.max_ell = (max_ell,) * r if isinstance(max_ell, int) else tuple(max_ell)
        self.max_j = (max_j,) * r if isinstance(max_j, int) else tuple(max_j)
        if len(self.max_ell) != r or len(self.max_j) != r or min(self.max_ell + self.max_j) < 0:
            raise ValueError("bounds must be nonnegative, one per root")
        self.moments: dict[tuple[Weight, Weight], TPoly] = {}

    def covers(self, ell: Sequence[int], j: Sequence[int]) -> bool:
        return all(0 <= x <= m for x, m in zip(ell, self.max_ell)) and all(
            0 <= x <= m for x, m in zip(j, self.max_j)
        )

    def __getitem__(self, key: tuple[Sequence[int], Sequence[int]]) -> TPoly:
        ell, j = tuple(key[0]), tuple(key[1])
        if not self.covers(ell, j):
            raise MomentOutOfRange(f"moment ell={ell}, j={j} outside bounds ell<={self.max_ell}, j<={self.max_j}")
        val = self.moments.get((ell, j))
        if val is None:
            val = self.moments[(ell, j)] = moment_from_nsum(self.cartan, ell, j)
        return val


def build_moments(cartan: CartanData, max_ell: Sequence[int] | int, max_j: Sequence[int] | int) -> MomentTable:
    """Moment table; for A1 every entry is filled now and checked against the closed form."""
    table = MomentTable(cartan, max_ell, max_j)
    if cartan.name == "A1":
        for ell in range(table.max_ell[0] + 1):
            for j in range(table.max_j[0] + 1):
                seeded = table[((ell,), (j,))]
                if seeded != moment_closed_form_A1(ell, j):
                    raise TheoremViolation(f"A1 moment mismatch at ell={ell}, j={j}")
    return table


# A1 change of basis -----------------------------------------------------------------

def basis_to_powers_A1(max_m: int) -> dict[tuple[int, int], TPoly]:
    """``<m| = sum_i B[m, i] <0| Q[1,1]^i`` (``q = t^-2``)."""
    out = {}
    for m in range(max_m + 1):
        for j in range(m // 2 + 1):
            i = m - 2 * j
            g = embed_q(gaussian_binomial(m - j, i), 2)
            c = g.map_exponents(lambda e: e + m * (m + 3) - 2 * j * (j + 1), cls=TPoly)
            out[(m, i)] = -c if j % 2 else c
    return out


def powers_to_basis_A1(max_n: int) -> dict[tuple[int, int], TPoly]:
    """``<0| Q[1,1]^n = sum_ell mu[ell, n] <ell|``."""
    out = {}
    for n in range(max_n + 1):
        for ell in range(n + 1):
            val = moment_closed_form_A1(ell, n)
            if val:
                out[(n, ell)] = val
    return out


def change_of_basis_is_inverse_A1(size: int) -> bool:
    """Whether the two A1 basis-change matrices compose to the identity up to ``size``."""
    first = basis_to_powers_A1(size)
    second = powers_to_basis_A1(size)
    for m in range(size + 1):
        for ell in range(size + 1):
            total = TPoly()
            for i in range(size + 1):
                a = first.get((m, i))
                b = second.get((i, ell))
                if a is not None and b is not None:
                    total = total + a * b
            if total != (TPoly.constant(1) if m == ell else TPoly()):
                return False
    return True


# vacuum pairing and multiplicities --------------------------------------------------

def vacuum_pair(p: TorusElement | Q1Polynomial, ell: Sequence[int], moments: MomentTable) -> TPoly:
    """``<0| p |ell>`` as ``sum_j phi(p)_j mu[ell, j]``."""
    poly = p if isinstance(p, Q1Polynomial) else phi(p)
    ell = tuple(ell)
    total = TPoly()
    for j, c in poly.terms.items():
        mu = moments[(ell, j)]
        if mu:
            total = total + c * mu
    return total


def kr_product(fi: FusionInput, table: QSolutionTable) -> TorusElement:
    """``prod_i prod_a Q[a,i]^n[a,i]`` with ascending ``i`` leftmost."""
    factors = []
    for (alpha, i), count in sorted(fi.counts, key=lambda kv: (kv[0][1], kv[0][0])):
        factors.extend([table[(alpha, i)]] * count)
    return product_all(factors, fi.cartan)


def _matrix_prefactor_doubled(fi: FusionInput, ell: Sequence[int]) -> int:
    """Doubled t-exponent ``2 sum n_ai lam_ab + sum ell_a lam_aa + n.(lam x A).n``."""
    c = fi.cartan
    r = c.rank
    lam = c.lam
    counts = fi.counts
    linear = sum(n * sum(lam[a - 1]) for (a, _i), n in counts)
    quad = sum(
        n1 * n2 * lam[a1 - 1][a2 - 1] * min(i1, i2) for (a1, i1), n1 in counts for (a2, i2), n2 in counts
    )
    return 2 * linear + sum(ell[a] * lam[a][a] for a in range(r)) + quad


def matrix_multiplicity(
    fi: FusionInput,
    ell: Sequence[int],
    table: Optional[QSolutionTable] = None,
    moments: Optional[MomentTable] = None,
    _poly: Optional[Q1Polynomial] = None,
) -> QPoly:
    """Graded multiplicity of ``V_ell`` from the vacuum matrix element of the KR product."""
    c = fi.cartan
    ell = tuple(ell)
    if _poly is None:
        table = table or shared_table(c, max(1, fi.max_level))
        _poly = phi(kr_product(fi, table))
    if moments is None:
        moments = MomentTable(c, ell, _poly.degree_bounds())
    raw = vacuum_pair(_poly, ell, moments)
    shifted = raw.map_exponents(lambda e: e + _matrix_prefactor_doubled(fi, ell), cls=TPoly)
    return extract_v(shifted, c.delta)


def fusion_decompose_matrix(
    fi: FusionInput, table: Optional[QSolutionTable] = None, moments: Optional[MomentTable] = None
) -> MultiplicityResult:
    """All multiplicities by the matrix-element route."""
    c = fi.cartan
    table = table or shared_table(c, max(1, fi.max_level))
    poly = phi(kr_product(fi, table))
    weights = [fi.lambda_weight] if fi.lambda_weight is not None else dominant_weights(fi)
    if moments is None and weights:
        bound = tuple(max(w[a] for w in weights) for a in range(c.rank))
        moments = MomentTable(c, bound, poly.degree_bounds())
    entries = {ell: matrix_multiplicity(fi, ell, table, moments, _poly=poly) for ell in weights}
    result = MultiplicityResult(c.name, entries, method="matrix", k_used=max(1, fi.max_level))
    result.check_graded()
    return result


# A1 constant-term route ---------------------------------------------------------------

def _truncate(x: TorusElement, depth: int) -> TorusElement:
    return x.filter(lambda a, b: b[0] >= -depth)


def _tproduct(x: TorusElement, y: TorusElement, depth: int) -> TorusElement:
    return _truncate(product(x, y), depth)


def _inverse_series(q: TorusElement, depth: int) -> TorusElement:
    """``q^-1`` as a series in ``Q[1,1]^-1``, kept to degree ``-depth``.

    ``q = L (1 + E)`` with ``L`` its top monomial in ``Q[1,1]``; ``E`` has only
    negative ``Q[1,1]`` degree, so ``q^-1 = sum_s (-E)^s L^-1`` converges.
    """
    c = q.cartan
    top = max(k[1] for k in q.raw_terms)
    lead = q.filter(lambda a, b: b[0] == top)
    if len(lead) != 1:
        raise TheoremViolation("leading Q[1,1] coefficient is not a monomial")
    lead_inv = monomial_inverse(lead)
    err = product(lead_inv, q - lead)
    # (1 + E)^-1 is needed down to degree top - depth only
    inner = max(depth - top, 0)
    one = TorusElement.scalar(c, 1)
    total = one
    power = one
    while True:
        power = _tproduct(power, -err, inner)
        if not power:
            break
        total = total + power
    return _tproduct(total, lead_inv, depth)


_z_cache: dict[tuple[int, int], TorusElement] = {}


def _z_series(table: QSolutionTable, depth: int) -> TorusElement:
    """``Q[0] Q[1]^-1 prod_{j>=1} (1 - Q[j]^-2)^-1`` truncated at ``Q[1,1]``-degree ``-depth``."""
    key = (id(table), depth)
    if key not in _z_cache:
        _z_cache[key] = _build_z_series(table, depth)
    return _z_cache[key]


def _build_z_series(table: QSolutionTable, depth: int) -> TorusElement:
    c = table.cartan
    one = TorusElement.scalar(c, 1)
    body = one
    # Q[j]^-2 starts in degree -2j, so factors with 2j > depth are 1 at this depth
    for j in range(1, depth // 2 + 1):
        inv = _inverse_series(table[(1, j)], depth)
        inv2 = _tproduct(inv, inv, depth)
        geom = one
        power = one
        while True:
            power = _tproduct(power, inv2, depth)
            if not power:
                break
            geom = geom + power
        body = _tproduct(body, geom, depth)
    lead = product(table[(1, 0)], monomial_inverse(table[(1, 1)]))
    return _tproduct(lead, body, depth)


def _ct_z_at_depth(fi: FusionInput, ell: int, table: QSolutionTable, depth: int) -> TPoly:
    c = fi.cartan
    z = _z_series(table, depth)
    zpow = TorusElement.scalar(c, 1)
    for _ in range(ell + 1):
        zpow = _tproduct(zpow, z, depth)
    left = product(table[(1, 1)], monomial_inverse(table[(1, 0)]))
    left = product(left, kr_product(fi, table))
    full = product(left, zpow)
    # constant term in Q[1,1], then Q[1,0] -> 1 (the level-0 block is leftmost)
    total: dict[int, int] = {}
    for key, coeff in full.raw_terms.items():
        if key[1] == 0:
            for e, x in coeff.items():
                total[e] = total.get(e, 0) + x
    return TPoly({e: x for e, x in total.items() if x})


def ct_z_multiplicity_A1(
    fi: FusionInput, ell: Sequence[int] | int, table: Optional[QSolutionTable] = None, max_depth: int = 256
) -> QPoly:
    """A1 multiplicity as the evaluated constant term of a truncated series in ``Q[1,1]^-1``.

    The left factor ``Q[1] Q[0]^-1 prod Q[i]^n_i`` has top ``Q[1,1]``-degree
    ``1 + sum i n_i`` and every factor of the series has nonpositive degree, so
    truncating at that depth is already exact.  The depth is still doubled
    until two consecutive results agree, as a guard.
    """
    c = fi.cartan
    if c.name != "A1":
        raise ValueError("the constant-term route is implemented for A1 only")
    ell = ell if isinstance(ell, int) else ell[0]
    table = table or shared_table(c, max(1, fi.max_level))
    weighted = fi.weighted_totals()[0]
    depth = weighted + 1
    prev = _ct_z_at_depth(fi, ell, table, depth)
    while True:
        depth *= 2
        if depth > max_depth:
            raise TheoremViolation("constant term did not stabilize within the depth limit")
        cur = _ct_z_at_depth(fi, ell, table, depth)
        if cur == prev:
            break
        prev = cur
    counts = fi.counts
    total_n = sum(n for _key, n in counts)
    quad = sum(n1 * n2 * min(i1, i2) for (_a, i1), n1 in counts for (_b, i2), n2 in counts)
    # t^(sum n + (ell + n.A.n) / 2)
    shifted = cur.map_exponents(lambda e: e + 2 * total_n + ell + quad, cls=TPoly)
    return extract_v(shifted, c.delta)


def fusion_decompose_ctz(fi: FusionInput, table: Optional[QSolutionTable] = None) -> MultiplicityResult:
    c = fi.cartan
    if c.name != "A1":
        raise ValueError("the constant-term route is implemented for A1 only")
    weights = [fi.lambda_weight] if fi.lambda_weight is not None else dominant_weights(fi)
    entries = {ell: ct_z_multiplicity_A1(fi, ell, table) for ell in weights}
    result = MultiplicityResult(c.name, entries, method="ctz", k_used=max(1, fi.max_level))
    result.check_graded()
    return result
