"""Discrete degree-p cochains and the operations that make them classes.

A cochain of degree p stores components C^k for k = 0..p.  C^k maps a
k-simplex together with a strictly increasing multi-index of p-k+1
admissible charts to a value: C^0 holds logarithm lifts at vertices, C^k
for k >= 1 holds the integral of the k-form component over the simplex in
its canonical (ascending-vertex) orientation.  Evaluation at arbitrary
simplex orderings and multi-index orderings is totally antisymmetric;
repeated charts give 0.

The two differentials are the Čech delta (alternating omission of chart
indices) and the discrete exterior d (incidence-weighted sum over facets).
The cocycle conditions use the fixed sign convention

    delta C^k = (-1)^(p-k) * d C^(k-1)    for k = 1..p,

with level 0 replaced by integrality: delta C^0 must land in 2*pi*Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ._scalars import (
    Scalar,
    coerce,
    full_turn,
    integer_residual,
    tree_sum,
    zero,
)
from .cover import CoveredComplex, attach_cover
from .errors import CochainError
from .simplicial import (
    Simplex,
    disjoint_union,
    facets_of,
    glue_along_boundary,
    reverse_orientation,
    sort_with_parity,
)

MultiIndex = Tuple[int, ...]
Key = Tuple[int, Simplex, MultiIndex]


def _sort_index(indices: Sequence[int]) -> Tuple[MultiIndex, int]:
    """Sort a multi-index, returning parity; parity 0 flags a repeat."""
    idx = tuple(int(a) for a in indices)
    if len(set(idx)) != len(idx):
        return tuple(sorted(idx)), 0
    inversions = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                inversions += 1
    return tuple(sorted(idx)), (-1) ** inversions


class DeligneCochain:
    """Sparse cochain; missing entries are 0.  Use :func:`build_cochain`."""

    def __init__(
        self,
        base: CoveredComplex,
        degree: int,
        data: Dict[Key, Scalar],
        exact: bool,
        cocycle: bool = False,
    ):
        self.base = base
        self.degree = degree
        self._data = data
        self.exact = exact
        self.cocycle = cocycle

    def component(self, k: int, sigma: Sequence[int], indices: Sequence[int]) -> Scalar:
        """Evaluate C^k with antisymmetry in both arguments."""
        s, ps = sort_with_parity(tuple(sigma))
        idx, pi = _sort_index(indices)
        if pi == 0:
            return zero(self.exact)
        value = self._data.get((k, s, idx))
        if value is None:
            return zero(self.exact)
        return ps * pi * value

    def entries(self) -> Iterable[Tuple[int, Simplex, MultiIndex, Scalar]]:
        """Stored nonzero entries in canonical (k, simplex, indices) order."""
        for k, s, idx in sorted(self._data):
            yield k, s, idx, self._data[(k, s, idx)]

    def index_length(self, k: int) -> int:
        return self.degree - k + 1

    def __repr__(self) -> str:
        mode = "exact" if self.exact else "float"
        return (
            f"DeligneCochain(degree={self.degree}, entries={len(self._data)}, "
            f"{mode}, cocycle={self.cocycle})"
        )


def build_cochain(
    base: CoveredComplex,
    degree: int,
    entries: Iterable[Tuple[int, Sequence[int], Sequence[int], object]],
    exact: bool = False,
) -> DeligneCochain:
    """Build a cochain from (k, multi-index, simplex, value) entries.

    Indices and simplices may arrive in any order; the sorting parities
    are absorbed into the stored value.  Exact zeros are dropped, so the
    empty entry list is the zero cochain.  Conflicting duplicates raise.
    """
    if degree < 0:
        raise CochainError("cochain degree must be nonnegative")
    data: Dict[Key, Scalar] = {}
    for k, indices, simplex, raw in entries:
        if not 0 <= k <= degree:
            raise CochainError(f"component level {k} outside 0..{degree}")
        s, ps = sort_with_parity(tuple(simplex))
        if len(s) - 1 != k:
            raise CochainError(f"simplex {s} is not {k}-dimensional")
        if len(indices) != degree - k + 1:
            raise CochainError(
                f"level-{k} multi-index must have length {degree - k + 1}, "
                f"got {tuple(indices)}"
            )
        value = coerce(raw, exact)
        idx, pi = _sort_index(indices)
        if pi == 0:
            if value != 0:
                raise CochainError(
                    f"repeated chart index {tuple(indices)} with nonzero value"
                )
            continue
        adm = base.admissible_of(s)
        for a in idx:
            if a not in adm:
                raise CochainError(f"chart {a} is not admissible for {s}")
        key = (k, s, idx)
        canon = ps * pi * value
        if key in data and data[key] != canon:
            raise CochainError(f"conflicting duplicate entry at {key}")
        data[key] = canon
    for key in [key for key, v in data.items() if v == 0]:
        del data[key]
    return DeligneCochain(base, degree, data, exact)


def zero_cochain(base: CoveredComplex, degree: int, exact: bool = False) -> DeligneCochain:
    c = DeligneCochain(base, degree, {}, exact)
    c.cocycle = True
    return c


# -- differentials -----------------------------------------------------------


def cech_delta(c: DeligneCochain, sigma: Sequence[int], indices: Sequence[int]) -> Scalar:
    """(delta C^k)(sigma, indices), k = dim sigma, |indices| = stored + 1."""
    k = len(tuple(sigma)) - 1
    terms = [
        (-1) ** j * c.component(k, sigma, tuple(indices[:j]) + tuple(indices[j + 1:]))
        for j in range(len(indices))
    ]
    return tree_sum(terms, c.exact)


def discrete_d(c: DeligneCochain, sigma: Sequence[int], indices: Sequence[int]) -> Scalar:
    """(d C^(k-1))(sigma, indices) for a k-simplex sigma, via facets.

    The facet values are taken in canonical orientation; incidence signs
    carry the orientation bookkeeping.  Admissibility of the indices for
    the facets follows from admissibility for sigma.
    """
    s, ps = sort_with_parity(tuple(sigma))
    terms = [
        inc * c.component(len(tau) - 1, tau, indices)
        for tau, inc in facets_of(s)
    ]
    return ps * tree_sum(terms, c.exact)


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class FailedCondition:
    level: int
    simplex: Simplex
    indices: MultiIndex
    residual: Scalar
    witness: Optional[int] = None


@dataclass(frozen=True)
class CocycleReport:
    degree: int
    exact: bool
    tolerance: float
    worst: Mapping[int, Scalar]
    checked: Mapping[int, int]
    failing: Tuple[FailedCondition, ...]
    witnesses: Mapping[Tuple[Simplex, MultiIndex], int]

    @property
    def passed(self) -> bool:
        return not self.failing


def validate_cocycle(c: DeligneCochain, tol: float = 1e-9) -> CocycleReport:
    """Check integrality at level 0 and the sign-fixed gluing at k = 1..p.

    In exact mode the residual threshold is zero regardless of ``tol``.
    Passing sets the cochain's ``cocycle`` flag; failing clears it.
    """
    p = c.degree
    K = c.base.complex
    threshold = 0 if c.exact else tol
    worst: Dict[int, Scalar] = {}
    checked: Dict[int, int] = {}
    failing: List[FailedCondition] = []
    witnesses: Dict[Tuple[Simplex, MultiIndex], int] = {}

    # Level 0 residuals are measured in turns: |delta C^0 / 2pi - n|.
    turn = full_turn(c.exact)
    count = 0
    top = zero(c.exact)
    for v in K.simplices(0):
        for J in c.base.multi_indices(v, p + 2):
            n, residual = integer_residual(cech_delta(c, v, J), c.exact)
            residual = residual / turn
            count += 1
            if residual > top:
                top = residual
            if residual > threshold:
                failing.append(FailedCondition(0, v, J, residual, n))
                witnesses[(v, J)] = n
    worst[0] = top
    checked[0] = count

    for k in range(1, p + 1):
        count = 0
        top = zero(c.exact)
        sign = (-1) ** (p - k)
        for s in K.simplices(k):
            for J in c.base.multi_indices(s, p - k + 2):
                residual = abs(cech_delta(c, s, J) - sign * discrete_d(c, s, J))
                count += 1
                if residual > top:
                    top = residual
                if residual > threshold:
                    failing.append(FailedCondition(k, s, J, residual))
        worst[k] = top
        checked[k] = count

    report = CocycleReport(
        degree=p,
        exact=c.exact,
        tolerance=tol,
        worst=worst,
        checked=checked,
        failing=tuple(failing),
        witnesses=witnesses,
    )
    c.cocycle = report.passed
    return report


# -- algebra -----------------------------------------------------------------


def _require_same_base(a: DeligneCochain, b: DeligneCochain) -> None:
    if a.base is not b.base and a.base != b.base:
        raise CochainError("cochains live on different covered complexes")
    if a.exact != b.exact:
        raise CochainError("cannot mix exact and float cochains")


def tensor(c1: DeligneCochain, c2: DeligneCochain) -> DeligneCochain:
    """Componentwise sum: the log/integral picture of the tensor product."""
    _require_same_base(c1, c2)
    if c1.degree != c2.degree:
        raise CochainError("tensor needs equal degrees")
    data = dict(c1._data)
    for key, v in c2._data.items():
        s = data.get(key)
        total = v if s is None else s + v
        if total == 0:
            data.pop(key, None)
        else:
            data[key] = total
    return DeligneCochain(c1.base, c1.degree, data, c1.exact, c1.cocycle and c2.cocycle)


def dual(c: DeligneCochain) -> DeligneCochain:
    return DeligneCochain(
        c.base, c.degree, {k: -v for k, v in c._data.items()}, c.exact, c.cocycle
    )


def _shift_value(c: DeligneCochain, b: DeligneCochain, k: int, s: Simplex, J: MultiIndex) -> Scalar:
    """(c + D(b))^k at (s, J) with b of degree p-1 and b^p treated as 0."""
    p = c.degree
    value = c.component(k, s, J)
    if k <= b.degree:
        value = value + cech_delta_level(b, k, s, J)
    if k >= 1:
        value = value + (-1) ** (p - k) * discrete_d(b, s, J)
    return value


def cech_delta_level(c: DeligneCochain, k: int, sigma: Sequence[int], indices: Sequence[int]) -> Scalar:
    """Alternating omission sum of C^k at an explicit level.

    :func:`cech_delta` infers the level from the simplex dimension, which
    is right for a cochain evaluated inside its own degree; this variant is
    for a degree-(p-1) cochain appearing inside degree-p formulas.
    """
    terms = [
        (-1) ** j * c.component(k, sigma, tuple(indices[:j]) + tuple(indices[j + 1:]))
        for j in range(len(indices))
    ]
    return tree_sum(terms, c.exact)


def exact_shift(c: DeligneCochain, b: DeligneCochain) -> DeligneCochain:
    """c + D(b): the gauge orbit move.  Preserves the cocycle flag."""
    _require_same_base(c, b)
    if c.degree < 1 or b.degree != c.degree - 1:
        raise CochainError("exact_shift needs deg(b) = deg(c) - 1 >= 0")
    p = c.degree
    K = c.base.complex
    data: Dict[Key, Scalar] = {}
    for k in range(0, p + 1):
        for s in K.simplices(k):
            for J in c.base.multi_indices(s, p - k + 1):
                v = _shift_value(c, b, k, s, J)
                if v != 0:
                    data[(k, s, J)] = v
    return DeligneCochain(c.base, p, data, c.exact, c.cocycle)


@dataclass(frozen=True)
class TrivializationReport:
    degree: int
    exact: bool
    tolerance: float
    lower_worst: Mapping[int, Scalar]
    lower_failing: Tuple[FailedCondition, ...]
    top_residuals: Mapping[Simplex, Scalar]
    top_spread: Scalar
    is_trivial: bool


def verify_trivialization(
    c: DeligneCochain, b: DeligneCochain, tol: float = 1e-9
) -> TrivializationReport:
    """Check c = D(b) level by level; report top-level obstruction data.

    Levels k < p must match exactly (within tol); the top level residual
    r(sigma^p, alpha) = c^p - d b^(p-1) is reported per top simplex at its
    first admissible chart, together with the worst spread over charts.
    The candidate trivializes c iff every residual passes.
    """
    _require_same_base(c, b)
    if c.degree < 1 or b.degree != c.degree - 1:
        raise CochainError("trivialization candidate must have degree p - 1")
    p = c.degree
    K = c.base.complex
    threshold = 0 if c.exact else tol
    nothing = zero_cochain(c.base, p, c.exact)
    lower_worst: Dict[int, Scalar] = {}
    lower_failing: List[FailedCondition] = []
    for k in range(0, p):
        top = zero(c.exact)
        for s in K.simplices(k):
            for J in c.base.multi_indices(s, p - k + 1):
                shifted = _shift_value(nothing, b, k, s, J)
                residual = abs(c.component(k, s, J) - shifted)
                if residual > top:
                    top = residual
                if residual > threshold:
                    lower_failing.append(FailedCondition(k, s, J, residual))
        lower_worst[k] = top

    top_residuals: Dict[Simplex, Scalar] = {}
    spread = zero(c.exact)
    ok = not lower_failing
    for s in K.simplices(p):
        values = [
            c.component(p, s, (a,)) - discrete_d(b, s, (a,))
            for a in c.base.admissible_of(s)
        ]
        top_residuals[s] = values[0]
        local = max(abs(v - values[0]) for v in values)
        if local > spread:
            spread = local
        if any(abs(v) > threshold for v in values):
            ok = False
    return TrivializationReport(
        degree=p,
        exact=c.exact,
        tolerance=tol,
        lower_worst=lower_worst,
        lower_failing=tuple(lower_failing),
        top_residuals=top_residuals,
        top_spread=spread,
        is_trivial=ok,
    )


# -- integer class extraction -------------------------------------------------


@dataclass(frozen=True)
class IntegerCechCocycle:
    """Integer Čech cocycle of multi-index length p+2 on the vertex set."""

    base: CoveredComplex
    length: int
    entries: Mapping[Tuple[Simplex, MultiIndex], int] = field(default_factory=dict)

    def value(self, v: Sequence[int], indices: Sequence[int]) -> int:
        idx, pi = _sort_index(indices)
        if pi == 0:
            return 0
        return pi * self.entries.get((tuple(v), idx), 0)


def chern_cocycle(c: DeligneCochain, tol: float = 1e-9) -> IntegerCechCocycle:
    """Round delta C^0 / 2pi to the integer Čech cocycle of the class.

    Requires the cocycle flag; raises on any integrality residual beyond
    tol (beyond exact zero in exact mode).  The closedness delta n = 0 is
    verified exactly in integer arithmetic.
    """
    if not c.cocycle:
        raise CochainError("chern_cocycle requires a cochain flagged as cocycle")
    p = c.degree
    K = c.base.complex
    threshold = 0 if c.exact else tol
    turn = full_turn(c.exact)
    entries: Dict[Tuple[Simplex, MultiIndex], int] = {}
    for v in K.simplices(0):
        for J in c.base.multi_indices(v, p + 2):
            n, residual = integer_residual(cech_delta(c, v, J), c.exact)
            if residual / turn > threshold:
                raise CochainError(
                    f"integrality violation at {v} {J}: residual {residual}"
                )
            if n != 0:
                entries[(v, J)] = n
    cocycle = IntegerCechCocycle(c.base, p + 2, entries)
    for v in K.simplices(0):
        for J in c.base.multi_indices(v, p + 3):
            total = sum(
                (-1) ** j * cocycle.value(v, J[:j] + J[j + 1:])
                for j in range(len(J))
            )
            if total != 0:
                raise CochainError(f"rounded cocycle is not closed at {v} {J}")
    return cocycle


def restrict_cochain(c: DeligneCochain, sub: CoveredComplex) -> DeligneCochain:
    """Restriction to a subcomplex cover: keep entries whose simplex survives.

    The degree is unchanged; components above the subcomplex dimension
    simply have no simplices to live on.  A restricted cocycle stays a
    cocycle, so the flag is carried over.
    """
    data = {
        (k, s, J): v
        for (k, s, J), v in c._data.items()
        if sub.complex.has(s)
    }
    return DeligneCochain(sub, c.degree, data, c.exact, c.cocycle)


def reverse_cochain(c: DeligneCochain) -> DeligneCochain:
    """The same data over the orientation-reversed complex.

    Values are stored against canonical vertex order, so they transfer
    verbatim; only the top parities flip.  Cocycle conditions are computed
    in canonical order too, hence the flag survives.
    """
    K2 = reverse_orientation(c.base.complex)
    cov2 = attach_cover(
        K2, c.base.num_sets, {t: c.base.admissible_of(t) for t in K2.tops}
    )
    return DeligneCochain(cov2, c.degree, dict(c._data), c.exact, c.cocycle)


def _relabel_entry_simplex(s: Simplex, mapping: Mapping[int, int]) -> Tuple[Simplex, int]:
    renamed = tuple(mapping.get(v, v) for v in s)
    return sort_with_parity(renamed)


def disjoint_union_cochains(
    c1: DeligneCochain, c2: DeligneCochain
) -> Tuple[DeligneCochain, Dict[int, int]]:
    """Cochain on the disjoint union; returns the label shift applied to
    the second complex.  Chart indices must refer to one shared cover
    numbering, as flags never mix the two pieces."""
    if c1.degree != c2.degree or c1.exact != c2.exact:
        raise CochainError("disjoint union needs matching degree and arithmetic")
    K, shift = disjoint_union(c1.base.complex, c2.base.complex)
    num_sets = max(c1.base.num_sets, c2.base.num_sets)
    admissible = {t: c1.base.admissible_of(t) for t in c1.base.complex.tops}
    for t in c2.base.complex.tops:
        s, _ = _relabel_entry_simplex(t, shift)
        admissible[s] = c2.base.admissible_of(t)
    cov = attach_cover(K, num_sets, admissible)
    entries = [(k, J, s, v) for k, s, J, v in c1.entries()]
    for k, s, J, v in c2.entries():
        s2, parity = _relabel_entry_simplex(s, shift)
        entries.append((k, J, s2, parity * v))
    out = build_cochain(cov, c1.degree, entries, exact=c1.exact)
    out.cocycle = c1.cocycle and c2.cocycle
    return out, shift


def glue_cochains(
    c1: DeligneCochain,
    c2: DeligneCochain,
    matching: Mapping[int, int],
) -> Tuple[DeligneCochain, Dict[int, int]]:
    """Glue along matched boundary vertices (second complex's labels as
    keys).  Both cochains must use one shared cover numbering, and their
    data must agree exactly on the identified seam; returns the glued
    cochain and the relabeling applied to the second complex."""
    if c1.degree != c2.degree or c1.exact != c2.exact:
        raise CochainError("glued cochains need matching degree and arithmetic")
    if c1.base.num_sets != c2.base.num_sets:
        raise CochainError("glued cochains must share a cover numbering")
    K, relabel = glue_along_boundary(c1.base.complex, c2.base.complex, matching)
    admissible = {t: c1.base.admissible_of(t) for t in c1.base.complex.tops}
    for t in c2.base.complex.tops:
        s, _ = _relabel_entry_simplex(t, relabel)
        admissible[s] = c2.base.admissible_of(t)
    cov = attach_cover(K, c1.base.num_sets, admissible)
    entries = [(k, J, s, v) for k, s, J, v in c1.entries()]
    for k, s, J, v in c2.entries():
        s2, parity = _relabel_entry_simplex(s, relabel)
        entries.append((k, J, s2, parity * v))
    try:
        out = build_cochain(cov, c1.degree, entries, exact=c1.exact)
    except CochainError as e:
        raise CochainError(f"seam data disagrees: {e}") from None
    out.cocycle = c1.cocycle and c2.cocycle
    return out, relabel


def random_cochain(
    base: CoveredComplex,
    degree: int,
    seed: int,
    exact: bool = False,
    denominator: int = 64,
) -> DeligneCochain:
    """A dense pseudorandom cochain, reproducible from the seed.

    Not a cocycle in general; meant as shift data b or as raw material for
    corruption tests.  Exact mode draws rational turns with the given
    denominator, float mode draws radians in (-pi, pi)."""
    import random as _random

    rng = _random.Random(seed)
    entries = []
    K = base.complex
    for k in range(min(degree, K.dim) + 1):
        length = degree - k + 1
        for s in K.simplices(k):
            for J in base.multi_indices(s, length):
                if exact:
                    num = rng.randrange(-denominator, denominator + 1)
                    val: Scalar = coerce(f"{num}/{denominator}", True)
                else:
                    val = rng.uniform(-3.141592653589793, 3.141592653589793)
                entries.append((k, J, s, val))
    return build_cochain(base, degree, entries, exact=exact)
