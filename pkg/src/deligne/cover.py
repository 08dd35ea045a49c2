"""Combinatorial good covers and chart index maps.

A cover assigns to every top simplex a nonempty set of chart indices; a
lower simplex is admissible for the union of the sets of the tops that
contain it.  This encodes "the closed simplex lies inside the chart" and
makes admissibility monotone under taking faces, which is what every
multi-index in a cochain relies on.

An index map picks one admissible chart per simplex.  Holonomy and
transgression values must not depend on the pick; that independence is a
theorem, not an assumption, and the test suite exercises it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .errors import CoverError
from .simplicial import Simplex, SimplicialComplex, sort_with_parity


@dataclass(frozen=True)
class CoveredComplex:
    """A complex together with per-simplex admissible chart sets."""

    complex: SimplicialComplex
    num_sets: int
    admissible: Mapping[Simplex, Tuple[int, ...]]

    def admissible_of(self, sigma: Simplex) -> Tuple[int, ...]:
        try:
            return self.admissible[sigma]
        except KeyError:
            raise CoverError(f"{sigma} is not a simplex of the covered complex")

    def multi_indices(self, sigma: Simplex, length: int) -> Iterable[Tuple[int, ...]]:
        """Strictly increasing admissible multi-indices of a given length."""
        return combinations(self.admissible_of(sigma), length)


def attach_cover(
    K: SimplicialComplex,
    num_sets: int,
    tops_admissible: Mapping[Tuple[int, ...], Iterable[int]],
) -> CoveredComplex:
    """Attach a cover given per-top chart sets; faces get the union rule."""
    if num_sets < 1:
        raise CoverError("a cover needs at least one set")
    canon: Dict[Simplex, Tuple[int, ...]] = {}
    for key, charts in tops_admissible.items():
        s, _ = sort_with_parity(tuple(key))
        cs = tuple(sorted(set(int(a) for a in charts)))
        if not cs:
            raise CoverError(f"top simplex {s} has an empty chart set")
        if cs[0] < 0 or cs[-1] >= num_sets:
            raise CoverError(f"chart index out of range for top {s}: {cs}")
        if s in canon:
            raise CoverError(f"duplicate cover assignment for top {s}")
        canon[s] = cs
    missing = [t for t in K.tops if t not in canon]
    if missing:
        raise CoverError(f"cover misses top simplices, e.g. {missing[0]}")
    extra = [t for t in canon if t not in set(K.tops)]
    if extra:
        raise CoverError(f"cover assigns charts to non-top simplex {extra[0]}")

    admissible: Dict[Simplex, set] = {}
    for t in K.tops:
        for k in range(len(t)):
            for face in combinations(t, k + 1):
                admissible.setdefault(face, set()).update(canon[t])
    table = {s: tuple(sorted(v)) for s, v in admissible.items()}
    return CoveredComplex(K, num_sets, table)


def star_cover(K: SimplicialComplex) -> CoveredComplex:
    """One chart per vertex, each top admissible in its vertices' charts.

    Chart numbers are positions in the sorted vertex list.  Every simplex
    ends up with as many charts as vertices of adjacent tops, so overlaps
    of three and more sets are plentiful; this is the cover of choice for
    randomized combinatorial checks.
    """
    position = {v: i for i, v in enumerate(K.vertices)}
    return attach_cover(
        K, len(position), {t: tuple(position[v] for v in t) for t in K.tops}
    )


@dataclass(frozen=True)
class IndexMap:
    """One admissible chart per simplex; callable on canonical simplices."""

    assignment: Mapping[Simplex, int]

    def __call__(self, sigma: Simplex) -> int:
        try:
            return self.assignment[sigma]
        except KeyError:
            raise CoverError(f"index map does not cover {sigma}")


def make_index_map(C: CoveredComplex, assignment: Mapping[Simplex, int]) -> IndexMap:
    """Validate a complete admissible assignment and wrap it."""
    table: Dict[Simplex, int] = {}
    for k, s in C.complex.all_simplices():
        if s not in assignment:
            raise CoverError(f"index map misses simplex {s}")
        a = int(assignment[s])
        if a not in C.admissible_of(s):
            raise CoverError(f"chart {a} is not admissible for {s}")
        table[s] = a
    return IndexMap(table)


def default_index_map(C: CoveredComplex) -> IndexMap:
    return IndexMap({s: C.admissible_of(s)[0] for _, s in C.complex.all_simplices()})


def random_index_map(
    C: CoveredComplex,
    seed: int,
    frozen: Optional[Mapping[Simplex, int]] = None,
) -> IndexMap:
    """Uniform admissible pick per simplex, deterministic in the seed.

    ``frozen`` pins chosen simplices to fixed charts; useful for perturbing
    an index map away from a region that must stay put.
    """
    rng = random.Random(seed)
    frozen = dict(frozen or {})
    table: Dict[Simplex, int] = {}
    for k, s in C.complex.all_simplices():
        adm = C.admissible_of(s)
        if s in frozen:
            a = int(frozen[s])
            if a not in adm:
                raise CoverError(f"frozen chart {a} is not admissible for {s}")
            table[s] = a
        else:
            table[s] = adm[rng.randrange(len(adm))]
    return IndexMap(table)


def restrict_cover(C: CoveredComplex, sub: SimplicialComplex) -> CoveredComplex:
    """Inherit admissibility verbatim on a subcomplex of C's complex."""
    table: Dict[Simplex, Tuple[int, ...]] = {}
    for k, s in sub.all_simplices():
        if not C.complex.has(s):
            raise CoverError(f"{s} is not a simplex of the ambient complex")
        table[s] = C.admissible_of(s)
    return CoveredComplex(sub, C.num_sets, table)


def restrict_cover_to_boundary(C: CoveredComplex) -> CoveredComplex:
    from .simplicial import boundary_restrict

    return restrict_cover(C, boundary_restrict(C.complex))


def restrict_index_map(C_sub: CoveredComplex, rho: IndexMap) -> IndexMap:
    table = {s: rho(s) for _, s in C_sub.complex.all_simplices()}
    return make_index_map(C_sub, table)
