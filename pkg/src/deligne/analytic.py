"""Analytic classes: chart-wise form data and its discretization.

A presentation packages, per level k, a rule producing the integrand for
``C^k(sigma, J)`` as a small polynomial expression over the geometry's
branch lifts: each term is a rational (or float) coefficient, at most one
linear factor in a specific chart's branch of a coordinate, and a constant
wedge monomial.  Everything the built-in fixtures and their cup products
need fits this shape, and it integrates exactly: affine integrands are
reproduced by Gauss-Legendre product rules at any order, and in rational
arithmetic by the centroid rule.

Unit bookkeeping: rational coefficients are in turn units and carry an
explicit count of angle factors; float coefficients are already in
radians.  A rational evaluation is only meaningful when a term carries
exactly one angle factor in total (an angle times an angle is not a
rational number of turns), which is why cup products of winding functions
refuse rational discretization while the monopole and torsion fixtures
accept it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ._scalars import TWO_PI, Scalar, coerce, tree_sum
from .cochain import DeligneCochain, build_cochain
from .errors import AnalyticError
from .geometry import ChartedGeometry, simplex_quadrature
from .simplicial import Simplex, sort_with_parity

# -- expression model ----------------------------------------------------------


@dataclass(frozen=True)
class FormTerm:
    """coeff * (branch of coords[linear]) * d(coords[wedge]).

    ``angle_power`` counts turn factors carried by a rational coefficient;
    float coefficients are radian-valued already and keep it for the
    rational-mode feasibility check only.
    """

    coeff: Scalar
    angle_power: int = 0
    linear: Optional[Tuple[int, int]] = None  # (coordinate, chart)
    wedge: Tuple[int, ...] = ()


FormExpr = Tuple[FormTerm, ...]

ZERO_EXPR: FormExpr = ()


def _wedge_join(w1: Tuple[int, ...], w2: Tuple[int, ...]) -> Optional[Tuple[Tuple[int, ...], int]]:
    combined = w1 + w2
    if len(set(combined)) != len(combined):
        return None
    srt, parity = sort_with_parity(combined) if combined else ((), 1)
    return tuple(srt), parity


def expr_product(e1: FormExpr, e2: FormExpr) -> FormExpr:
    out: List[FormTerm] = []
    for a in e1:
        for b in e2:
            if a.linear is not None and b.linear is not None:
                raise AnalyticError("product would be quadratic in a coordinate")
            joined = _wedge_join(a.wedge, b.wedge)
            if joined is None:
                continue
            wedge, parity = joined
            out.append(
                FormTerm(
                    coeff=a.coeff * b.coeff * parity,
                    angle_power=a.angle_power + b.angle_power,
                    linear=a.linear or b.linear,
                    wedge=wedge,
                )
            )
    return tuple(out)


def expr_scale(e: FormExpr, factor: Scalar, angle_add: int = 0) -> FormExpr:
    if factor == 0:
        return ZERO_EXPR
    return tuple(
        FormTerm(t.coeff * factor, t.angle_power + angle_add, t.linear, t.wedge)
        for t in e
    )


def expr_sum(*exprs: FormExpr) -> FormExpr:
    out: List[FormTerm] = []
    for e in exprs:
        out.extend(e)
    return tuple(out)


def turn_normalized_product(a: FormExpr, b: FormExpr) -> FormExpr:
    """Product of two angle-valued factors, divided by one full turn.

    Descent formulas for products are written in turn units; multiplying
    two radian-valued factors overcounts by exactly one turn.  Fraction
    coefficients absorb it in the angle bookkeeping, float coefficients
    numerically.
    """
    out: List[FormTerm] = []
    for t in expr_product(a, b):
        if isinstance(t.coeff, Fraction):
            out.append(FormTerm(t.coeff, t.angle_power - 1, t.linear, t.wedge))
        else:
            out.append(
                FormTerm(t.coeff / TWO_PI, t.angle_power, t.linear, t.wedge)
            )
    return tuple(out)


def _angle_count(t: FormTerm, periodic: Sequence[bool]) -> int:
    n = t.angle_power
    if t.linear is not None and periodic[t.linear[0]]:
        n += 1
    n += sum(1 for c in t.wedge if periodic[c])
    return n


def _rational_guard(t: FormTerm, geom: ChartedGeometry) -> None:
    if not isinstance(t.coeff, Fraction):
        raise AnalyticError(
            "rational discretization needs rational fixture parameters"
        )
    if _angle_count(t, geom.periodic) != 1:
        raise AnalyticError(
            "term mixes angle factors; its integral is not rational in turns"
        )


# -- evaluation and integration --------------------------------------------------


def evaluate_scalar(
    expr: FormExpr, geom: ChartedGeometry, v: Simplex, exact: bool
) -> Scalar:
    """Value of a 0-form expression at a vertex simplex."""
    parts: List[Scalar] = []
    for t in expr:
        if t.wedge:
            raise AnalyticError("a form of positive degree has no vertex value")
        if exact:
            _rational_guard(t, geom)
            val: Scalar = t.coeff
            if t.linear is not None:
                val *= geom.vertex_value(t.linear[1], v, t.linear[0])
        else:
            val = (
                float(t.coeff) * (TWO_PI ** t.angle_power)
                if isinstance(t.coeff, Fraction)
                else float(t.coeff)
            )
            if t.linear is not None:
                coord, chart = t.linear
                branch = float(geom.vertex_value(chart, v, coord))
                val *= branch * TWO_PI if geom.periodic[coord] else branch
        parts.append(val)
    return tree_sum(parts, exact)


def _rows_chart(geom: ChartedGeometry, sigma: Simplex) -> int:
    for a in sorted(geom.covered.admissible_of(sigma)):
        if (a, sigma) in geom.lifts:
            return a
    raise AnalyticError(f"no chart realizes {sigma} in {geom.name}")


def _pullback_det(rows, wedge: Tuple[int, ...]) -> Fraction:
    k = len(wedge)
    mat = [[rows[i + 1][c] - rows[0][c] for c in wedge] for i in range(k)]
    # Exact cofactor expansion; k <= 3 here.
    if k == 1:
        return mat[0][0]
    if k == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if k == 3:
        return (
            mat[0][0] * (mat[1][1] * mat[2][2] - mat[1][2] * mat[2][1])
            - mat[0][1] * (mat[1][0] * mat[2][2] - mat[1][2] * mat[2][0])
            + mat[0][2] * (mat[1][0] * mat[2][1] - mat[1][1] * mat[2][0])
        )
    raise AnalyticError("forms above degree 3 are not supported")


def integrate_form(
    expr: FormExpr,
    geom: ChartedGeometry,
    sigma: Simplex,
    exact: bool,
    quad_order: int,
) -> Scalar:
    """Integral over a canonically oriented simplex of dimension >= 1."""
    k = len(sigma) - 1
    if k < 1:
        raise AnalyticError("use evaluate_scalar on vertices")
    volfac = Fraction(1, math.factorial(k))
    parts: List[Scalar] = []
    for t in expr:
        if len(t.wedge) != k:
            raise AnalyticError(
                f"a {len(t.wedge)}-form cannot be integrated over a {k}-simplex"
            )
        chart = t.linear[1] if t.linear is not None else _rows_chart(geom, sigma)
        rows = geom.lift(chart, sigma)
        det = _pullback_det(rows, t.wedge)
        if det == 0:
            continue
        if exact:
            _rational_guard(t, geom)
            val: Scalar = t.coeff * det * volfac
            if t.linear is not None:
                coord = t.linear[0]
                centroid = sum(r[coord] for r in rows) / len(rows)
                val *= centroid
        else:
            scale = TWO_PI ** sum(1 for c in t.wedge if geom.periodic[c])
            base = (
                float(t.coeff) * (TWO_PI ** t.angle_power)
                if isinstance(t.coeff, Fraction)
                else float(t.coeff)
            )
            if t.linear is None:
                val = base * float(det) * scale * float(volfac)
            else:
                coord = t.linear[0]
                lrows = geom.lift(t.linear[1], sigma)
                lscale = TWO_PI if geom.periodic[coord] else 1.0
                l0 = float(lrows[0][coord]) * lscale
                lder = [
                    float(lrows[i + 1][coord] - lrows[0][coord]) * lscale
                    for i in range(k)
                ]
                pts, wts = simplex_quadrature(k, quad_order)
                acc = 0.0
                for p in range(pts.shape[0]):
                    lin = l0
                    for a in range(k):
                        lin += pts[p, a] * lder[a]
                    acc += wts[p] * lin
                val = base * float(det) * scale * acc
        parts.append(val)
    return tree_sum(parts, exact)


# -- presentations ----------------------------------------------------------------

ComponentRule = Callable[[ChartedGeometry, Tuple[int, ...], Simplex], FormExpr]


@dataclass
class AnalyticClassPresentation:
    """Chart data of a class of the given degree over a built-in geometry.

    ``components[k]`` produces the level-k integrand for a multi-index and
    simplex; the optional structure callables expose what cup products
    consume (chart-jump integers, transition logs, connection and
    curvature forms).
    """

    label: str
    degree: int
    geometry: ChartedGeometry
    components: Tuple[ComponentRule, ...]
    rational: bool
    params: Dict[str, object] = field(default_factory=dict)
    kind: str = "generic"
    jump_of: Optional[Callable[[ChartedGeometry, Simplex, int, int], int]] = None
    dd_of: Optional[Callable[[ChartedGeometry, Simplex, int, int, int], int]] = None
    tlog_of: Optional[Callable[[ChartedGeometry, Simplex, int, int], FormExpr]] = None
    conn_of: Optional[Callable[[ChartedGeometry, Simplex, int], FormExpr]] = None
    curv_of: Optional[Callable[[ChartedGeometry, Simplex], FormExpr]] = None

    def curvature_form(self, geom: Optional[ChartedGeometry] = None) -> FormExpr:
        if self.curv_of is None:
            raise AnalyticError(f"{self.label} carries no curvature form")
        g = geom or self.geometry
        top = g.covered.complex.tops[0]
        return self.curv_of(g, top)


def _lineage_ok(pres: AnalyticClassPresentation, geom: ChartedGeometry) -> bool:
    g: Optional[ChartedGeometry] = geom
    while g is not None:
        if g is pres.geometry:
            return True
        g = g.parent
    return False


def discretize(
    pres: AnalyticClassPresentation,
    geometry: Optional[ChartedGeometry] = None,
    quad_order: int = 8,
    exact: bool = False,
) -> DeligneCochain:
    """Sample a presentation into a cochain over a geometry's cover.

    ``geometry`` may be the presentation's own geometry (default) or any
    barycentric subdivision of it; the expressions are evaluated with the
    finer lifts.  Rational output is refused where it cannot be exact.
    """
    geom = geometry if geometry is not None else pres.geometry
    if not _lineage_ok(pres, geom):
        raise AnalyticError(
            f"{pres.label} is presented on {pres.geometry.name}, not on the "
            "given geometry"
        )
    if exact and not pres.rational:
        raise AnalyticError(
            f"{pres.label} has non-rational parameters; use float arithmetic"
        )
    p = pres.degree
    cov = geom.covered
    entries = []
    for k in range(p + 1):
        rule = pres.components[k]
        length = p - k + 1
        for s in cov.complex.simplices(k):
            for J in cov.multi_indices(s, length):
                expr = rule(geom, J, s)
                if not expr:
                    continue
                if k == 0:
                    val = evaluate_scalar(expr, geom, s, exact)
                else:
                    val = integrate_form(expr, geom, s, exact, quad_order)
                if val != 0:
                    entries.append((k, J, s, val))
    return build_cochain(cov, p, entries, exact=exact)


# -- fixture constructors -----------------------------------------------------------


def _const_term(value: Scalar, rational: bool) -> FormExpr:
    if value == 0:
        return ZERO_EXPR
    if rational:
        return (FormTerm(coerce(value, True), angle_power=1),)
    return (FormTerm(float(value)),)


def _no_component(geom, J, s) -> FormExpr:
    return ZERO_EXPR


def winding_function(
    geom: ChartedGeometry,
    w: int,
    coord: int = 0,
    offset: Scalar = 0,
    exact: bool = False,
) -> AnalyticClassPresentation:
    """The circle-valued function winding ``w`` times around a periodic
    coordinate, with branch logs ``offset + w * theta``."""
    if not geom.periodic[coord]:
        raise AnalyticError("winding functions need a periodic coordinate")
    w = int(w)
    c = coerce(offset, exact)
    rational = exact or offset == 0

    def log_branch(chart: int) -> FormExpr:
        terms: List[FormTerm] = []
        if rational:
            if c != 0:
                terms.append(FormTerm(coerce(c, True), angle_power=1))
            if w != 0:
                terms.append(FormTerm(Fraction(w), linear=(coord, chart)))
        else:
            if c != 0:
                terms.append(FormTerm(float(c)))
            if w != 0:
                terms.append(FormTerm(Fraction(w), linear=(coord, chart)))
        return tuple(terms)

    def comp0(g: ChartedGeometry, J, s) -> FormExpr:
        return log_branch(J[0])

    def jump_of(g: ChartedGeometry, s: Simplex, a: int, b: int) -> int:
        return w * g.jump(s, coord, a, b)

    def dlog(g, s, chart) -> FormExpr:
        if w == 0:
            return ZERO_EXPR
        return (FormTerm(Fraction(w), wedge=(coord,)),)

    pres = AnalyticClassPresentation(
        label=f"winding(w={w},coord={coord})",
        degree=0,
        geometry=geom,
        components=(comp0,),
        rational=rational,
        params={"w": w, "coord": coord, "offset": c},
        kind="function",
        jump_of=jump_of,
    )
    pres.params["log_branch"] = log_branch
    pres.params["dlog"] = dlog
    return pres


def flat_circle(
    geom: ChartedGeometry, theta: Scalar, exact: bool = False
) -> AnalyticClassPresentation:
    """A curvature-free degree-1 class on a circle with holonomy ``theta``:
    the whole transition log sits at one seam vertex of charts 0 and 1."""
    if geom.coords != ("theta",):
        raise AnalyticError("flat_circle lives on a circle geometry")
    th = coerce(theta, exact)
    rational = exact
    # Seam: among vertices where both charts 0 and 1 are admissible, the
    # one whose chart-0 branch is largest.  Stable under subdivision.
    seam = None
    for v in geom.covered.complex.simplices(0):
        adm = geom.covered.admissible_of(v)
        if 0 in adm and 1 in adm:
            x = geom.vertex_value(0, v, 0)
            if seam is None or x > seam:
                seam = x
    if seam is None:
        raise AnalyticError("charts 0 and 1 never meet on this geometry")

    def comp0(g: ChartedGeometry, J, s) -> FormExpr:
        if J != (0, 1):
            return ZERO_EXPR
        if g.vertex_value(0, s, 0) != seam:
            return ZERO_EXPR
        return _const_term(th, rational)

    # The seam log is a per-vertex indicator, not an affine expression, so
    # this fixture exposes no transition-log callable for cup products.
    return AnalyticClassPresentation(
        label=f"flat_circle(theta={theta})",
        degree=1,
        geometry=geom,
        components=(comp0, _no_component),
        rational=rational,
        params={"theta": th},
        kind="line",
        dd_of=lambda g, s, a, b, c: 0,
        conn_of=lambda g, s, a: ZERO_EXPR,
        curv_of=lambda g, s: ZERO_EXPR,
    )


def monopole(geom: ChartedGeometry, k: int) -> AnalyticClassPresentation:
    """Charge-k monopole on the octahedron sphere.

    Northern charts carry (k/2)(1-u) d(theta), southern ones
    -(k/2)(1+u) d(theta); the transition logs are -k times the southern
    branch of theta across the equator, zero between northern charts, and
    a constant on southern overlaps that absorbs the seam turn.  All data
    is rational in turns, so both arithmetics are available.
    """
    if geom.coords != ("theta", "u"):
        raise AnalyticError("the monopole lives on the octahedron sphere")
    k = int(k)
    half = Fraction(k, 2)

    def southern(chart: int) -> bool:
        return chart >= 4

    # Southern overlaps: branches of theta differ by an integer turn, and
    # the constant -k * (that turn count) makes the equator logs match.
    # The turn count is read off once, from any simplex both charts
    # realize (a pole vertex has no branch, but its overlaps reach an
    # equator vertex or a meridian edge that does).
    seam_turns: Dict[Tuple[int, int], Fraction] = {}
    for _, s0 in geom.covered.complex.all_simplices():
        adm = [a for a in geom.covered.admissible_of(s0) if southern(a)]
        for i0 in range(len(adm)):
            for j0 in range(i0 + 1, len(adm)):
                a0, b0 = adm[i0], adm[j0]
                if (a0, b0) in seam_turns:
                    continue
                if (a0, s0) in geom.lifts and (b0, s0) in geom.lifts:
                    seam_turns[(a0, b0)] = geom.offset(s0, a0, b0)[0]

    def seam_constant(a: int, b: int) -> Fraction:
        # Opposite faces meet only at the pole, where theta has no branch;
        # their constant is a free integer choice and zero keeps the seam
        # turn concentrated on the one scanned pair that crosses it.
        sgn = 1
        if a > b:
            a, b, sgn = b, a, -1
        off = seam_turns.get((a, b), Fraction(0))
        return -Fraction(k) * off * sgn

    def comp0(g: ChartedGeometry, J, s) -> FormExpr:
        a, b = J
        if not southern(a) and not southern(b):
            return ZERO_EXPR
        if southern(a) and southern(b):
            c = seam_constant(a, b)
            if c == 0:
                return ZERO_EXPR
            return (FormTerm(c, angle_power=1),)
        # Mixed: the southern chart's branch carries the log.
        sgn = 1
        if southern(a):
            a, b, sgn = b, a, -1
        if k == 0:
            return ZERO_EXPR
        return (FormTerm(Fraction(-k * sgn), linear=(0, b)),)

    def comp1(g: ChartedGeometry, J, s) -> FormExpr:
        (a,) = J
        if k == 0:
            return ZERO_EXPR
        if southern(a):
            return (
                FormTerm(-half, wedge=(0,)),
                FormTerm(-half, linear=(1, a), wedge=(0,)),
            )
        return (
            FormTerm(half, wedge=(0,)),
            FormTerm(-half, linear=(1, a), wedge=(0,)),
        )

    def tlog_of(g: ChartedGeometry, s: Simplex, a: int, b: int) -> FormExpr:
        return comp0(g, (a, b), s)

    def dd_of(g: ChartedGeometry, s: Simplex, a: int, b: int, c: int) -> int:
        v = (s[0],)
        t_bc = evaluate_scalar(comp0(g, (b, c), v), g, v, True)
        t_ac = evaluate_scalar(comp0(g, (a, c), v), g, v, True)
        t_ab = evaluate_scalar(comp0(g, (a, b), v), g, v, True)
        m = -(t_bc - t_ac + t_ab)
        if m.denominator != 1:
            raise AnalyticError("monopole transition logs lost integrality")
        return int(m)

    return AnalyticClassPresentation(
        label=f"monopole(k={k})",
        degree=1,
        geometry=geom,
        components=(comp0, comp1),
        rational=True,
        params={"k": k},
        kind="line",
        dd_of=dd_of,
        tlog_of=tlog_of,
        conn_of=lambda g, s, a: comp1(g, (a,), s),
        curv_of=lambda g, s: (FormTerm(half, wedge=(0, 1)),) if k else ZERO_EXPR,
    )


def torsion_class(
    geom: ChartedGeometry, q: int, w: int, degree: int
) -> AnalyticClassPresentation:
    """A degree-p class of order q: C^0 is (w/q) times a product of unit
    chart jumps along consecutive index pairs, one periodic coordinate per
    factor, and every higher component vanishes.  Exactly rational."""
    q, w = int(q), int(w)
    if q <= 0:
        raise AnalyticError("torsion order must be positive")
    n_periodic = sum(1 for p_ in geom.periodic if p_)
    if degree > n_periodic:
        raise AnalyticError(
            f"a degree-{degree} torsion class needs {degree} periodic "
            f"coordinates; {geom.name} has {n_periodic}"
        )
    coords = [c for c, p_ in enumerate(geom.periodic) if p_][:degree]

    def comp0(g: ChartedGeometry, J, s) -> FormExpr:
        prod = Fraction(w, q)
        for i in range(degree):
            prod *= g.jump(s, coords[i], J[i], J[i + 1])
            if prod == 0:
                return ZERO_EXPR
        return (FormTerm(prod, angle_power=1),)

    comps: List[ComponentRule] = [comp0] + [_no_component] * degree
    return AnalyticClassPresentation(
        label=f"torsion(q={q},w={w},degree={degree})",
        degree=degree,
        geometry=geom,
        components=tuple(comps),
        rational=True,
        params={"q": q, "w": w},
        kind="torsion",
    )


def zero_class(geom: ChartedGeometry, degree: int) -> AnalyticClassPresentation:
    return AnalyticClassPresentation(
        label=f"zero(degree={degree})",
        degree=degree,
        geometry=geom,
        components=tuple([_no_component] * (degree + 1)),
        rational=True,
        params={},
        kind="zero",
    )


# -- cup products -------------------------------------------------------------------


def _require_same_geometry(a: AnalyticClassPresentation, b: AnalyticClassPresentation):
    if a.geometry is not b.geometry:
        raise AnalyticError(
            f"cup operands live on different chart systems "
            f"({a.geometry.name} vs {b.geometry.name})"
        )


def _need(pres: AnalyticClassPresentation, attr: str) -> None:
    if getattr(pres, attr) is None:
        raise AnalyticError(
            f"{pres.label} does not expose {attr} and cannot enter this cup"
        )


def _cup_function_function(
    f: AnalyticClassPresentation, g: AnalyticClassPresentation
) -> AnalyticClassPresentation:
    f_jump = f.jump_of
    g_log = g.params["log_branch"]
    f_log = f.params["log_branch"]
    g_dlog = g.params["dlog"]
    f_dlog = f.params["dlog"]

    def comp0(gm: ChartedGeometry, J, s) -> FormExpr:
        n = f_jump(gm, s, J[0], J[1])
        if n == 0:
            return ZERO_EXPR
        return expr_scale(g_log(J[1]), n)

    def comp1(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(f_log(J[0]), g_dlog(gm, s, J[0]))

    def dd_of(gm: ChartedGeometry, s: Simplex, a: int, b: int, c: int) -> int:
        return f_jump(gm, s, a, b) * g.jump_of(gm, s, b, c)

    def tlog_of(gm: ChartedGeometry, s: Simplex, a: int, b: int) -> FormExpr:
        n = f_jump(gm, s, a, b)
        return expr_scale(g_log(b), n) if n else ZERO_EXPR

    def curv_of(gm: ChartedGeometry, s: Simplex) -> FormExpr:
        return turn_normalized_product(f_dlog(gm, s, None), g_dlog(gm, s, None))

    # Turn normalization keeps every term affine with one net angle factor,
    # so the product stays exact-capable when both operands are.
    return AnalyticClassPresentation(
        label=f"({f.label})∪({g.label})",
        degree=1,
        geometry=f.geometry,
        components=(comp0, comp1),
        rational=f.rational and g.rational,
        params={"factors": (f.label, g.label)},
        kind="line",
        dd_of=dd_of,
        tlog_of=tlog_of,
        conn_of=lambda gm, s, a: turn_normalized_product(
            f_log(a), g_dlog(gm, s, a)
        ),
        curv_of=curv_of,
    )


def _cup_function_line(
    f: AnalyticClassPresentation, L: AnalyticClassPresentation
) -> AnalyticClassPresentation:
    for attr in ("tlog_of", "conn_of", "curv_of"):
        _need(L, attr)
    f_jump = f.jump_of
    f_log = f.params["log_branch"]

    def comp0(gm: ChartedGeometry, J, s) -> FormExpr:
        n = f_jump(gm, s, J[0], J[1])
        if n == 0:
            return ZERO_EXPR
        return expr_scale(L.tlog_of(gm, s, J[1], J[2]), n)

    def comp1(gm: ChartedGeometry, J, s) -> FormExpr:
        n = f_jump(gm, s, J[0], J[1])
        if n == 0:
            return ZERO_EXPR
        return expr_scale(L.conn_of(gm, s, J[1]), n)

    def comp2(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(f_log(J[0]), L.curv_of(gm, s))

    return AnalyticClassPresentation(
        label=f"({f.label})∪({L.label})",
        degree=2,
        geometry=f.geometry,
        components=(comp0, comp1, comp2),
        rational=f.rational and L.rational,
        params={"factors": (f.label, L.label)},
        kind="gerbe",
    )


def _cup_line_function(
    L: AnalyticClassPresentation, f: AnalyticClassPresentation
) -> AnalyticClassPresentation:
    for attr in ("dd_of", "tlog_of", "conn_of"):
        _need(L, attr)
    f_log = f.params["log_branch"]
    f_dlog = f.params["dlog"]

    def comp0(gm: ChartedGeometry, J, s) -> FormExpr:
        m = L.dd_of(gm, s, J[0], J[1], J[2])
        if m == 0:
            return ZERO_EXPR
        return expr_scale(f_log(J[2]), m)

    def comp1(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(
            L.tlog_of(gm, s, J[0], J[1]), f_dlog(gm, s, J[0])
        )

    def comp2(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(
            L.conn_of(gm, s, J[0]), f_dlog(gm, s, J[0])
        )

    return AnalyticClassPresentation(
        label=f"({L.label})∪({f.label})",
        degree=2,
        geometry=L.geometry,
        components=(comp0, comp1, comp2),
        rational=L.rational and f.rational,
        params={"factors": (L.label, f.label)},
        kind="gerbe",
    )


def _cup_line_line(
    L: AnalyticClassPresentation, J_: AnalyticClassPresentation
) -> AnalyticClassPresentation:
    for attr in ("dd_of", "tlog_of", "conn_of"):
        _need(L, attr)
    for attr in ("tlog_of", "conn_of", "curv_of"):
        _need(J_, attr)

    def comp0(gm: ChartedGeometry, J, s) -> FormExpr:
        m = L.dd_of(gm, s, J[0], J[1], J[2])
        if m == 0:
            return ZERO_EXPR
        return expr_scale(J_.tlog_of(gm, s, J[2], J[3]), m)

    def comp1(gm: ChartedGeometry, J, s) -> FormExpr:
        m = L.dd_of(gm, s, J[0], J[1], J[2])
        if m == 0:
            return ZERO_EXPR
        return expr_scale(J_.conn_of(gm, s, J[2]), m)

    def comp2(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(
            L.tlog_of(gm, s, J[0], J[1]), J_.curv_of(gm, s)
        )

    def comp3(gm: ChartedGeometry, J, s) -> FormExpr:
        return turn_normalized_product(
            L.conn_of(gm, s, J[0]), J_.curv_of(gm, s)
        )

    return AnalyticClassPresentation(
        label=f"({L.label})∪({J_.label})",
        degree=3,
        geometry=L.geometry,
        components=(comp0, comp1, comp2, comp3),
        rational=L.rational and J_.rational,
        params={"factors": (L.label, J_.label)},
        kind="two-gerbe",
    )


def cup_product(
    a: AnalyticClassPresentation, b: AnalyticClassPresentation
) -> AnalyticClassPresentation:
    """Cup product of presentations; degree adds as p1 + p2 + 1.

    Supported operand shapes: function∪function, function∪line,
    line∪function, line∪line; a triple product of functions associates as
    (f∪g)∪h.
    """
    _require_same_geometry(a, b)
    shapes = (a.kind, b.kind)
    if shapes == ("function", "function"):
        return _cup_function_function(a, b)
    if shapes == ("function", "line"):
        return _cup_function_line(a, b)
    if shapes == ("line", "function"):
        return _cup_line_function(a, b)
    if shapes == ("line", "line"):
        return _cup_line_line(a, b)
    raise AnalyticError(f"cup of kinds {a.kind} and {b.kind} is not supported")
