"""The trace map advancing pairs of traces by two levels, and its inverse.

Consecutive traces obey ``f(h_n, h_{n+1}) = (h_{n+2}, h_{n+3})`` with
``f(x, y) = (y(x^2 - 2) - 2, f_1 (y^2 - 2) - 2)``.  The inverse branch ``g``
is defined on ``f(U)`` and contracts the curved triangle ``D`` onto the
fixed point ``(-1, -1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .errors import InvalidInput, PrecisionExhausted
from .numeric import Enclosure, Real, to_hex, to_mpfr, working_precision
from .report import Report
from .traces import ModelParams, certify_unbounded, saturating_traces

DEFAULT_BITS = 128
ESCAPE_HORIZON = 10_000


@dataclass(frozen=True)
class PlanePoint:
    x: mpfr
    y: mpfr

    @classmethod
    def of(cls, x: Real, y: Real) -> "PlanePoint":
        return cls(to_mpfr(x), to_mpfr(y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __le__(self, other: "PlanePoint") -> bool:
        return self.x <= other.x and self.y <= other.y

    def dist(self, other: "PlanePoint") -> mpfr:
        return gmpy2.hypot(self.x - other.x, self.y - other.y)

    def floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)


def f_map(p: PlanePoint) -> PlanePoint:
    x1 = p.y * (p.x * p.x - 2) - 2
    return PlanePoint(x1, x1 * (p.y * p.y - 2) - 2)


def in_U(p: PlanePoint) -> bool:
    return p.x < 0 and p.y < 0 and p.y * (p.x * p.x - 2) - 2 < 0


def in_fU(p: PlanePoint) -> bool:
    """The image ``f(U)``, described by three inequalities."""
    x, y = p
    if not (x < 0 and y < -2 * x - 2):
        return False
    if -2 <= x:
        return y < x**3 / 4 + x * x - x - 2
    return True


def g_map(p: PlanePoint) -> PlanePoint:
    """Inverse of ``f`` on ``U``; only defined on ``f(U)``."""
    if not in_fU(p):
        raise InvalidInput(f"{p.floats()} is outside the domain of the inverse map")
    y0 = -gmpy2.sqrt(2 + (2 + p.y) / p.x)
    x0 = -gmpy2.sqrt(2 + (2 + p.x) / y0)
    return PlanePoint(x0, y0)


def jacobian(p: PlanePoint) -> tuple:
    x, y = p
    x1 = y * (x * x - 2) - 2
    dx1 = (2 * x * y, x * x - 2)
    q = y * y - 2
    return (dx1, (dx1[0] * q, dx1[1] * q + 2 * x1 * y))


def jacobian_det(p: PlanePoint) -> mpfr:
    return 4 * p.x * p.y * p.y * (p.y * (p.x * p.x - 2) - 2)


def fixed_points() -> list[PlanePoint]:
    """``(-1, -1)``, ``(2, 2)``, ``(-a, a - 1)`` and ``(1/a, -(1 + 1/a))`` for the golden ratio ``a``."""
    alpha = (1 + gmpy2.sqrt(5)) / 2
    return [
        PlanePoint.of(-1, -1),
        PlanePoint.of(2, 2),
        PlanePoint(-alpha, alpha - 1),
        PlanePoint(1 / alpha, -(1 + 1 / alpha)),
    ]


# -- the region D ---------------------------------------------------------------------


def vertices() -> dict:
    r2 = gmpy2.sqrt(2)
    return {
        "A": PlanePoint(-r2, -r2),
        "B": PlanePoint(-r2, mpfr(0)),
        "C": PlanePoint(-gmpy2.sqrt(2 - r2), -r2),
        "F": PlanePoint.of(-1, -1),
    }


def a_one() -> PlanePoint:
    """Closed form of ``g(A)``."""
    r2 = gmpy2.sqrt(2)
    s = gmpy2.sqrt(3 - r2)
    return PlanePoint(-gmpy2.sqrt(2 - (2 - r2) / s), -s)


def d_status(p: PlanePoint, tol: Real = 0) -> str:
    """``inside``, ``outside`` or ``boundary`` for the closed region ``D``.

    With ``tol > 0`` a point whose inequalities hold only up to ``tol`` is
    reported as ``boundary`` instead of being decided.
    """
    tol = to_mpfr(tol)
    r2 = gmpy2.sqrt(2)
    margins = (p.x + r2, -p.x, p.y + r2, -p.y, p.x * p.x - 2 - p.y)
    if min(margins) > tol:
        return "inside"
    if min(margins) < -tol:
        return "outside"
    return "boundary" if tol > 0 else "inside"


def in_D(p: PlanePoint) -> bool:
    return d_status(p) == "inside"


def d_box(n: int) -> tuple:
    """Box ``[x(A_n), x(C_n)] x [y(A_n), y(B_n)]`` containing ``g^n(D)``."""
    v = vertices()
    a, b, c = v["A"], v["B"], v["C"]
    for _ in range(n):
        a, b, c = g_map(a), g_map(b), g_map(c)
    return (a.x, c.x, a.y, b.y), (a, b, c)


def _box_diameter(box) -> mpfr:
    return gmpy2.hypot(box[1] - box[0], box[3] - box[2])


def box_diameters(n_steps: int, bits: int = DEFAULT_BITS) -> list[float]:
    """Diagonal of the vertex box of ``g^n(D)`` for ``n = 0..n_steps``."""
    with working_precision(bits):
        return [float(_box_diameter(d_box(n)[0])) for n in range(n_steps + 1)]


def sample_D(rng: random.Random, k: int, bits: int = DEFAULT_BITS) -> list[PlanePoint]:
    """Rejection samples from ``D``."""
    out = []
    with working_precision(bits):
        r2 = float(gmpy2.sqrt(2))
        while len(out) < k:
            p = PlanePoint.of(rng.uniform(-r2, 0), rng.uniform(-r2, 0))
            if in_D(p):
                out.append(p)
    return out


def _boundary_grid(density: int) -> list[PlanePoint]:
    v = vertices()
    r2 = gmpy2.sqrt(2)
    pts = []
    for i in range(density + 1):
        t = mpfr(i) / density
        pts.append(PlanePoint(-r2, -r2 + t * r2))  # Gamma
        x = -r2 + t * (v["C"].x + r2)
        pts.append(PlanePoint(x, -r2))  # Upsilon
        pts.append(PlanePoint(x, x * x - 2))  # Lambda
    return pts


def verify_contraction(n_steps: int = 8, density: int = 24, samples: int = 200,
                       bits: int = DEFAULT_BITS, seed: int = 0) -> Report:
    rep = Report("contraction of the inverse trace map")
    rng = random.Random(seed)
    with working_precision(bits):
        tol = mpfr(2) ** (-bits // 2)
        pts = _boundary_grid(density) + sample_D(rng, samples, bits)
        for p in pts:
            q = g_map(p)
            rep.check("g(D) in D", d_status(q, tol) != "outside", p.floats())
            rep.check("g(D) in U", in_U(q), p.floats())
        v = vertices()
        rep.check("g(F) = F", g_map(v["F"]).dist(v["F"]) < tol)
        rep.check("A_1 closed form", g_map(v["A"]).dist(a_one()) < tol)
        # boundary arc Lambda is mapped into itself
        for p in _boundary_grid(density)[2::3]:
            q = g_map(p)
            rep.check("g(Lambda) in Lambda", abs(q.y - (q.x * q.x - 2)) < tol, p.floats())

        prev_box, prev_v = d_box(0)
        diameters = [float(_box_diameter(prev_box))]
        a, b, c = prev_v
        for n in range(1, n_steps + 1):
            a, b, c = g_map(a), g_map(b), g_map(c)
            box = (a.x, c.x, a.y, b.y)
            nested = prev_box[0] < box[0] and box[1] < prev_box[1] and prev_box[2] < box[2] and box[3] < prev_box[3]
            rep.check("boxes strictly nested", nested, n)
            rep.check("F in box", box[0] <= -1 <= box[1] and box[2] <= -1 <= box[3], n)
            rep.check("A_n increasing", prev_v[0] <= a, n)
            diameters.append(float(_box_diameter(box)))
            prev_box, prev_v = box, (a, b, c)
        rep.check("diameter shrinks", all(p > q for p, q in zip(diameters, diameters[1:])))
        # the neutral direction at F makes this decay slow (about 1/n), so no rate is asserted
        rep.check("diameter at most half the initial one", diameters[-1] <= diameters[0] / 2, diameters[-1])
        rep.note("box_diameters", diameters)

        pairs = sample_D(rng, 2 * samples, bits)
        for p, q in zip(pairs[::2], pairs[1::2]):
            lo = PlanePoint(min(p.x, q.x), min(p.y, q.y))
            hi = PlanePoint(max(p.x, q.x), max(p.y, q.y))
            if in_D(lo) and in_D(hi):
                rep.check("g monotone", g_map(lo) <= g_map(hi), (lo.floats(), hi.floats()))
        h = mpfr(2) ** (-bits // 3)
        for p in pts:
            base = g_map(p)
            for axis in ("x", "y"):
                shifted = PlanePoint(p.x - h, p.y) if axis == "x" else PlanePoint(p.x, p.y - h)
                if not in_fU(shifted):
                    continue
                moved = g_map(shifted)
                rep.check(f"dg/d{axis} positive", base.x > moved.x and base.y > moved.y, p.floats())
    return rep


def escape_check(p: PlanePoint, horizon: int = ESCAPE_HORIZON) -> Optional[int]:
    """First ``m >= 1`` with ``f^m(p)`` outside ``D``; ``None`` if the orbit stays."""
    if not in_D(p):
        raise InvalidInput(f"{p.floats()} is not in D")
    q = p
    for m in range(1, horizon + 1):
        q = f_map(q)
        if not in_D(q):
            return m
    return None


# -- trace orbits of energies ------------------------------------------------------------


@dataclass
class OrbitRecord:
    energy: Enclosure
    traces: list
    status: str
    detail: dict = field(default_factory=dict)
    trapped: list = field(default_factory=list)

    @property
    def pairs(self) -> list:
        """``(n, h_n, h_{n+1})`` for even ``n``."""
        return [(n, self.traces[n], self.traces[n + 1]) for n in range(0, len(self.traces) - 1, 2)]

    def rows(self) -> list[dict]:
        return [{"n": n, "h": f"{float(h):.17g}"} for n, h in enumerate(self.traces)]

    def to_json(self) -> dict:
        det = {k: (str(v) if isinstance(v, mpfr) else v) for k, v in self.detail.items()}
        return {
            "energy": [f"{float(self.energy.lo):.17g}", f"{float(self.energy.hi):.17g}"],
            "energy_hex": self.energy.to_json(),
            "status": self.status,
            "detail": det,
            "trapped": self.trapped,
            "traces": [f"{float(h):.17g}" for h in self.traces],
            "traces_hex": [to_hex(h) for h in self.traces],
        }


def _traces(x: mpfr, lam: mpfr, n: int) -> list:
    hs, _ = saturating_traces(x, lam, n)
    return hs


def _trapped_runs(hs: list) -> list:
    """Maximal ranges of even ``k`` with ``(h_k, h_{k+1})`` inside ``D``."""
    runs = []
    start = None
    last = None
    for k in range(0, len(hs) - 1, 2):
        inside = in_D(PlanePoint(hs[k], hs[k + 1]))
        if inside and start is None:
            start = k
        if inside:
            last = k
        if not inside and start is not None:
            runs.append([start, last])
            start = None
    if start is not None:
        runs.append([start, last])
    return runs


def classify_orbit(E, horizon: int, params: ModelParams, tables: Sequence = ()) -> OrbitRecord:
    """Trace orbit ``h_0 .. h_horizon`` of an energy or an energy enclosure.

    A zero tail needs a sign change of some ``h_m`` across the enclosure and,
    when tables are given, the zero of the band containing ``E`` at level
    ``m`` to meet the enclosure; floating smallness alone never counts.
    """
    if horizon < 4:
        raise InvalidInput("horizon must be at least 4")
    enc = E if isinstance(E, Enclosure) else None
    with working_precision(max(params.bits(horizon), enc.bits if enc else 0)):
        if enc is None:
            x = to_mpfr(E)
            enc = Enclosure(x, x)
        lam = params.lam_mpfr()
        mid = enc.mid
        hs = _traces(mid, lam, horizon)
        lo_hs = _traces(enc.lo, lam, horizon)
        hi_hs = _traces(enc.hi, lam, horizon)
        trapped = _trapped_runs(hs)
        for m in range(min(len(lo_hs), len(hi_hs))):
            if lo_hs[m] == 0 or hi_hs[m] == 0 or (lo_hs[m] > 0) != (hi_hs[m] > 0):
                if tables and m < len(tables) and not _zero_confirmed(tables[m], enc):
                    continue
                tail = ([mpfr(-2)] + [mpfr(2)] * (horizon - m - 1))[: horizon - m]
                detail = {"m": m, "confirmed_by_tables": bool(tables) and m < len(tables)}
                return OrbitRecord(enc, hs[: m + 1] + tail, "zero-tail", detail, trapped)
        certs = [certify_unbounded(x, horizon, params) for x in {enc.lo, mid, enc.hi}]
        if all(c is not None for c in certs):
            n0 = max(c.n0 for c in certs)
            delta = min(c.delta for c in certs)
            return OrbitRecord(enc, hs, "certified-unbounded", {"n0": n0, "delta": float(delta)}, trapped)
        if len(lo_hs) > horizon and len(hi_hs) > horizon:
            for k in (horizon - 1, horizon):
                if (abs(lo_hs[k]) <= 2) != (abs(hi_hs[k]) <= 2):
                    raise PrecisionExhausted(f"energy enclosure straddles a band edge at level {k}")
        return OrbitRecord(enc, hs, "bounded-so-far", {"max_abs": float(max(abs(h) for h in hs))}, trapped)


def _zero_confirmed(table, enc: Enclosure) -> bool:
    for band in table.bands:
        if band.a.lo <= enc.hi and enc.lo <= band.b.hi:
            if band.z.overlaps(enc):
                return True
    return False


def infinity_profile(traces: Sequence, window: int = 10) -> dict:
    """Even index traces against ``sqrt(2)`` and growth of the last odd ones."""
    last_even = (len(traces) - 1) // 2 * 2
    odd = [k for k in range(1, len(traces), 2)][-window:]
    mags = [abs(traces[k]) for k in odd]
    return {
        "last_even_index": last_even,
        "even_gap_to_sqrt2": float(abs(abs(traces[last_even]) - gmpy2.sqrt(2))),
        "odd_indices": odd,
        "odd_monotone": all(p < q for p, q in zip(mags, mags[1:])),
        "last_odd_abs": float(mags[-1]) if mags else 0.0,
        "last_odd_log10": float(gmpy2.log10(mags[-1])) if mags else 0.0,
    }
