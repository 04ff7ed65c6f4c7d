"""Trace polynomials of the period doubling substitution.

The transfer matrices over the letters are ``tau(a) = [[E - lam, -1], [1, 0]]``
and ``tau(b) = [[E + lam, -1], [1, 0]]``.  With ``eta(a) = ab`` and
``eta(b) = aa``, the traces ``h_n = tr tau(eta^n(a))`` satisfy

    h_0 = E - lam,  h_1 = E^2 - lam^2 - 2,  h_{n+1} = h_n (h_{n-1}^2 - 2) - 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import gmpy2
from gmpy2 import mpfr

from .errors import InvalidInput, OrbitOverflow
from .numeric import HUGE, Real, to_mpfr, working_precision

# Words longer than this are streamed block by block instead of built.
MATERIALIZE_LIMIT = 22
DEFAULT_MAX_LEVEL = 24


def _decimal_text(q: Fraction) -> str:
    """Exact decimal text of ``q`` when it terminates, else ``p/q``."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    text = str(scaled).rjust(digits + 1, "0")
    out = text[:-digits] + "." + text[-digits:]
    out = out.rstrip("0").rstrip(".")
    return ("-" if q < 0 else "") + out


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``lam`` and working precision.

    ``precision_bits=None`` selects ``max(64, 4n + 64)`` bits at level ``n``.
    """

    lam: Fraction
    precision_bits: Optional[int] = None
    max_level: int = DEFAULT_MAX_LEVEL

    def __post_init__(self):
        try:
            lam = Fraction(self.lam) if not isinstance(self.lam, float) else Fraction(repr(self.lam))
        except (ValueError, TypeError) as exc:
            raise InvalidInput(f"lambda is not a number: {self.lam!r}") from exc
        if lam <= 0:
            raise InvalidInput("lambda must be positive")
        object.__setattr__(self, "lam", lam)
        if self.precision_bits is not None and self.precision_bits < 53:
            raise InvalidInput("precision must be at least 53 bits")
        if self.max_level < 0:
            raise InvalidInput("level cap must be non-negative")

    @property
    def lam_text(self) -> str:
        return _decimal_text(self.lam)

    def bits(self, level: int) -> int:
        if self.precision_bits is not None:
            return self.precision_bits
        return max(64, 4 * level + 64)

    def lam_mpfr(self) -> mpfr:
        return to_mpfr(self.lam)

    def check_level(self, n: int) -> None:
        if n < 0:
            raise InvalidInput(f"level must be non-negative, got {n}")
        if n > self.max_level:
            raise InvalidInput(f"level {n} exceeds the cap {self.max_level}")


@dataclass
class TraceVector:
    energy: mpfr
    values: list
    derivatives: Optional[list] = None
    bits: int = field(default=53)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def trace_and_derivative(x: mpfr, lam: mpfr, n: int) -> tuple[mpfr, mpfr]:
    """``(h_n(x), h_n'(x))`` in the current context; the hot loop of the solvers."""
    h0 = x - lam
    if n == 0:
        return h0, mpfr(1)
    d0 = mpfr(1)
    h1 = x * x - lam * lam - 2
    d1 = 2 * x
    for _ in range(n - 1):
        q = h0 * h0 - 2
        h2 = h1 * q - 2
        d2 = d1 * q + 2 * h1 * h0 * d0
        h0, d0, h1, d1 = h1, d1, h2, d2
    return h1, d1


def trace_sequence(x: mpfr, lam: mpfr, n: int, derivatives: bool = False):
    """Lists ``h_0..h_n`` (and derivatives) in the current context."""
    hs = [x - lam]
    ds = [mpfr(1)]
    if n >= 1:
        hs.append(x * x - lam * lam - 2)
        ds.append(2 * x)
    for k in range(1, n):
        q = hs[k - 1] * hs[k - 1] - 2
        hs.append(hs[k] * q - 2)
        if derivatives:
            ds.append(ds[k] * q + 2 * hs[k] * hs[k - 1] * ds[k - 1])
    return hs, (ds if derivatives else None)


def _check_finite(values) -> None:
    for k, v in enumerate(values):
        if not gmpy2.is_finite(v):
            raise OrbitOverflow(k - 1)


def eval_traces(E: Real, n: int, params: ModelParams) -> TraceVector:
    """Trace values ``h_0(E), ..., h_n(E)``."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    bits = params.bits(n)
    with working_precision(bits):
        x = to_mpfr(E)
        hs, _ = trace_sequence(x, params.lam_mpfr(), n)
    _check_finite(hs)
    return TraceVector(x, hs, None, bits)


def eval_derivatives(E: Real, n: int, params: ModelParams) -> TraceVector:
    """Trace values together with ``h_k'(E)`` for ``k <= n``."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    bits = params.bits(n)
    with working_precision(bits):
        x = to_mpfr(E)
        hs, ds = trace_sequence(x, params.lam_mpfr(), n, derivatives=True)
    _check_finite(hs)
    _check_finite(ds)
    return TraceVector(x, hs, ds, bits)


def fundamental_residual(E: Real, n: int, params: ModelParams) -> mpfr:
    """``h_{n+1} - (h_n^2 - 2) - (-1)^n 2 lam prod_{j<=n} h_j``; vanishes identically."""
    bits = params.bits(n + 1)
    with working_precision(bits):
        x = to_mpfr(E)
        lam = params.lam_mpfr()
        hs, _ = trace_sequence(x, lam, n + 1)
        prod = mpfr(1)
        for h in hs[: n + 1]:
            prod *= h
        return hs[n + 1] - (hs[n] * hs[n] - 2) - (-1) ** n * 2 * lam * prod


def fundamental_scale(E: Real, n: int, params: ModelParams) -> mpfr:
    """Magnitude of the largest term entering the fundamental residual."""
    bits = params.bits(n + 1)
    with working_precision(bits):
        x = to_mpfr(E)
        lam = params.lam_mpfr()
        hs, _ = trace_sequence(x, lam, n + 1)
        prod = mpfr(1)
        for h in hs[: n + 1]:
            prod *= h
        terms = [abs(hs[n + 1]), hs[n] * hs[n] + 2, abs(2 * lam * prod)]
        return max(max(terms), mpfr(1))


# -- substitution words ------------------------------------------------------

_ETA = str.maketrans({"a": "ab", "b": "aa"})


def substitution_word(n: int, letter: str = "a") -> str:
    """``eta^n(letter)`` as a string; refused beyond the materialization limit."""
    if n > MATERIALIZE_LIMIT:
        raise InvalidInput(f"refusing to build a word of length 2^{n}")
    word = letter
    for _ in range(n):
        word = word.translate(_ETA)
    return word


def iter_substitution_word(n: int, letter: str = "a") -> Iterator[str]:
    """Letters of ``eta^n(letter)``, streamed for long words."""
    if n <= MATERIALIZE_LIMIT:
        yield from substitution_word(n, letter)
        return
    if letter == "a":
        yield from iter_substitution_word(n - 1, "a")
        yield from iter_substitution_word(n - 1, "b")
    else:
        yield from iter_substitution_word(n - 1, "a")
        yield from iter_substitution_word(n - 1, "a")


def transfer_product(E: Real, n: int, params: ModelParams):
    """``tau(eta^n(a))`` by multiplying letter matrices one at a time.

    ``tau`` reverses products, so each new letter multiplies from the left.
    Returns the matrix as a tuple ``(m00, m01, m10, m11)`` and the largest
    entry magnitude met on the way.
    """
    params.check_level(n)
    with working_precision(params.bits(n)):
        x = to_mpfr(E)
        lam = params.lam_mpfr()
        diag = {"a": x - lam, "b": x + lam}
        m00, m01, m10, m11 = mpfr(1), mpfr(0), mpfr(0), mpfr(1)
        peak = mpfr(1)
        for c in iter_substitution_word(n):
            t = diag[c]
            m00, m01, m10, m11 = t * m00 - m10, t * m01 - m11, m00, m01
            peak = max(peak, abs(m00), abs(m01))
        return (m00, m01, m10, m11), peak


def transfer_trace(E: Real, n: int, params: ModelParams) -> mpfr:
    """Independent evaluation of ``h_n(E)`` through explicit matrix products."""
    (m00, _, _, m11), _ = transfer_product(E, n, params)
    with working_precision(params.bits(n)):
        return m00 + m11


# -- divergence ----------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceCertificate:
    """``|h_n0|, |h_{n0+1}| >= 2 + delta`` forces ``|h_{n0+k}| >= 2 + 10^{k//2} delta``."""

    n0: int
    delta: mpfr


def saturating_traces(x: mpfr, lam: mpfr, n: int) -> tuple[list, Optional[int]]:
    """Traces up to ``n`` stopping after two consecutive values beyond ``HUGE``.

    Returns the computed values and the index of the first huge value, if any.
    """
    hs = [x - lam]
    if n >= 1:
        hs.append(x * x - lam * lam - 2)
    first_huge = None
    for k in range(len(hs)):
        if abs(hs[k]) > HUGE and first_huge is None:
            first_huge = k
    k = 1
    while k < n:
        if abs(hs[k]) > HUGE and abs(hs[k - 1]) > HUGE:
            break
        q = hs[k - 1] * hs[k - 1] - 2
        hs.append(hs[k] * q - 2)
        k += 1
        if first_huge is None and abs(hs[k]) > HUGE:
            first_huge = k
    return hs, first_huge


def certify_unbounded(
    E: Real, max_n: int, params: ModelParams, delta_min: Real = Fraction(1, 1024)
) -> Optional[DivergenceCertificate]:
    """First index ``n0 < max_n`` with two consecutive traces beyond ``2 + delta_min``."""
    with working_precision(params.bits(max_n)):
        x = to_mpfr(E)
        dmin = to_mpfr(delta_min)
        if dmin <= 0:
            raise InvalidInput("delta_min must be positive")
        hs, _ = saturating_traces(x, params.lam_mpfr(), max_n)
        for k in range(len(hs) - 1):
            slack = min(abs(hs[k]), abs(hs[k + 1])) - 2
            if slack >= dmin:
                return DivergenceCertificate(k, slack)
    return None


def random_energy(rng, lam: Fraction) -> Fraction:
    """A dyadic energy drawn from ``[-(lam + 3), lam + 3]``."""
    half = int((lam + 3) * 2**20) + 1
    return Fraction(rng.randrange(-half, half + 1), 2**20)


def verify_traces(params: ModelParams, n_max: int, samples: int = 50, seed: int = 0):
    """Recurrence against explicit transfer matrix products, and the fundamental identity.

    Both comparisons are relative to ``2^(-p/2)`` where ``p`` is the working
    precision at the compared level.
    """
    import random

    from .report import Report

    rep = Report(f"traces, lambda {params.lam_text}")
    rng = random.Random(seed)
    for _ in range(samples):
        E = random_energy(rng, params.lam)
        n = rng.randint(0, n_max)
        h = eval_traces(E, n, params)[n]
        t = transfer_trace(E, n, params)
        tol = mpfr(2) ** (-(params.bits(n) // 2))
        rep.check("recurrence vs transfer product", abs(t - h) <= tol * max(abs(h), 1), (str(E), n))
        if n < n_max:
            r = fundamental_residual(E, n, params)
            tol1 = mpfr(2) ** (-(params.bits(n + 1) // 2))
            rep.check("fundamental identity", abs(r) <= tol1 * fundamental_scale(E, n, params), (str(E), n))
    return rep
