"""Binary band codes: ranks, neighbours, zero order and endpoint ownership.

A band code is a string over ``{'0', '1'}``.  At level ``n`` the bands are
ordered left to right by the rank ``sum sigma_j 2^(n-j)``.
"""

from __future__ import annotations

from typing import Optional

from .errors import InvalidInput


def check_code(code: str) -> str:
    if not isinstance(code, str) or any(c not in "01" for c in code):
        raise InvalidInput(f"not a binary code: {code!r}")
    return code


def rank(code: str) -> int:
    return int(code, 2) if code else 0


def code_of_rank(r: int, n: int) -> str:
    if not 0 <= r < 2**n:
        raise InvalidInput(f"rank {r} out of range at level {n}")
    return format(r, "b").zfill(n) if n else ""


def succ(code: str) -> Optional[str]:
    """The next code at the same level, or ``None`` for ``1^n``."""
    n = len(code)
    r = rank(code) + 1
    return code_of_rank(r, n) if r < 2**n else None


def pred(code: str) -> Optional[str]:
    r = rank(code) - 1
    return code_of_rank(r, len(code)) if r >= 0 else None


def all_codes(n: int) -> list[str]:
    return [code_of_rank(r, n) for r in range(2**n)]


# Zeros are ordered as 0 < (blank) < 1 after padding with blanks.
_ZKEY = {"0": 0, "1": 2}


def zero_key(code: str, length: int) -> tuple:
    return tuple(_ZKEY[c] for c in code) + (1,) * (length - len(code))


def zero_precedes(s: str, t: str) -> bool:
    """Strict zero order: ``z_s < z_t``."""
    m = max(len(s), len(t))
    return zero_key(s, m) < zero_key(t, m)


def sort_by_zero_order(codes) -> list[str]:
    codes = list(codes)
    m = max((len(c) for c in codes), default=0)
    return sorted(codes, key=lambda c: zero_key(c, m))


def left_owner(code: str) -> Optional[str]:
    """Code of the nearest lower-level zero to the left of ``z_code``.

    Strip trailing zeros and the last one; ``None`` when there is no such
    zero (the code is ``0^n``).
    """
    stripped = code.rstrip("0")
    if not stripped:
        return None
    return stripped[:-1]


def right_owner(code: str) -> Optional[str]:
    stripped = code.rstrip("1")
    if not stripped:
        return None
    return stripped[:-1]


def endpoint_owner(code: str, side: str) -> Optional[str]:
    """Code ``theta`` with the endpoint equal to ``z_theta``, or ``None``.

    The left endpoint is a lower-level zero exactly when the left owner has
    even length; the right endpoint when the right owner has odd length.
    """
    check_code(code)
    if side == "left":
        owner = left_owner(code)
        return owner if owner is not None and len(owner) % 2 == 0 else None
    if side == "right":
        owner = right_owner(code)
        return owner if owner is not None and len(owner) % 2 == 1 else None
    raise InvalidInput(f"side must be 'left' or 'right', got {side!r}")


def endpoint_in_R(code: str, side: str) -> bool:
    """Whether the ``side`` endpoint of ``B_code`` is a zero of a lower level."""
    return endpoint_owner(code, side) is not None


def increasing(code: str) -> bool:
    """``h_n`` increases across ``B_code``; at level 0 ``h_0 = E - lam`` does."""
    return code == "" or code[-1] == "1"


def parity_letter(n: int) -> str:
    return "e" if n % 2 == 0 else "o"
