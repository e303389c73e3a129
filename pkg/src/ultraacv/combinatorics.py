"""Exact integer counts behind the moment method.

Everything here returns Python ints.  The J-vertex count is called ``sJ``
throughout so it cannot be confused with the time lag.
"""
from __future__ import annotations

from math import comb

from .errors import ConsistencyError, DomainError, ResourceError

DYCK_MAX_K = 14


def catalan(k: int) -> int:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return comb(2 * k, k) // (k + 1)


def _exact_div(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r:
        raise ConsistencyError(f"{what}: {num} is not divisible by {den}")
    return q


def moment_formula(k: int) -> int:
    """(1/k) C(2k, k-1), the k-th moment of the squared-semicircle law."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return _exact_div(comb(2 * k, k - 1), k, f"moment_formula({k})")


def count_dyck_paths(k: int) -> int:
    """Count +-1 paths of length 2k that stay >= 0 and end at 0, by enumeration.

    Deliberately brute force: this is the oracle for :func:`moment_formula`.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k > DYCK_MAX_K:
        raise ResourceError(f"Dyck enumeration is capped at k = {DYCK_MAX_K}, got {k}")
    n = 2 * k
    count = 0
    # Stack of (steps taken, current height); a branch is pruned only when it
    # goes negative or can no longer return to zero in the remaining steps.
    stack = [(0, 0)]
    while stack:
        step, h = stack.pop()
        if step == n:
            if h == 0:
                count += 1
            continue
        remaining = n - step - 1
        if h + 1 <= remaining:
            stack.append((step + 1, h + 1))
        if h >= 1:
            stack.append((step + 1, h - 1))
    return count


def iso_class_count(k: int, tI: int) -> int:
    """f_{tI-1}(k) = (1/k) C(2k, tI-1) C(k, tI)."""
    if k < 1 or not 1 <= tI <= k:
        raise DomainError(f"need 1 <= tI <= k, got k={k}, tI={tI}")
    return _exact_div(comb(2 * k, tI - 1) * comb(k, tI), k, f"iso_class_count({k}, {tI})")


def iso_class_bound(k: int, tI: int, sJ: int) -> int:
    """Upper bound f_{tI-1}(k) C(2k - tI, sJ - 1) on the class count for tI >= 2."""
    if tI == 1:
        raise DomainError("tI = 1 has its own bound; use iso_class_bound_t1")
    if not 2 <= tI <= k:
        raise DomainError(f"need 2 <= tI <= k, got k={k}, tI={tI}")
    if not 1 <= sJ <= 2 * k:
        raise DomainError(f"need 1 <= sJ <= 2k, got sJ={sJ}")
    return iso_class_count(k, tI) * comb(2 * k - tI, sJ - 1)


def iso_class_bound_t1(k: int, sJ: int) -> int:
    """Bound C(2k, 2k - sJ) for a single distinct I-vertex."""
    if k < 1 or not 1 <= sJ <= 2 * k:
        raise DomainError(f"need k >= 1 and 1 <= sJ <= 2k, got k={k}, sJ={sJ}")
    return comb(2 * k, 2 * k - sJ)
