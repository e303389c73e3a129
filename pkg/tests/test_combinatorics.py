from math import comb

import pytest
from hypothesis import given, strategies as st

from ultraacv.combinatorics import (
    catalan, count_dyck_paths, iso_class_bound, iso_class_bound_t1, iso_class_count,
    moment_formula,
)
from ultraacv.errors import DomainError, ResourceError


def test_catalan_values():
    assert catalan(0) == 1
    assert catalan(3) == 5
    assert catalan(10) == 16796


def test_moment_formula_values():
    assert moment_formula(1) == 1
    assert moment_formula(3) == 5
    assert moment_formula(12) == 208012
    assert catalan(12) == 208012


def test_big_integers():
    # beyond 64 bits the values stay exact
    k = 40
    assert moment_formula(k) == catalan(k) > 2**64


def test_dyck_small():
    assert count_dyck_paths(1) == 1
    assert count_dyck_paths(3) == 5
    assert count_dyck_paths(0) == 1


def test_dyck_ten():
    assert count_dyck_paths(10) == 16796


def test_three_way_equality():
    for k in range(1, 13):
        assert count_dyck_paths(k) == moment_formula(k) == catalan(k)


def test_dyck_budget():
    with pytest.raises(ResourceError):
        count_dyck_paths(15)


def test_iso_class_values():
    assert iso_class_count(3, 3) == 5
    assert iso_class_count(3, 2) == 6  # (1/3) * 6 * 3
    assert iso_class_count(5, 1) == 1


def test_iso_class_diagonal():
    for k in range(1, 21):
        assert iso_class_count(k, k) == moment_formula(k)


def test_iso_class_integral_and_positive():
    for k in range(1, 41):
        for t in range(1, k + 1):
            v = iso_class_count(k, t)
            assert v >= 1
            assert v * k == comb(2 * k, t - 1) * comb(k, t)


def test_iso_class_domain():
    with pytest.raises(DomainError):
        iso_class_count(3, 4)
    with pytest.raises(DomainError):
        iso_class_count(3, 0)


def test_bound_values():
    assert iso_class_bound(3, 2, 4) == 24
    assert iso_class_bound(3, 3, 4) == 5


@given(st.integers(2, 25).flatmap(lambda k: st.tuples(st.just(k), st.integers(2, k))))
def test_bound_sj_one(kt):
    k, t = kt
    assert iso_class_bound(k, t, 1) == iso_class_count(k, t)


@given(st.integers(2, 25).flatmap(lambda k: st.tuples(st.just(k), st.integers(2, k))))
def test_bound_unimodal(kt):
    k, t = kt
    vals = [iso_class_bound(k, t, s) for s in range(1, 2 * k + 1)]
    peak = (2 * k - t) // 2 + 1
    assert all(a <= b for a, b in zip(vals[:peak], vals[1:peak]))


def test_bound_t1():
    with pytest.raises(DomainError):
        iso_class_bound(3, 1, 2)
    assert iso_class_bound_t1(3, 2) == comb(6, 4)
    assert iso_class_bound_t1(3, 6) == 1


def test_bound_domain():
    with pytest.raises(DomainError):
        iso_class_bound(3, 2, 7)
    with pytest.raises(DomainError):
        iso_class_bound(3, 4, 1)
