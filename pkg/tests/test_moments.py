import math
from fractions import Fraction

import pytest

from piecewise_melnikov.exactpoly import Poly
from piecewise_melnikov.moments import base_integrals, moment, reduce_moment
from piecewise_melnikov.quadrature import arc, arc_moment

FAM_ARC = {"I": "AB", "J": "BC", "It": "CD", "Jt": "DA", "U": "AD-lower", "V": "DA-upper"}


def test_base_integrals_h2():
    vals = base_integrals(2.0)
    assert vals["J00"] == pytest.approx(-2.0, abs=1e-14)
    assert vals["I11"] == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert vals["I01"] == pytest.approx(math.pi / 2.0 - 1.0, abs=1e-14)
    assert vals["J01"] == pytest.approx(1.0 + math.pi / 2.0, abs=1e-14)
    assert vals["U01"] == pytest.approx(3.0 * math.pi / 2.0 - 1.0, abs=1e-14)
    assert vals["V00"] == pytest.approx(2.0, abs=1e-14)


def test_base_integrals_match_quadrature():
    pairs = {
        "J00": ("J", 0, 0), "I11": ("I", 1, 1), "I01": ("I", 0, 1), "J01": ("J", 0, 1),
        "U00": ("U", 0, 0), "U01": ("U", 0, 1), "V00": ("V", 0, 0), "V01": ("V", 0, 1),
    }
    for h in (0.25, 2.0, 17.0):
        vals = base_integrals(h)
        for name, (fam, i, j) in pairs.items():
            q = arc_moment(arc(FAM_ARC[fam], h), i, j, "dx", h)
            assert vals[name] == pytest.approx(q, abs=1e-10), name


def test_reduce_I03_exact():
    rm = reduce_moment("I", 0, 3)
    assert rm.base == "I01"
    assert rm.coeff == Fraction(3, 4)
    assert rm.power == 1
    assert rm.boundary == Poly.monomial(Fraction(-1, 2), 7)


def test_reduce_I21_exact():
    rm = reduce_moment("I", 2, 1)
    assert (rm.base, rm.coeff, rm.power) == ("I01", Fraction(1, 4), 1)
    assert rm.boundary == Poly.monomial(Fraction(1, 2), 7)


def test_reduce_I41_exact():
    # the h*(.)^{7/2} term carries a plus sign; quadrature agrees (see
    # test_reduction_matches_quadrature), so this fixes the whole table
    rm = reduce_moment("I", 4, 1)
    assert (rm.base, rm.coeff, rm.power) == ("I01", Fraction(1, 8), 2)
    assert rm.boundary == Poly.monomial(Fraction(7, 12), 9) + Poly.monomial(Fraction(1, 4), 11)


def test_reduce_even_j_vanishes():
    rm = reduce_moment("I", 0, 2)
    assert rm.base is None
    assert not rm.boundary
    assert moment("I", 0, 2, 2.0) == 0.0


def test_reduce_base_power_respects_brackets():
    # I[2l, 2m+1] reduces onto h^((N-1)/2) I01 with N = 2l+2m+1, and so on
    for l in range(0, 3):
        for m in range(0, 3):
            rm = reduce_moment("I", 2 * l, 2 * m + 1)
            assert rm.base == "I01" and rm.power == l + m
            rm = reduce_moment("I", 2 * l + 1, 2 * m + 1)
            assert rm.base == "I11" and rm.power == l + m
            rm = reduce_moment("J", 2 * l, 2 * m)
            if (l, m) != (0, 0):
                assert rm.base == "J00" and rm.power == l + m
            rm = reduce_moment("J", 2 * l, 2 * m + 1)
            assert rm.base == "J01" and rm.power == l + m


def test_moment_values_h2():
    assert moment("I", 0, 3, 2.0) == pytest.approx(3 * math.pi / 4 - 2, abs=1e-13)
    assert moment("I", 2, 1, 2.0) == pytest.approx(math.pi / 4, abs=1e-13)


def test_folded_moment_against_cd_quadrature():
    # brute-force quadrature over CD is the oracle for the fold sign
    q = arc_moment(arc("CD", 2.0), 2, 1, "dx", 2.0)
    assert moment("It", 2, 1, 2.0) == pytest.approx(q, abs=1e-10)
    assert q == pytest.approx(math.pi / 4, abs=1e-10)


def test_fold_rules_numeric():
    for h in (0.5, 5.0):
        for i in range(4):
            for j in range(4):
                assert moment("It", i, j, h) == pytest.approx(
                    (-1) ** (i + j + 1) * moment("I", i, j, h), abs=1e-12
                )
                assert moment("Jt", i, j, h) == pytest.approx(
                    (-1) ** (j + 1) * moment("J", i, j, h), abs=1e-12
                )


def test_reduction_matches_quadrature_all_families():
    # oracle equivalence over the whole support triangle
    for fam, label in FAM_ARC.items():
        for h in (0.5, 1.0, 2.0, 5.0, 20.0):
            for i in range(7):
                for j in range(7 - i):
                    q = arc_moment(arc(label, h), i, j, "dx", h)
                    m = moment(fam, i, j, h)
                    assert abs(m - q) <= 1e-9 * (1.0 + abs(q)), (fam, i, j, h)


def test_unknown_family():
    with pytest.raises(ValueError):
        reduce_moment("K", 0, 0)
