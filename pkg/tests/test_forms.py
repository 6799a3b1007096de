from fractions import Fraction
from math import gcd

import pytest

from mhecke.errors import CuspNotOfLevel, UnsupportedLevel
from mhecke.field import QuadTowerNumber
from mhecke.forms import (
    E2, Classical, Constant, EtaQuotient, Faber, Hauptmodul, Power, Product, Scale, Sum, cusp_width,
    cusps, eta_cusp_order, eta_expansion, expand, faber, faber_polynomial, hauptmodul,
    level9_form, level11_form, named_form, spec_from_json,
)
from mhecke.qseries import QSeries


def naive_euler(T):
    """prod_{n<T} (1 - q^n) by repeated multiplication."""
    out = [1] + [0] * (T - 1)
    for n in range(1, T):
        new = out[:]
        for k in range(n, T):
            new[k] -= out[k - n]
        out = new
    return out


def sigma_k(n, k):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def test_eta_matches_product():
    s = eta_expansion(60)
    assert s.offset == Fraction(1, 24)
    assert s.coeffs == naive_euler(60)


@pytest.mark.parametrize("k,c", [(2, -24), (4, 240), (6, -504)])
def test_eisenstein_coefficients(k, c):
    spec = E2() if k == 2 else Classical(f"E{k}")
    s = expand(spec, 40)
    assert s.coeffs == [1] + [c * sigma_k(n, k - 1) for n in range(1, 40)]


def test_delta_against_eisenstein_oracle():
    e4, e6 = expand(Classical("E4"), 30), expand(Classical("E6"), 30)
    oracle = (e4 * e4 * e4 - e6 * e6) / 1728
    delta = expand(Classical("Delta"), 29)
    assert delta.agrees_with(oracle)
    assert delta.coeffs[:6] == [1, -24, 252, -1472, 4830, -6048]


def test_j_coefficients():
    j = expand(Classical("j"), 4)
    assert (j.offset, j.coeffs) == (-1, [1, 744, 196884, 21493760])


def test_hauptmoduln():
    h7 = hauptmodul(7, 6)
    oracle = expand(EtaQuotient(((1, 4), (7, -4)), 7), 6) + 4
    assert h7.agrees_with(oracle)
    assert h7.offset == -1 and h7[0] == 0
    h9 = hauptmodul(9, 8)
    assert [h9[n] for n in range(-1, 7)] == [1, -3, 0, 5, 0, 0, -7, 0]
    with pytest.raises(UnsupportedLevel):
        hauptmodul(11, 5)
    with pytest.raises(UnsupportedLevel):
        Hauptmodul(11)


def test_faber_polynomials():
    assert faber_polynomial(7, 3) == (-24, -6, 0, 1)
    assert faber_polynomial(1, 1) == (-744, 1)
    assert faber_polynomial(1, 2) == (159768, -1488, 1)
    assert faber_polynomial(9, 2) == (9, 6, 1)


@pytest.mark.parametrize("N", [1, 7, 9])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_faber_series_shape(N, n):
    poly, f = faber(N, n, 8)
    assert f.offset == -n and f[-n] == 1
    assert all(f[k] == 0 for k in range(-n + 1, 1))


def test_faber_level1_is_usual_hecke_image():
    from mhecke.hecke import usual_hecke
    j1 = faber(1, 1, 12)[1]
    for p in (2, 3):
        image = usual_hecke(j1, 0, p, 1)
        target = faber(1, p, 12)[1]
        diff = image - target
        assert all(diff[n] == 0 for n in range(-p, 1) if n != 0)
        assert diff.agrees_with(QSeries(0, [diff[0]], int(diff.precision)))


def test_cusps_and_widths():
    assert cusps(1) == [None]
    assert cusps(7) == [Fraction(0), None]
    assert cusps(9) == [Fraction(0), Fraction(1, 3), Fraction(2, 3), None]
    for N in range(1, 40):
        count = sum(sum(1 for u in range(gcd(c, N // c)) if gcd(u, gcd(c, N // c)) == 1)
                    for c in range(1, N + 1) if N % c == 0)
        assert len(cusps(N)) == count
    # widths sum to the index of Gamma0(N)
    assert sum(cusp_width(c, 9) for c in cusps(9)) == 12
    assert sum(cusp_width(c, 7) for c in cusps(7)) == 8


def test_eta_orders():
    h9 = EtaQuotient(((1, 3), (9, -3)), 9)
    assert [eta_cusp_order(h9, c, 9) for c in cusps(9)] == [1, 0, 0, -1]
    delta = EtaQuotient(((1, 24),), 9)
    orders = [eta_cusp_order(delta, c, 9) for c in cusps(9)]
    assert orders == [9, 1, 1, 1] and sum(orders) == 12  # weight 12 * index 12 / 12
    h7 = EtaQuotient(((1, 4), (7, -4)), 7)
    assert [eta_cusp_order(h7, c, 7) for c in cusps(7)] == [1, -1]
    with pytest.raises(CuspNotOfLevel):
        eta_cusp_order(h9, Fraction(1, 2), 9)


def test_order_at_infinity_matches_expansion():
    for spec, N in ((EtaQuotient(((1, 3), (9, -3)), 9), 9), (EtaQuotient(((1, 2), (11, 2)), 11), 11)):
        assert eta_cusp_order(spec, None, N) == expand(spec, 3).offset


def test_named_forms():
    f = expand(level11_form(), 30)
    assert f.coeffs[:2] == [1, 0]
    # oracle: -(1/10)(E2 - 11 E2(11 tau)) + (-12/5) eta^2 eta11^2 summed term by term
    e2 = [1] + [-24 * sigma_k(n, 1) for n in range(1, 30)]
    e2_11 = [e2[n // 11] if n % 11 == 0 else 0 for n in range(30)]
    eta = expand(EtaQuotient(((1, 2), (11, 2)), 11), 29)
    for n in range(1, 29):
        val = Fraction(-1, 10) * (e2[n] - 11 * e2_11[n] + 24 * eta[n])
        assert f[n] == val
    g = expand(level9_form(), 4)
    s3 = QuadTowerNumber.sqrt(-3)
    assert g[0] == Fraction(3, 2) + Fraction(3, 2) * s3
    with pytest.raises(ValueError):
        named_form("nonsense")


def test_spec_json_round_trip():
    spec = Sum((
        Scale(Fraction(-1, 3), Product((E2(2), Classical("E4", 3)))),
        Power(EtaQuotient(((1, 2), (11, 2)), 11), 2),
        Constant(QuadTowerNumber.sqrt(-3)),
        Faber(7, 2), Hauptmodul(9),
    ))
    back = spec_from_json(spec.dumps())
    assert back == spec
    assert expand(back, 6).agrees_with(expand(spec, 6))
