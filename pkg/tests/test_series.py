import math
import time
from fractions import Fraction

import numpy as np
import pytest

from proxpareto.exceptions import UnsupportedAtomError
from proxpareto.parallel import ordered_map
from proxpareto.sampling import geometric_levels, is_blow_up, loglog_fit, step_band
from proxpareto.series import Oscillation, Series, signed_power

H = Series.build({Fraction(1): 1.0})


def test_signed_power():
    assert signed_power(-8.0, Fraction(1, 3)) == pytest.approx(-2.0)
    assert signed_power(-8.0, Fraction(2, 3)) == pytest.approx(4.0)
    assert math.isnan(signed_power(-1.0, Fraction(1, 2)))
    assert signed_power(4.0, Fraction(1, 2)) == pytest.approx(2.0)


def test_root_of_the_increment():
    root = H.power(Fraction(1, 3))
    assert root.terms == ((Fraction(1, 3), 1.0),)
    assert root.dini_slope() == math.inf
    assert (-root).dini_slope() == -math.inf


def test_binomial_expansion():
    sqrt = (Series.constant(1.0) + H).power(Fraction(1, 2))
    coefficients = sqrt.as_dict()
    assert coefficients[Fraction(0)] == pytest.approx(1.0)
    assert coefficients[Fraction(1)] == pytest.approx(0.5)
    assert coefficients[Fraction(2)] == pytest.approx(-0.125)
    assert sqrt.dini_slope() == pytest.approx(0.5)


def test_signs_and_comparison():
    assert (-H).sign() == -1
    assert Series.constant(0.0).sign() == 0
    assert (-H).absolute().terms == H.terms
    assert H.compare(H * H) == 1
    with pytest.raises(UnsupportedAtomError):
        Series.build({Fraction(1): 1.0}, oscillation=Oscillation(1, 0.5, math.inf)).sign()


def test_off_domain_propagates():
    assert (H + Series.off_domain()).outside
    assert Series.constant(-1.0).power(Fraction(1, 2)).outside
    assert (-H).power(Fraction(1, 2)).outside


def test_truncated_expansion_cannot_decide():
    short = Series.build({}, precision=Fraction(1, 2))
    with pytest.raises(UnsupportedAtomError):
        short.sign()
    with pytest.raises(UnsupportedAtomError):
        short.dini_slope()


def test_schedules():
    assert geometric_levels(3) == pytest.approx((0.1, 0.01, 0.001))
    band = step_band(0.1)
    assert band[0] == pytest.approx(0.1)
    assert np.all(np.diff(band) < 0) and np.all(band > 0)


def test_loglog_fit():
    t = np.array(geometric_levels(5))
    slope, r2 = loglog_fit(t, t ** -0.5)
    assert slope == pytest.approx(-0.5)
    assert r2 == pytest.approx(1.0)
    assert loglog_fit(t, np.r_[1.0, np.zeros(4)]) == (0.0, 0.0)
    assert is_blow_up(t, t ** (-2.0 / 3.0))
    assert not is_blow_up(t, np.ones(5))


def test_ordered_map_keeps_input_order():
    def slow_square(k):
        time.sleep(0.001 * (5 - k))
        return k * k

    assert ordered_map(slow_square, range(5), threads=3) == [0, 1, 4, 9, 16]
    assert ordered_map(slow_square, range(5)) == [0, 1, 4, 9, 16]
