import json

import pytest
from hypothesis import given, strategies as st

from macexp.curves import ExponentCurve, fmt, rounded, sample_curve
from macexp.errors import MacexpError


def curves():
    return st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=20).map(
        lambda pts: ExponentCurve(tuple(zip(sorted({round(r, 6) for r, _ in pts}),
                                            sorted((e for _, e in pts), reverse=True))),
                                  "c", {"q": 0.1}))


class TestCurve:
    def test_validation(self):
        with pytest.raises(MacexpError):
            ExponentCurve(((0.1, 1.0), (0.1, 0.5)))
        with pytest.raises(MacexpError):
            ExponentCurve(((0.1, -1.0),))
        with pytest.raises(MacexpError):
            ExponentCurve(((0.0, 0.1), (0.1, 0.5)))

    def test_negative_zero_not_written(self):
        assert fmt(-0.0) == "0"
        assert rounded(1 / 3) == 0.333333333333

    @given(curves())
    def test_csv_json_round_trip(self, c):
        a = ExponentCurve.from_csv(c.to_csv())
        b = ExponentCurve.from_json(json.dumps(c.to_json()))
        assert a == b
        assert a.label == "c" and a.params == {"q": 0.1}

    def test_bad_header(self):
        with pytest.raises(MacexpError):
            ExponentCurve.from_csv("x,y\n0,1\n")

    def test_sample_clamps(self):
        c = sample_curve(lambda r: 0.5 - r, [0.0, 0.25, 1.0], "lin")
        assert c.exponents.tolist() == [0.5, 0.25, 0.0]
        assert c.rates.tolist() == [0.0, 0.25, 1.0]
