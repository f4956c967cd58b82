import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locverify import scenario as sc
from locverify.errors import InvalidParameterError
from locverify.sampling import make_rng

# independent oracle: plain-python Euclidean distance over c
C = 0.299792458
U_EXAMPLE = [932.3399896453491, 2536.2389746551844, 1503.353061113361, 2797.019968936047]


def test_distance_examples():
    origin = sc.BaseStation(1, 0.0, 0.0)
    assert sc.distance(sc.Location(0, 0), origin) == 0.0
    far = sc.BaseStation(1, 1000.0, 500.0)
    assert sc.distance(sc.Location(250, 125), far) == pytest.approx(838.525, abs=1e-3)


def test_center_is_equidistant_from_corners(bs4):
    center = sc.Location(500, 250)
    for bs in bs4.base_stations:
        assert sc.distance(center, bs) == pytest.approx(559.017, abs=1e-3)


def test_claimed_toa_vector(bs4):
    u = sc.claimed_toa_vector(bs4, sc.Location(250, 125))
    np.testing.assert_allclose(u, U_EXAMPLE, rtol=1e-12)
    np.testing.assert_allclose(u, [932.34, 2536.23, 1503.35, 2797.02], atol=0.01)


def test_claimed_toa_at_station_is_zero(bs4):
    assert sc.claimed_toa_vector(bs4, sc.Location(1000, 0))[1] == 0.0


def test_claimed_toa_symmetric_center(bs4):
    u = sc.claimed_toa_vector(bs4, sc.Location(500, 250))
    np.testing.assert_allclose(u, 1864.68, atol=0.01)
    assert np.ptp(u) == 0


def test_attacker_mean_vector(bs4):
    v = sc.attacker_mean_vector(bs4, sc.Location(250, 125))
    np.testing.assert_allclose(v, 1942.2379985874854, rtol=1e-12)
    assert np.ptp(v) == 0


def test_attacker_mean_equals_u_at_center(bs4):
    c = sc.Location(500, 250)
    np.testing.assert_array_equal(sc.attacker_mean_vector(bs4, c), sc.claimed_toa_vector(bs4, c))


def test_mean_toa_two_stations():
    np.testing.assert_array_equal(sc.mean_toa([100.0, 300.0]), [200.0, 200.0])


coords = st.floats(-2000, 2000, allow_nan=False)


@given(st.lists(st.tuples(coords, coords), min_size=2, max_size=6, unique=True),
       coords, coords, coords, coords)
def test_translation_covariance(stations, x, y, dx, dy):
    if len({(round(a, 6), round(b, 6)) for a, b in stations}) < len(stations):
        return
    box = np.array(stations)
    region = (*box.min(axis=0), *box.min(axis=0))
    s0 = sc.Scenario(tuple(stations), region)
    s1 = sc.Scenario(tuple((a + dx, b + dy) for a, b in stations), (region[0] + dx, region[1] + dy) * 2)
    u0 = sc.claimed_toa_vector(s0, sc.Location(x, y))
    u1 = sc.claimed_toa_vector(s1, sc.Location(x + dx, y + dy))
    np.testing.assert_allclose(u0, u1, rtol=1e-9, atol=1e-6)


@given(st.floats(250, 750), st.floats(0, 500))
def test_attacker_vector_properties(x, y):
    s = sc.preset("bs6")
    u = sc.claimed_toa_vector(s, sc.Location(x, y))
    v = sc.attacker_mean_vector(s, sc.Location(x, y))
    assert np.ptp(v) == 0
    assert v.mean() == pytest.approx(u.mean(), rel=1e-15)
    assert np.all(u >= 0)


def test_spoofed_vector_matches_attacker_mean(bs4):
    # the corner layout's only equidistant point gives constant W; T_x then sets the level
    hidden = sc.Location(500, 250, role=sc.TRUE)
    w = math.hypot(500, 250) / C
    claim = sc.Location(250, 125)
    target = sum(U_EXAMPLE) / 4
    v = sc.spoofed_toa_vector(bs4, hidden, target - w)
    np.testing.assert_allclose(v, sc.attacker_mean_vector(bs4, claim), rtol=1e-12)


def test_spoofed_vector_is_w_plus_offset(bs4):
    hidden = sc.Location(0, 0, role=sc.TRUE)
    expected = [0.0, 1000 / C + 50, 500 / C + 50, math.hypot(1000, 500) / C + 50]
    expected[0] = 50.0
    np.testing.assert_allclose(sc.spoofed_toa_vector(bs4, hidden, 50.0), expected, rtol=1e-12)


def test_sample_claimed_location_uniform(bs4):
    xy = sc.sample_claimed_locations(bs4, make_rng(0), 100_000)
    assert xy[:, 0].min() >= 250 and xy[:, 0].max() <= 750
    assert xy[:, 1].min() >= 0 and xy[:, 1].max() <= 500
    np.testing.assert_allclose(xy.mean(axis=0), [500, 250], rtol=0.01)


def test_sample_claimed_location_degenerate_region():
    s = sc.Scenario(sc.CORNERS, (400, 100, 400, 100))
    rng = make_rng(1)
    for _ in range(5):
        assert sc.sample_claimed_location(s, rng) == sc.Location(400, 100)


def test_sampling_is_deterministic(bs4):
    a = [sc.sample_claimed_location(bs4, make_rng(9)) for _ in range(1)]
    b = [sc.sample_claimed_location(bs4, make_rng(9)) for _ in range(1)]
    assert a == b


def test_json_round_trip(bs6):
    doc = json.loads(bs6.to_json())
    assert doc["bs"][4] == [500.0, 0.0]
    assert doc["region"] == [250.0, 0.0, 750.0, 500.0]
    assert sc.Scenario.from_json(bs6.to_json()) == bs6


@pytest.mark.parametrize("stations, region", [
    (((0, 0),), (0, 0, 0, 0)),
    (((0, 0), (0, 0)), (0, 0, 0, 0)),
    (((0, 0), (10, 10)), (5, 5, 20, 5)),
    (((0, 0), (10, 10)), (5, 5, 4, 5)),
    (((0, 0), (math.inf, 10)), (0, 0, 0, 0)),
])
def test_invalid_scenarios(stations, region):
    with pytest.raises(InvalidParameterError):
        sc.Scenario(stations, region)


def test_unknown_preset():
    with pytest.raises(InvalidParameterError):
        sc.preset("bs5")
