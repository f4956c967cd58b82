"""Planar deployment geometry: base stations, claimant region, ToA vectors.

Units are fixed throughout the package: meters for space, nanoseconds for
time.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

SPEED_OF_LIGHT = 0.299792458  # m/ns

CLAIMED = "claimed"
TRUE = "true"


@dataclass(frozen=True)
class BaseStation:
    id: int
    x: float
    y: float

    @property
    def position(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Location:
    x: float
    y: float
    role: str = CLAIMED

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidParameterError(f"non-finite location ({self.x}, {self.y})")
        if self.role not in (CLAIMED, TRUE):
            raise InvalidParameterError(f"unknown location role {self.role!r}")


@dataclass(frozen=True)
class Scenario:
    """Base-station layout plus the rectangle claimants are drawn from.

    ``claimant_region`` is ``(xmin, ymin, xmax, ymax)``. A zero-extent
    region is accepted so that a fixed claim point can be simulated.
    """

    base_stations: tuple
    claimant_region: tuple
    speed_of_light: float = SPEED_OF_LIGHT
    _positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        stations = tuple(
            bs if isinstance(bs, BaseStation) else BaseStation(i + 1, float(bs[0]), float(bs[1]))
            for i, bs in enumerate(self.base_stations)
        )
        object.__setattr__(self, "base_stations", stations)
        region = tuple(float(r) for r in self.claimant_region)
        object.__setattr__(self, "claimant_region", region)

        if len(stations) < 2:
            raise InvalidParameterError("a scenario needs at least 2 base stations")
        pos = np.array([bs.position for bs in stations], dtype=float)
        if not np.all(np.isfinite(pos)):
            raise InvalidParameterError("base-station positions must be finite")
        if len({bs.position for bs in stations}) != len(stations):
            raise InvalidParameterError("base-station positions must be distinct")
        if len(region) != 4 or not all(math.isfinite(r) for r in region):
            raise InvalidParameterError(f"bad claimant region {region}")
        xmin, ymin, xmax, ymax = region
        if xmin > xmax or ymin > ymax:
            raise InvalidParameterError(f"claimant region has negative extent: {region}")
        lo, hi = pos.min(axis=0), pos.max(axis=0)
        if xmin < lo[0] or ymin < lo[1] or xmax > hi[0] or ymax > hi[1]:
            raise InvalidParameterError(
                f"claimant region {region} lies outside the deployment box "
                f"({lo[0]}, {lo[1]}, {hi[0]}, {hi[1]})"
            )
        if not self.speed_of_light > 0:
            raise InvalidParameterError("speed of light must be positive")
        pos.setflags(write=False)
        object.__setattr__(self, "_positions", pos)

    @property
    def n_bs(self):
        return len(self.base_stations)

    @property
    def positions(self):
        """(N, 2) array of base-station coordinates in index order."""
        return self._positions

    def to_dict(self):
        return {
            "bs": [[bs.x, bs.y] for bs in self.base_stations],
            "region": list(self.claimant_region),
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(base_stations=tuple(map(tuple, doc["bs"])), claimant_region=tuple(doc["region"]))
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"malformed scenario document: {exc}") from exc

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


CORNERS = ((0.0, 0.0), (1000.0, 0.0), (0.0, 500.0), (1000.0, 500.0))
DEFAULT_REGION = (250.0, 0.0, 750.0, 500.0)

PRESETS = {
    "bs4": CORNERS,
    "bs6": CORNERS + ((500.0, 0.0), (500.0, 500.0)),
}


def preset(name):
    """Build one of the named default layouts (``bs4`` or ``bs6``)."""
    try:
        stations = PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown scenario preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return Scenario(base_stations=stations, claimant_region=DEFAULT_REGION)


def distance(loc, bs):
    """Euclidean distance in meters between a location and a base station."""
    return math.hypot(loc.x - bs.x, loc.y - bs.y)


def toa_matrix(scenario, xy):
    """Noiseless ToA (ns) from each row of ``xy`` (shape (..., 2)) to every BS.

    Returns shape (..., N).
    """
    xy = np.asarray(xy, dtype=float)
    diff = xy[..., None, :] - scenario.positions
    return np.hypot(diff[..., 0], diff[..., 1]) / scenario.speed_of_light


def claimed_toa_vector(scenario, claimed):
    """ToA vector U expected at each BS for a transmitter at ``claimed``."""
    return toa_matrix(scenario, (claimed.x, claimed.y))


def mean_toa(u):
    """Replace each ToA row by its mean, keeping constant rows bit-exact."""
    u = np.asarray(u, dtype=float)
    mean = u.mean(axis=-1, keepdims=True)
    constant = np.ptp(u, axis=-1, keepdims=True) == 0
    return np.broadcast_to(np.where(constant, u[..., :1], mean), u.shape).copy()


def attacker_mean_vector(scenario, claimed):
    """Mean observation vector V of a far-field spoofer claiming ``claimed``.

    A distant attacker reaches every BS with the same delay and tunes its
    timing offset so that delay equals the average of the claimed ToAs.
    """
    return mean_toa(claimed_toa_vector(scenario, claimed))


def spoofed_toa_vector(scenario, true_location, time_offset):
    """V = W + T_x * 1 for an explicit attacker position and timing offset.

    Diagnostic helper; the simulator itself uses the far-field limit in
    :func:`attacker_mean_vector`.
    """
    return toa_matrix(scenario, (true_location.x, true_location.y)) + time_offset


def sample_claimed_locations(scenario, rng, n):
    """Draw ``n`` claimed positions uniformly over the claimant region, shape (n, 2)."""
    xmin, ymin, xmax, ymax = scenario.claimant_region
    u = rng.random((n, 2))
    xy = np.empty((n, 2))
    xy[:, 0] = xmin + (xmax - xmin) * u[:, 0]
    xy[:, 1] = ymin + (ymax - ymin) * u[:, 1]
    return xy


def sample_claimed_location(scenario, rng):
    x, y = sample_claimed_locations(scenario, rng, 1)[0]
    return Location(float(x), float(y), CLAIMED)
