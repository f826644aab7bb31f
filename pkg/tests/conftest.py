"""Shared fixtures: a tiny corner corridor and the roundabout route."""

import numpy as np
import pytest

from ridecomfort.route import RouteCorridor, Station
from ridecomfort.synthetic import roundabout_route


def corner_route(leg: float = 8.0, half_width: float = 1.5,
                 v_lo: float = 2.0, v_hi: float = 12.0) -> RouteCorridor:
    """Five stations through two 45 degree bends, then straight out.

    Small enough for exhaustive search over discretized plans, bent enough
    that lateral acceleration matters.
    """
    seg_headings = np.array([0.0, np.pi / 4, np.pi / 2, np.pi / 2])
    centers = np.zeros((5, 2))
    for k, h in enumerate(seg_headings):
        centers[k + 1] = centers[k] + leg * np.array([np.cos(h), np.sin(h)])
    # station tangent = mean of adjacent segment headings, endpoints copied
    tangents = np.concatenate(
        [[seg_headings[0]],
         0.5 * (seg_headings[:-1] + seg_headings[1:]),
         [seg_headings[-1]]]
    )
    stations = tuple(
        Station(
            center_x=float(c[0]), center_y=float(c[1]),
            lateral_axis_angle=float(t + np.pi / 2),
            y_min=-half_width, y_max=half_width,
            v_min=v_lo, v_max=v_hi,
        )
        for c, t in zip(centers, tangents)
    )
    return RouteCorridor(stations=stations, name="corner")


@pytest.fixture(scope="session")
def corner():
    return corner_route()


@pytest.fixture(scope="session")
def roundabout():
    return roundabout_route()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
