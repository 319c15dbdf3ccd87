"""Shared geometry, lines and reference values for the tests."""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.config.settings import Settings
from src.geometry.polybasis import LagrangeCurve, PowerCurve, PowerSurface, lagrange_to_power_curve
from src.implicit.intersect import QueryLine

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
EXAMPLES_DIR = os.path.join(REPO_ROOT, 'data', 'examples')

# Cubic interpolating four points at uniform parameters, and the line crossing it three times.
CUBIC_NODES = [[0.0, 0.0], [1.0, 1.0], [2.0, -0.5], [4.0, 0.0]]
CUBIC_POWER = [[0.0, 0.0], [4.0, 11.25], [-4.5, -31.5], [4.5, 20.25]]
LINE_ORIGIN = [0.0, 1.0]
LINE_DIRECTION = [4.0, -2.0]

CUBIC_THETAS = [0.09861, 0.5, 0.9014]
CUBIC_XI = [0.08875, 0.3594, 0.8113]
CUBIC_POINTS = [[0.3550, 0.8225], [1.438, 0.2813], [3.245, -0.6225]]

# Moving-line pencil of the cubic and line at q_g = 3, four significant digits.
PRINTED_A = np.array([
    [0.08710, 0.08740, 0.04298, 0.05767, 0.01708],
    [-0.2222, -0.02814, 0.8999, -0.01814, 0.03355],
    [0.04655, -0.07068, -0.03786, 0.9989, 0.01874],
    [-0.03786, 0.1289, -0.01752, -0.001102, 1.010],
])
PRINTED_B = np.array([
    [1.046, 1.101, 1.499, 0.7322, 0.2201],
    [-3.351, -1.347, -0.1816, 0.04373, 0.1881],
    [2.390, -2.402, -0.1053, 0.2525, 0.3777],
    [-0.1302, 2.987, -0.3424, 0.1006, 0.3987],
])
FIRST_FOUR_XI = [0.05326, 0.08875, 0.3594, 0.8113]
LAST_FOUR_XI = [0.08875, 0.3594, 0.8112, 28.05]

# Fictitious eigenvalue of the first-four sub-pencil and what its eigenvector implies.
FICTITIOUS_XI = 0.05326
FICTITIOUS_THETA = 0.03932
FICTITIOUS_CURVE_POINT = [0.1506, 0.3949]
FICTITIOUS_LINE_POINT = [0.2130, 0.8935]


def isolated_settings(**overrides) -> Settings:
    """Settings isolated from the environment and without a log file."""
    values = {"log_file": ""}
    values.update(overrides)
    return Settings(_env_file=None, **values)


def cubic_curve() -> PowerCurve:
    return lagrange_to_power_curve(LagrangeCurve(CUBIC_NODES))


def cubic_line() -> QueryLine:
    return QueryLine(LINE_ORIGIN, LINE_DIRECTION)


def nodal_cubic() -> PowerCurve:
    """Self-intersecting cubic with its double point at the origin (theta 0.25 and 0.75)."""
    return PowerCurve([[3.0, -6.0], [-16.0, 44.0], [16.0, -96.0], [0.0, 64.0]])


def nodal_line() -> QueryLine:
    """Passes the double point at xi = 1 and the curve again at theta 0.575, xi 0.09."""
    return QueryLine([-1.0, -0.3], [1.0, 0.3])


def parabola() -> PowerCurve:
    return PowerCurve([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def bilinear_patch() -> PowerSurface:
    """The unit square in the plane z = 0, x = (theta1, theta2, 0)."""
    coeffs = np.zeros((2, 2, 3))
    coeffs[1, 0] = [1.0, 0.0, 0.0]
    coeffs[0, 1] = [0.0, 1.0, 0.0]
    return PowerSurface(coeffs)


def graph_surface() -> PowerSurface:
    """z = theta1**2 + theta2**2 - theta1 * theta2 over (theta1, theta2)."""
    coeffs = np.zeros((3, 3, 3))
    coeffs[1, 0] = [1.0, 0.0, 0.0]
    coeffs[0, 1] = [0.0, 1.0, 0.0]
    coeffs[2, 0, 2] = 1.0
    coeffs[0, 2, 2] = 1.0
    coeffs[1, 1, 2] = -1.0
    return PowerSurface(coeffs)


def random_curve(rng: np.random.Generator, degree: int, scale: float = 5.0) -> PowerCurve:
    return PowerCurve(rng.uniform(-scale, scale, size=(degree + 1, 2)))


def random_surface(rng: np.random.Generator, bidegree, scale: float = 1.0) -> PowerSurface:
    """Random perturbation of the unit square so that lines through it hit at moderate parameters."""
    coeffs = rng.uniform(-scale, scale, size=(bidegree[0] + 1, bidegree[1] + 1, 3)) * 0.3
    coeffs[1, 0] += [1.0, 0.0, 0.0]
    coeffs[0, 1] += [0.0, 1.0, 0.0]
    return PowerSurface(coeffs)


def random_line(rng: np.random.Generator, dim: int, scale: float = 5.0) -> QueryLine:
    return QueryLine(rng.uniform(-scale, scale, dim), rng.uniform(-scale, scale, dim))


def example_path(name: str) -> str:
    return os.path.join(EXAMPLES_DIR, name)
