"""Native test problems with analytic gradients.

Twenty unconstrained problems in the extended / diagonal / generalized
families of the classic collections (Andrei's test-function list and the
CUTE set).  Each constructor documents its formula and the conventional
start point so the hand-written gradients can be audited against the
definition; all objectives are vectorized numpy.

Problems are grouped by block size: "extended" functions act on
independent pairs (or quadruples, for the Powell singular function) of
variables, so their dimension must be a multiple of the block size.
"""

from __future__ import annotations

import numpy as np

from .problems import Problem


def _sphere(n):
    """f(x) = 0.5 * ||x||^2, x0 = (1, ..., 1)."""

    def f(x):
        return 0.5 * float(x @ x)

    def g(x):
        return x.copy()

    return Problem("sphere", n, f, g, np.ones(n))


def _perturbed_quadratic(n):
    """f(x) = sum_i i*x_i^2 + (sum_i x_i)^2 / 100, x0 = (0.5, ..., 0.5)."""
    idx = np.arange(1, n + 1, dtype=float)

    def f(x):
        s = x.sum()
        return float(idx @ (x * x) + s * s / 100.0)

    def g(x):
        return 2.0 * idx * x + x.sum() / 50.0

    return Problem("perturbed_quadratic", n, f, g, np.full(n, 0.5))


def _ext_rosenbrock(n):
    """f(x) = sum over pairs (u, v) of 100*(v - u^2)^2 + (1 - u)^2,
    x0 = (-1.2, 1, -1.2, 1, ...)."""

    def f(x):
        u, v = x[0::2], x[1::2]
        t = v - u * u
        w = 1.0 - u
        return float(100.0 * (t @ t) + w @ w)

    def g(x):
        u, v = x[0::2], x[1::2]
        t = v - u * u
        out = np.empty_like(x)
        out[0::2] = -400.0 * u * t - 2.0 * (1.0 - u)
        out[1::2] = 200.0 * t
        return out

    x0 = np.empty(n)
    x0[0::2] = -1.2
    x0[1::2] = 1.0
    return Problem("ext_rosenbrock", n, f, g, x0)


def _gen_rosenbrock(n):
    """f(x) = sum_{i<n} 100*(x_{i+1} - x_i^2)^2 + (1 - x_i)^2 (chained),
    x0 = (-1.2, 1, -1.2, 1, ...)."""

    def f(x):
        t = x[1:] - x[:-1] ** 2
        w = 1.0 - x[:-1]
        return float(100.0 * (t @ t) + w @ w)

    def g(x):
        t = x[1:] - x[:-1] ** 2
        out = np.zeros_like(x)
        out[:-1] = -400.0 * x[:-1] * t - 2.0 * (1.0 - x[:-1])
        out[1:] += 200.0 * t
        return out

    x0 = np.empty(n)
    x0[0::2] = -1.2
    x0[1::2] = 1.0
    return Problem("gen_rosenbrock", n, f, g, x0)


def _ext_white_holst(n):
    """f(x) = sum over pairs (u, v) of 100*(v - u^3)^2 + (1 - u)^2,
    x0 = (-1.2, 1, -1.2, 1, ...)."""

    def f(x):
        u, v = x[0::2], x[1::2]
        t = v - u ** 3
        w = 1.0 - u
        return float(100.0 * (t @ t) + w @ w)

    def g(x):
        u, v = x[0::2], x[1::2]
        t = v - u ** 3
        out = np.empty_like(x)
        out[0::2] = -600.0 * u * u * t - 2.0 * (1.0 - u)
        out[1::2] = 200.0 * t
        return out

    x0 = np.empty(n)
    x0[0::2] = -1.2
    x0[1::2] = 1.0
    return Problem("ext_white_holst", n, f, g, x0)


def _ext_himmelblau(n):
    """f(x) = sum over pairs (u, v) of (u^2 + v - 11)^2 + (u + v^2 - 7)^2,
    x0 = (1, ..., 1)."""

    def f(x):
        u, v = x[0::2], x[1::2]
        p = u * u + v - 11.0
        q = u + v * v - 7.0
        return float(p @ p + q @ q)

    def g(x):
        u, v = x[0::2], x[1::2]
        p = u * u + v - 11.0
        q = u + v * v - 7.0
        out = np.empty_like(x)
        out[0::2] = 4.0 * u * p + 2.0 * q
        out[1::2] = 2.0 * p + 4.0 * v * q
        return out

    return Problem("ext_himmelblau", n, f, g, np.ones(n))


def _ext_beale(n):
    """f(x) = sum over pairs (u, v) of (1.5 - u*(1 - v))^2
    + (2.25 - u*(1 - v^2))^2 + (2.625 - u*(1 - v^3))^2, x0 = (1, 0.8, ...)."""

    def f(x):
        u, v = x[0::2], x[1::2]
        a = 1.5 - u * (1.0 - v)
        b = 2.25 - u * (1.0 - v * v)
        c = 2.625 - u * (1.0 - v ** 3)
        return float(a @ a + b @ b + c @ c)

    def g(x):
        u, v = x[0::2], x[1::2]
        a = 1.5 - u * (1.0 - v)
        b = 2.25 - u * (1.0 - v * v)
        c = 2.625 - u * (1.0 - v ** 3)
        out = np.empty_like(x)
        out[0::2] = -2.0 * (a * (1.0 - v) + b * (1.0 - v * v) + c * (1.0 - v ** 3))
        out[1::2] = 2.0 * u * (a + 2.0 * b * v + 3.0 * c * v * v)
        return out

    x0 = np.empty(n)
    x0[0::2] = 1.0
    x0[1::2] = 0.8
    return Problem("ext_beale", n, f, g, x0)


def _ext_tridiagonal1(n):
    """f(x) = sum over pairs (u, v) of (u + v - 3)^2 + (u - v + 1)^4,
    x0 = (2, ..., 2)."""

    def f(x):
        u, v = x[0::2], x[1::2]
        p = u + v - 3.0
        q = u - v + 1.0
        return float(p @ p + (q ** 4).sum())

    def g(x):
        u, v = x[0::2], x[1::2]
        p = u + v - 3.0
        q3 = (u - v + 1.0) ** 3
        out = np.empty_like(x)
        out[0::2] = 2.0 * p + 4.0 * q3
        out[1::2] = 2.0 * p - 4.0 * q3
        return out

    return Problem("ext_tridiagonal1", n, f, g, np.full(n, 2.0))


def _raydan1(n):
    """f(x) = sum_i (i/10) * (exp(x_i) - x_i), x0 = (1, ..., 1)."""
    w = np.arange(1, n + 1, dtype=float) / 10.0

    def f(x):
        return float(w @ (np.exp(x) - x))

    def g(x):
        return w * (np.exp(x) - 1.0)

    return Problem("raydan1", n, f, g, np.ones(n))


def _raydan2(n):
    """f(x) = sum_i (exp(x_i) - x_i), x0 = (1, ..., 1)."""

    def f(x):
        return float(np.sum(np.exp(x) - x))

    def g(x):
        return np.exp(x) - 1.0

    return Problem("raydan2", n, f, g, np.ones(n))


def _diagonal1(n):
    """f(x) = sum_i (exp(x_i) - i*x_i), x0 = (1/n, ..., 1/n)."""
    idx = np.arange(1, n + 1, dtype=float)

    def f(x):
        return float(np.sum(np.exp(x)) - idx @ x)

    def g(x):
        return np.exp(x) - idx

    return Problem("diagonal1", n, f, g, np.full(n, 1.0 / n))


def _diagonal2(n):
    """f(x) = sum_i (exp(x_i) - x_i/i), x0_i = 1/i."""
    inv = 1.0 / np.arange(1, n + 1, dtype=float)

    def f(x):
        return float(np.sum(np.exp(x)) - inv @ x)

    def g(x):
        return np.exp(x) - inv

    return Problem("diagonal2", n, f, g, inv.copy())


def _diagonal3(n):
    """f(x) = sum_i (exp(x_i) - i*sin(x_i)), x0 = (1, ..., 1)."""
    idx = np.arange(1, n + 1, dtype=float)

    def f(x):
        return float(np.sum(np.exp(x) - idx * np.sin(x)))

    def g(x):
        return np.exp(x) - idx * np.cos(x)

    return Problem("diagonal3", n, f, g, np.ones(n))


def _ext_powell(n):
    """f(x) = sum over quadruples (a, b, c, d) of (a + 10b)^2 + 5*(c - d)^2
    + (b - 2c)^4 + 10*(a - d)^4, x0 = (3, -1, 0, 1, ...)."""

    def f(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        p = a + 10.0 * b
        q = c - d
        r = b - 2.0 * c
        s = a - d
        return float(p @ p + 5.0 * (q @ q) + (r ** 4).sum() + 10.0 * (s ** 4).sum())

    def g(x):
        a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
        p = a + 10.0 * b
        q = c - d
        r3 = (b - 2.0 * c) ** 3
        s3 = (a - d) ** 3
        out = np.empty_like(x)
        out[0::4] = 2.0 * p + 40.0 * s3
        out[1::4] = 20.0 * p + 4.0 * r3
        out[2::4] = 10.0 * q - 8.0 * r3
        out[3::4] = -10.0 * q - 40.0 * s3
        return out

    x0 = np.empty(n)
    x0[0::4] = 3.0
    x0[1::4] = -1.0
    x0[2::4] = 0.0
    x0[3::4] = 1.0
    return Problem("ext_powell", n, f, g, x0)


def _quad_qf1(n):
    """f(x) = 0.5 * sum_i i*x_i^2 - x_n, x0 = (1, ..., 1)."""
    idx = np.arange(1, n + 1, dtype=float)

    def f(x):
        return float(0.5 * (idx @ (x * x)) - x[-1])

    def g(x):
        out = idx * x
        out[-1] -= 1.0
        return out

    return Problem("quad_qf1", n, f, g, np.ones(n))


def _quad_qf2(n):
    """f(x) = 0.5 * sum_i i*(x_i^2 - 1)^2 - x_n, x0 = (0.5, ..., 0.5)."""
    idx = np.arange(1, n + 1, dtype=float)

    def f(x):
        t = x * x - 1.0
        return float(0.5 * (idx @ (t * t)) - x[-1])

    def g(x):
        out = 2.0 * idx * x * (x * x - 1.0)
        out[-1] -= 1.0
        return out

    return Problem("quad_qf2", n, f, g, np.full(n, 0.5))


def _ext_qp1(n):
    """f(x) = sum_{i<n} (x_i^2 - 2)^2 + (sum_i x_i^2 - 0.5)^2, x0 = (1, ..., 1)."""

    def f(x):
        t = x[:-1] ** 2 - 2.0
        p = float(x @ x) - 0.5
        return float(t @ t + p * p)

    def g(x):
        p = float(x @ x) - 0.5
        out = 4.0 * p * x
        out[:-1] += 4.0 * x[:-1] * (x[:-1] ** 2 - 2.0)
        return out

    return Problem("ext_qp1", n, f, g, np.ones(n))


def _broyden_tridiagonal(n):
    """f(x) = sum_i r_i^2 with r_i = (3 - 2*x_i)*x_i - x_{i-1} - 2*x_{i+1} + 1
    (x_0 = x_{n+1} = 0), x0 = (-1, ..., -1)."""

    def residual(x):
        r = (3.0 - 2.0 * x) * x + 1.0
        r[1:] -= x[:-1]
        r[:-1] -= 2.0 * x[1:]
        return r

    def f(x):
        r = residual(x)
        return float(r @ r)

    def g(x):
        r = residual(x)
        out = 2.0 * r * (3.0 - 4.0 * x)
        out[:-1] -= 2.0 * r[1:]
        out[1:] -= 4.0 * r[:-1]
        return out

    return Problem("broyden_tridiagonal", n, f, g, np.full(n, -1.0))


def _nondia(n):
    """f(x) = (x_1 - 1)^2 + sum_{i=2..n} 100*(x_1 - x_{i-1}^2)^2,
    x0 = (-1, ..., -1).  The Shanno nondiagonal Rosenbrock variant; by this
    definition the last variable does not enter the objective."""

    def f(x):
        t = x[0] - x[:-1] ** 2
        return float((x[0] - 1.0) ** 2 + 100.0 * (t @ t))

    def g(x):
        t = x[0] - x[:-1] ** 2
        out = np.zeros_like(x)
        out[:-1] = -400.0 * x[:-1] * t
        out[0] += 2.0 * (x[0] - 1.0) + 200.0 * t.sum()
        return out

    return Problem("nondia", n, f, g, np.full(n, -1.0))


def _eg2(n):
    """f(x) = sum_{i<n} sin(x_1 + x_i^2 - 1) + 0.5*sin(x_n^2), x0 = (1, ..., 1)."""

    def f(x):
        return float(np.sum(np.sin(x[0] + x[:-1] ** 2 - 1.0)) + 0.5 * np.sin(x[-1] ** 2))

    def g(x):
        c = np.cos(x[0] + x[:-1] ** 2 - 1.0)
        out = np.zeros_like(x)
        out[:-1] += 2.0 * x[:-1] * c
        out[0] += c.sum()
        out[-1] += x[-1] * np.cos(x[-1] ** 2)
        return out

    return Problem("eg2", n, f, g, np.ones(n))


# name -> (block size, constructor)
CATALOG = {
    "sphere": (1, _sphere),
    "perturbed_quadratic": (1, _perturbed_quadratic),
    "ext_rosenbrock": (2, _ext_rosenbrock),
    "gen_rosenbrock": (1, _gen_rosenbrock),
    "ext_white_holst": (2, _ext_white_holst),
    "ext_himmelblau": (2, _ext_himmelblau),
    "ext_beale": (2, _ext_beale),
    "ext_tridiagonal1": (2, _ext_tridiagonal1),
    "raydan1": (1, _raydan1),
    "raydan2": (1, _raydan2),
    "diagonal1": (1, _diagonal1),
    "diagonal2": (1, _diagonal2),
    "diagonal3": (1, _diagonal3),
    "ext_powell": (4, _ext_powell),
    "quad_qf1": (1, _quad_qf1),
    "quad_qf2": (1, _quad_qf2),
    "ext_qp1": (1, _ext_qp1),
    "broyden_tridiagonal": (1, _broyden_tridiagonal),
    "nondia": (1, _nondia),
    "eg2": (1, _eg2),
}


def problem_names():
    """Catalog names in definition order."""
    return list(CATALOG)


def block_size(name):
    """Dimension granularity of a catalog family."""
    if name not in CATALOG:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(CATALOG)}")
    return CATALOG[name][0]


def make_problem(name, n):
    """Build a catalog problem at dimension n.

    Raises ValueError for unknown names or a dimension that is not a
    positive multiple of the family's block size.
    """
    if name not in CATALOG:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(CATALOG)}")
    block, builder = CATALOG[name]
    if n < 1 or n % block != 0:
        raise ValueError(f"{name}: dimension must be a positive multiple of {block}, got {n}")
    return builder(int(n))
