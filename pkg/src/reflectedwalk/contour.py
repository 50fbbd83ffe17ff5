"""Circle-contour quadrature: Pollaczek integral and Cauchy coefficients.

All integrals run over circles with the trapezoidal rule on a uniform
angular grid, which converges geometrically for integrands analytic in an
annulus around the contour.  Node counts are doubled until two successive
estimates agree to tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import IncrementDistribution, pgf_eval, walk_pmf

OUTER_RADIUS_CAP = 8.0
MARGIN_SLACK = 1e-3


class QuadratureError(RuntimeError):
    """Quadrature failed to converge or a branch-safety check tripped."""


class RadiusSearchError(RuntimeError):
    """No admissible outer contour radius was found."""


@dataclass(frozen=True)
class CircleQuadrature:
    """Trapezoid-with-doubling settings for one circular contour."""

    radius: float = 1.0
    nodes: int = 256
    max_doublings: int = 12
    tol: float = 1e-12

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.nodes < 16 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes must be a power of two >= 16")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class RadiusCertificate:
    """Outer radius b > 1 with a certified bound on |v A(w) / w^s|."""

    b: float
    v: float
    margin: float

    def __post_init__(self):
        if not self.b > 1.0:
            raise ValueError("b must exceed 1")
        if not 0.0 < self.v < 1.0:
            raise ValueError("v must lie in (0, 1)")
        if not self.margin <= 1.0 - MARGIN_SLACK:
            raise ValueError(f"margin {self.margin!r} too close to 1")


def _circle(radius: float, nodes: int) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)


def choose_outer_radius(
    dist: IncrementDistribution, v: float, grid_points: int = 400
) -> RadiusCertificate:
    """Scan a geometric grid of radii b in (1, min(R, cap)) for the best margin.

    A has nonnegative coefficients, so max_{|w|=b} |A(w)| = A(b) and the
    ratio v A(b) / b^s is a rigorous bound on |u A(w) / w^s| for |u| <= v.
    """
    if not 0.0 < v < 1.0:
        raise ValueError("v must lie in (0, 1)")
    hi = min(dist.analyticity_radius_hint * (1.0 - 1e-6), OUTER_RADIUS_CAP)
    if hi <= 1.0:
        raise RadiusSearchError("no room above 1 below the analyticity radius")
    # keep the grid's lower end away from the pole of the integrand at w = 1
    lo = 1.0 + 0.05 * min(1.0, hi - 1.0)
    grid = np.geomspace(lo, hi, grid_points)
    ratios = v * pgf_eval(dist, grid).real / grid**dist.s
    best = int(np.argmin(ratios))
    if ratios[best] > 1.0 - MARGIN_SLACK:
        raise RadiusSearchError(
            f"no admissible radius for v = {v}; best ratio {ratios[best]!r} "
            f"at b = {grid[best]!r}"
        )
    return RadiusCertificate(b=float(grid[best]), v=v, margin=float(ratios[best]))


def _refine(evaluate, quad: CircleQuadrature):
    """Run evaluate(nodes) with node doubling until two estimates agree."""
    nodes = quad.nodes
    prev = evaluate(nodes)
    for _ in range(quad.max_doublings):
        nodes *= 2
        cur = evaluate(nodes)
        if np.max(np.abs(cur - prev)) < quad.tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"no convergence after {quad.max_doublings} doublings "
        f"(last two estimates {prev!r}, {cur!r})"
    )


def cauchy_coeff(f, n: int, r: float, quad: CircleQuadrature):
    """n-th series coefficient of f as (1/2 pi i) oint f(w) / w^{n+1} dw.

    f must accept a complex ndarray of contour nodes.  Exact up to roundoff
    for polynomials of degree < nodes.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if r <= 0:
        raise ValueError("r must be positive")

    def estimate(nodes):
        w = _circle(r, nodes)
        return complex(np.mean(np.asarray(f(w)) * w ** (-n)))

    return _refine(estimate, quad)


def pollaczek_eval(
    dist: IncrementDistribution,
    u: complex,
    z,
    cert: RadiusCertificate,
    quad: CircleQuadrature,
):
    """F(u, z) from the Pollaczek contour integral; z scalar or array.

    F = exp((1/2 pi i) oint_{|w|=b} (1-z)/((w-1)(w-z)) ln(1 - u A(w)/w^s) dw)
        / (1 - u).

    The prefactor is -d/dw ln((z-w)/(1-w)); the minus comes from moving the
    derivative off the logarithm by parts on the closed contour.  At z = 1
    the prefactor kills the integrand, so 1/(1-u) is returned directly
    rather than quadrature being attempted near the w = 1 pole.
    """
    if abs(u) > cert.v * (1.0 + 1e-12):
        raise ValueError(f"|u| = {abs(u)} exceeds the certificate cap v = {cert.v}")
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z_arr) > cert.b - 1e-6):
        raise ValueError(f"|z| must be <= b - 1e-6 with b = {cert.b}")
    at_one = z_arr == 1.0
    base = np.full(z_arr.shape, 1.0 / (1.0 - u), dtype=complex)
    if not np.all(at_one):
        zs = z_arr[~at_one]

        def estimate(nodes):
            w = _circle(cert.b, nodes)
            log_arg = 1.0 - u * pgf_eval(dist, w) / w**dist.s
            if np.any(log_arg.real <= 0.0):
                raise QuadratureError(
                    "principal branch unsafe: Re(1 - u A(w)/w^s) <= 0 on the contour"
                )
            lw = np.log(log_arg)
            frac = (1.0 - zs[:, None]) / ((w - 1.0) * (w - zs[:, None]))
            return np.mean(frac * lw * w, axis=1)

        exponent = _refine(estimate, quad)
        base[~at_one] = np.exp(exponent) / (1.0 - u)
    return base if np.ndim(z) else complex(base[0])


def verify_coeff_identity(
    dist: IncrementDistribution,
    l: int,
    k: int,
    cert: RadiusCertificate,
    quad: CircleQuadrature,
):
    """Cauchy extraction of [w^{k+sl}] A(w)^l against the exact pmf of S_l.

    Returns (integral, pmf) for the caller to compare.
    """
    if l < 1 or k < 1:
        raise ValueError("l and k must be >= 1")
    integral = cauchy_coeff(
        lambda w: pgf_eval(dist, w) ** l, k + dist.s * l, cert.b, quad
    )
    pmf = walk_pmf(dist, l).prob_at(k)
    return float(integral.real), pmf
