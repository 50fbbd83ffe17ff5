"""Roots of the kernel w^s - u A(w) inside the unit disk.

For |u| < 1 the kernel has exactly s zeros in |z| < 1 (Rouche count), and
the reflected-walk transform factors over them:

    F(u, z) = (1 / (z^s - u A(z))) * prod_k (z - z_k(u)) / (1 - z_k(u)).

Roots are found globally via companion-matrix eigenvalues and polished by
Newton steps that are only accepted when they reduce the residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import IncrementDistribution, pgf_deriv_eval, pgf_eval

IN_DISK_TOL = 1e-12        # strict in-disk selection margin
RESIDUAL_TOL = 1e-10       # hard cap on accepted root residuals
POLISH_TARGET = 1e-12
CLUSTER_TOL = 1e-7


class KernelRootError(RuntimeError):
    """Root finding or selection failed; carries the full root list."""


@dataclass(frozen=True)
class RootSet:
    """The s in-disk kernel roots for one value of u."""

    u: complex
    roots: np.ndarray
    residuals: np.ndarray
    clusters: tuple
    max_modulus: float

    def __post_init__(self):
        r = np.asarray(self.roots, dtype=complex)
        r.setflags(write=False)
        object.__setattr__(self, "roots", r)
        res = np.asarray(self.residuals, dtype=float)
        res.setflags(write=False)
        object.__setattr__(self, "residuals", res)

    def __len__(self) -> int:
        return len(self.roots)


def kernel_coeffs(dist: IncrementDistribution, u: complex) -> np.ndarray:
    """Ascending coefficients of w^s - u A(w)."""
    s = dist.s
    deg = max(s, dist.j_max)
    c = np.zeros(deg + 1, dtype=complex)
    c[: dist.j_max + 1] = -u * dist.pmf_a
    c[s] += 1.0
    return c


def kernel_eval(dist: IncrementDistribution, u: complex, w):
    return w**dist.s - u * pgf_eval(dist, w)


def kernel_deriv_eval(dist: IncrementDistribution, u: complex, w):
    return dist.s * w ** (dist.s - 1) - u * pgf_deriv_eval(dist, w)


def _polish(dist, u, z):
    """Newton iterations, accepting only residual-decreasing steps."""
    res = abs(kernel_eval(dist, u, z))
    for _ in range(50):
        if res <= POLISH_TARGET:
            break
        fp = kernel_deriv_eval(dist, u, z)
        if fp == 0:
            break
        cand = z - kernel_eval(dist, u, z) / fp
        cand_res = abs(kernel_eval(dist, u, cand))
        if cand_res >= res:
            break
        z, res = cand, cand_res
    return z, res


def _cluster(roots: np.ndarray, tol: float = CLUSTER_TOL) -> tuple:
    """Partition root indices into groups closer than tol (transitively)."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


def find_kernel_roots(dist: IncrementDistribution, u: complex) -> RootSet:
    """All s kernel roots with |z| < 1, via companion-matrix eigenvalues."""
    if abs(u) >= 1:
        raise ValueError(f"|u| must be < 1, got {abs(u)!r}")
    coeffs = kernel_coeffs(dist, u)
    all_roots = np.roots(coeffs[::-1])
    polished = []
    for z in all_roots:
        z, res = _polish(dist, u, complex(z))
        polished.append((z, res))
    inside = [(z, res) for z, res in polished if abs(z) < 1.0 - IN_DISK_TOL]
    if len(inside) != dist.s:
        moduli = sorted(abs(z) for z, _ in polished)
        raise KernelRootError(
            f"expected {dist.s} in-disk roots, found {len(inside)} at u={u!r}; "
            f"all root moduli: {moduli}"
        )
    # deterministic ordering: by real part, then imaginary part
    inside.sort(key=lambda zr: (zr[0].real, zr[0].imag))
    roots = np.array([z for z, _ in inside], dtype=complex)
    residuals = np.array([res for _, res in inside])
    if np.any(residuals > RESIDUAL_TOL):
        raise KernelRootError(
            f"root residuals exceed {RESIDUAL_TOL}: {residuals.tolist()} at u={u!r}"
        )
    return RootSet(
        u=u,
        roots=roots,
        residuals=residuals,
        clusters=_cluster(roots),
        max_modulus=float(np.max(np.abs(roots))) if len(roots) else 0.0,
    )


def product_eval(dist: IncrementDistribution, u: complex, z, roots: RootSet):
    """F(u, z) from the root-product representation; z scalar or array."""
    z_arr = np.asarray(z, dtype=complex)
    dist_to_roots = np.abs(z_arr[..., None] - roots.roots)
    scale = np.maximum(np.abs(z_arr), 1.0)
    if np.any(dist_to_roots < 1e-12 * scale[..., None]):
        raise ValueError("z coincides with a kernel root (within 1e-12 relative)")
    denom = kernel_eval(dist, u, z_arr)
    num = np.prod(
        (z_arr[..., None] - roots.roots) / (1.0 - roots.roots), axis=-1
    )
    out = num / denom
    return out if np.ndim(z) else complex(out)


def root_logresidue_check(
    dist: IncrementDistribution,
    u: float,
    z: float,
    inner_radius: float,
    nodes: int,
):
    """Sum of principal-branch logs over the roots vs its contour integral.

    Left side: sum_k ln((z - z_k) / (1 - z_k)).  Right side: trapezoidal
    quadrature of (1/2 pi i) oint_{|w|=a} ln((z - w)/(1 - w)) k'(w)/k(w) dw.
    Returns (lhs, rhs) as real numbers for the caller to compare.
    """
    if not (0.0 < u < 1.0):
        raise ValueError("u must be real in (0, 1)")
    roots = find_kernel_roots(dist, u)
    a = inner_radius
    if not (roots.max_modulus < a < z < 1.0):
        raise ValueError(
            f"need max|z_k| = {roots.max_modulus} < a = {a} < z = {z} < 1"
        )
    lhs = complex(np.sum(np.log((z - roots.roots) / (1.0 - roots.roots))))
    w = a * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    kw = kernel_eval(dist, u, w)
    if np.min(np.abs(kw)) < 1e-12:
        raise ValueError("kernel modulus below 1e-12 on the contour |w| = a")
    integrand = np.log((z - w) / (1.0 - w)) * kernel_deriv_eval(dist, u, w) / kw
    rhs = complex(np.mean(integrand * w))
    return lhs.real, rhs.real
