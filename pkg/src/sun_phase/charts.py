"""Differentiable coordinate charts on the SU(n) group manifold.

A chart maps real coordinates x to a special unitary matrix U(x).  From
the partial derivatives of the map we extract the left-invariant frame
(the coefficient forms of U^dag dU over a generator basis) and the
bi-invariant metric g_uv = (1/2) Tr(dU dU^dag), for which the frame acts
as a vielbein.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import GeneratorBasis, build_gellmann_basis, dagger, expm_generator
from .errors import (
    ChartDegenerateError,
    DegenerateMetricError,
    DomainError,
    InternalConsistencyError,
    ShapeError,
)
from .tolerances import ATOL_FRAME, ATOL_IDENTITY, CHART_MARGIN, FD_STEP


@dataclass(frozen=True)
class Chart:
    """A coordinate patch x -> U(x) with an attached generator basis.

    `algebra` stacks the generators used to expand U^dag dU; its order
    fixes the frame index.  `sample_box` is a conservative per-coordinate
    box inside the domain, used by sweep drivers; `contains` describes
    the true (possibly non-box) domain.
    """

    label: str
    n: int
    dim_m: int
    algebra: np.ndarray
    sample_box: np.ndarray
    map_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    contains_fn: Callable[[np.ndarray], bool] = field(repr=False)
    partials_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )
    fd_step: float = FD_STEP

    @property
    def has_analytic_partials(self) -> bool:
        return self.partials_fn is not None

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim_m,) and bool(self.contains_fn(x))

    def evaluate(self, x) -> np.ndarray:
        """U(x); raises DomainError outside the chart domain."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim_m,):
            raise ShapeError(
                f"chart '{self.label}' expects {self.dim_m} coordinates, got {x.shape}"
            )
        if not self.contains_fn(x):
            raise DomainError(f"coordinates outside domain of chart '{self.label}'")
        u = self.map_fn(x)
        if np.max(np.abs(dagger(u) @ u - np.eye(self.n))) >= ATOL_IDENTITY:
            raise InternalConsistencyError("chart produced a non-unitary matrix")
        if abs(np.linalg.det(u) - 1.0) >= ATOL_IDENTITY:
            raise InternalConsistencyError("chart produced det != 1")
        return u


@dataclass(frozen=True)
class FrameAtPoint:
    """Left-invariant frame coefficients omega[a, mu] and their inverse."""

    x: np.ndarray
    omega: np.ndarray
    dual: np.ndarray


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric g[mu, nu] (vielbein contraction) and its inverse."""

    g: np.ndarray
    g_inv: np.ndarray


def exp_chart(basis: GeneratorBasis) -> Chart:
    """Exponential chart U(x) = exp(i x^a g_a) on the ball |x| < pi/2.

    The conservative radius keeps the frame far from degeneracy for
    every n.  No closed-form derivative is attached; partials default to
    central differences.
    """
    m = basis.dim_algebra
    radius = np.pi / 2
    box_half = radius * (1.0 - CHART_MARGIN) / np.sqrt(m)
    stacked = basis.matrices

    def _map(x: np.ndarray) -> np.ndarray:
        return expm_generator(np.einsum("a,aij->ij", x, stacked))

    def _contains(x: np.ndarray) -> bool:
        return bool(np.linalg.norm(x) < radius)

    return Chart(
        label="exp",
        n=basis.n,
        dim_m=m,
        algebra=stacked,
        sample_box=np.array([[-box_half, box_half]] * m),
        map_fn=_map,
        contains_fn=_contains,
    )


def _unit_vector(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def su2_polar_chart() -> Chart:
    """Polar chart on SU(2): U = cos(chi) 1 + i sin(chi) sigma.nhat(theta, phi).

    Coordinates (chi, theta, phi) with chi, theta in (margin, pi - margin)
    and phi periodic.  The polar axes theta in {0, pi} (and chi in
    {0, pi}) are metric-degenerate and excluded.  Closed-form partial
    derivatives are attached.
    """
    basis = build_gellmann_basis(2)
    sigma = basis.matrices
    eye = np.eye(2, dtype=complex)
    margin = CHART_MARGIN

    def _map(x: np.ndarray) -> np.ndarray:
        chi, theta, phi = x
        return np.cos(chi) * eye + 1j * np.sin(chi) * np.einsum(
            "j,jab->ab", _unit_vector(theta, phi), sigma
        )

    def _partials(x: np.ndarray) -> np.ndarray:
        chi, theta, phi = x
        nhat = _unit_vector(theta, phi)
        dn_dtheta = np.array(
            [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)]
        )
        dn_dphi = np.array(
            [-np.sin(theta) * np.sin(phi), np.sin(theta) * np.cos(phi), 0.0]
        )
        d_chi = -np.sin(chi) * eye + 1j * np.cos(chi) * np.einsum("j,jab->ab", nhat, sigma)
        d_theta = 1j * np.sin(chi) * np.einsum("j,jab->ab", dn_dtheta, sigma)
        d_phi = 1j * np.sin(chi) * np.einsum("j,jab->ab", dn_dphi, sigma)
        return np.array([d_chi, d_theta, d_phi])

    def _contains(x: np.ndarray) -> bool:
        chi, theta, _ = x
        return bool(
            margin < chi < np.pi - margin and margin < theta < np.pi - margin
        )

    return Chart(
        label="su2-polar",
        n=2,
        dim_m=3,
        algebra=sigma,
        sample_box=np.array(
            [[margin, np.pi - margin], [margin, np.pi - margin], [0.0, 2 * np.pi]]
        ),
        map_fn=_map,
        contains_fn=_contains,
        partials_fn=_partials,
    )


def left_translate(chart: Chart, v: np.ndarray) -> Chart:
    """Chart x -> v U(x) for fixed v in SU(n).

    The frame and metric are built from U^dag dU, so they are unchanged;
    this exists to verify that invariance.
    """
    if np.max(np.abs(dagger(v) @ v - np.eye(chart.n))) >= ATOL_IDENTITY:
        raise DomainError("left-translation element is not unitary")
    if abs(np.linalg.det(v) - 1.0) >= ATOL_IDENTITY:
        raise DomainError("left-translation element has det != 1")

    old_map, old_partials = chart.map_fn, chart.partials_fn
    new_partials = None
    if old_partials is not None:
        new_partials = lambda x: np.einsum("ij,mjk->mik", v, old_partials(x))
    return Chart(
        label=chart.label + "+left",
        n=chart.n,
        dim_m=chart.dim_m,
        algebra=chart.algebra,
        sample_box=chart.sample_box,
        map_fn=lambda x: v @ old_map(x),
        contains_fn=chart.contains_fn,
        partials_fn=new_partials,
        fd_step=chart.fd_step,
    )


def partials(
    chart: Chart,
    x,
    backend: str = "auto",
    richardson: bool = False,
) -> np.ndarray:
    """Partial derivatives dU/dx_mu, stacked with shape (dim_m, n, n).

    backend "auto" uses the chart's closed form when available and
    central differences otherwise; "analytic" and "fd" force one side
    for cross-checks.  `richardson` applies one extrapolation step to
    the finite-difference stencil.
    """
    x = np.asarray(x, dtype=float)
    if backend not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown backend '{backend}'")
    if backend == "analytic" or (backend == "auto" and chart.has_analytic_partials):
        if not chart.has_analytic_partials:
            raise DomainError(f"chart '{chart.label}' has no analytic derivative")
        if not chart.contains(x):
            raise DomainError(f"coordinates outside domain of chart '{chart.label}'")
        return chart.partials_fn(x)

    def stencil(h: float) -> np.ndarray:
        out = np.empty((chart.dim_m, chart.n, chart.n), dtype=complex)
        for mu in range(chart.dim_m):
            xp = x.copy()
            xm = x.copy()
            xp[mu] += h
            xm[mu] -= h
            out[mu] = (chart.evaluate(xp) - chart.evaluate(xm)) / (2 * h)
        return out

    h = chart.fd_step
    if richardson:
        return (4.0 * stencil(h / 2) - stencil(h)) / 3.0
    return stencil(h)


def left_invariant_frame(chart: Chart, x, du: np.ndarray | None = None) -> FrameAtPoint:
    """Extract omega[a, mu] from U^dag dU = i omega^a g_a and invert it.

    Verifies that U^dag dU is anti-Hermitian and traceless, that the
    extracted coefficients are real, and that they reconstruct U^dag dU
    over the chart's generator basis.  A singular omega raises
    ChartDegenerateError.
    """
    x = np.asarray(x, dtype=float)
    u = chart.evaluate(x)
    if du is None:
        du = partials(chart, x)
    pulled = np.einsum("ij,mjk->mik", dagger(u), du)  # U^dag dU per coordinate

    anti_herm = np.max(np.abs(pulled + np.transpose(pulled.conj(), (0, 2, 1))))
    traces = np.max(np.abs(np.trace(pulled, axis1=1, axis2=2)))
    if anti_herm >= ATOL_FRAME or traces >= ATOL_FRAME:
        raise InternalConsistencyError(
            f"U^dag dU not in the algebra (anti-Hermitian residue {anti_herm:.2e}, "
            f"trace residue {traces:.2e})"
        )

    omega_c = np.einsum("aij,mji->am", chart.algebra, pulled) / 2j
    imag_residue = np.max(np.abs(omega_c.imag))
    if imag_residue >= ATOL_FRAME:
        raise InternalConsistencyError(
            f"frame coefficients not real (residue {imag_residue:.2e})"
        )
    omega = omega_c.real

    rebuilt = 1j * np.einsum("am,aij->mij", omega, chart.algebra)
    if np.max(np.abs(pulled - rebuilt)) >= ATOL_FRAME:
        raise InternalConsistencyError("frame does not reconstruct U^dag dU")

    if abs(np.linalg.det(omega)) < 1e-10:
        raise ChartDegenerateError(f"frame singular at x = {x}")
    dual = np.linalg.inv(omega)
    if np.max(np.abs(omega @ dual - np.eye(chart.dim_m))) >= ATOL_FRAME:
        raise InternalConsistencyError("frame inversion failed")
    return FrameAtPoint(x=x, omega=omega, dual=dual)


def ck_metric(
    chart: Chart,
    x,
    frame: FrameAtPoint | None = None,
    du: np.ndarray | None = None,
) -> MetricAtPoint:
    """Bi-invariant metric at x, as the frame contraction omega^T omega.

    Cross-checked entrywise against the defining trace form
    (1/2) Tr(dU_mu dU_nu^dag); disagreement beyond tolerance indicates a
    broken frame.  Raises DegenerateMetricError when not positive
    definite.
    """
    x = np.asarray(x, dtype=float)
    if du is None:
        du = partials(chart, x)
    if frame is None:
        frame = left_invariant_frame(chart, x, du=du)

    g = frame.omega.T @ frame.omega
    g_trace = 0.5 * np.einsum("mij,kij->mk", du, du.conj()).real
    if np.max(np.abs(g - g_trace)) >= ATOL_FRAME:
        raise InternalConsistencyError(
            "vielbein metric disagrees with the trace form"
        )

    eigenvalues = np.linalg.eigvalsh(g)
    if eigenvalues[0] <= 0.0:
        raise DegenerateMetricError(f"metric not positive definite at x = {x}")
    g_inv = np.linalg.inv(g)
    if np.max(np.abs(g @ g_inv - np.eye(chart.dim_m))) >= ATOL_FRAME:
        raise DegenerateMetricError(f"metric inversion ill-conditioned at x = {x}")
    return MetricAtPoint(g=g, g_inv=g_inv)
