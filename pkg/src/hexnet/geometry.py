"""AP-to-UE distance law for a uniform deployment on a disk, plus samplers.

The APs live on a ceiling disk of radius ``r_d`` at height ``h_A``; the UE
sits at horizontal offset ``v_0`` from the disk center at height ``h_U``.
Every 3-D AP-UE distance therefore falls in ``[z_l, z_p]`` with
``z_l = h_A - h_U``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .params import NetworkConfig, derived_constants
from .propagation import kappa_los

#: allowed floating-point spill of the arccos argument beyond [-1, 1]
ARCCOS_SPILL_TOL = 1e-9


@dataclass(frozen=True)
class DistanceSupport:
    """Endpoints of the AP-UE distance law: z_l <= z_m <= z_p."""

    z_l: float
    z_m: float
    z_p: float

    @classmethod
    def from_scenario(cls, r_d: float, v_0: float, delta_h: float) -> "DistanceSupport":
        return cls(
            z_l=delta_h,
            z_m=math.hypot(r_d - v_0, delta_h),
            z_p=math.hypot(r_d + v_0, delta_h),
        )


def support(cfg: NetworkConfig) -> DistanceSupport:
    g = cfg.geometry
    return DistanceSupport.from_scenario(g.r_d, g.v_0, g.h_A - g.h_U)


def distance_pdf(z, sup: DistanceSupport, v_0: float, r_d: float):
    """Density of the distance from the UE to one uniformly placed AP.

    Piecewise: ``2 z / r_d^2`` on ``[z_l, z_m]``; on ``[z_m, z_p]`` the disk
    boundary cuts the horizontal circle of radius ``sqrt(z^2 - z_l^2)`` and the
    density picks up the subtended-angle factor ``arccos(.) / pi``.  Zero
    outside the support.  Accepts scalars or arrays.
    """
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    out = np.zeros_like(z_arr)

    if v_0 == 0.0:
        inner = (z_arr >= sup.z_l) & (z_arr <= sup.z_p)
    else:
        inner = (z_arr >= sup.z_l) & (z_arr < sup.z_m)
    out[inner] = 2.0 * z_arr[inner] / r_d**2

    if v_0 > 0.0 and sup.z_p >= sup.z_m:
        # the boundary point z_m belongs to this branch: the arccos argument
        # clamps to -1 there, reproducing the inner-branch value exactly
        edge = (z_arr >= sup.z_m) & (z_arr <= sup.z_p)
        if np.any(edge):
            ze = z_arr[edge]
            horiz = np.sqrt(np.maximum(ze**2 - sup.z_l**2, 0.0))
            num = ze**2 + v_0**2 - r_d**2 - sup.z_l**2
            arg = num / np.maximum(2.0 * v_0 * horiz, np.finfo(float).tiny)
            if np.any(np.abs(arg) > 1.0 + ARCCOS_SPILL_TOL):
                bad = arg[np.abs(arg) > 1.0 + ARCCOS_SPILL_TOL]
                raise DomainError(
                    f"arccos argument {bad[0]!r} outside [-1, 1] beyond tolerance"
                )
            arg = np.clip(arg, -1.0, 1.0)
            out[edge] = 2.0 * ze / (math.pi * r_d**2) * np.arccos(arg)

    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ApPoint:
    """One AP of a sampled deployment, in UE-plane-projected coordinates."""

    x: float
    y: float
    kind: str             # "RF" or "THZ"
    link: Optional[str]   # "LOS" / "NLOS" for THZ, None for RF


def distance_to_ue(p: ApPoint, cfg: NetworkConfig) -> float:
    """3-D distance from an AP to the UE at (v_0, 0, h_U)."""
    g = cfg.geometry
    return math.sqrt((p.x - g.v_0) ** 2 + p.y**2 + (g.h_A - g.h_U) ** 2)


def sample_deployment_arrays(cfg: NetworkConfig, rng: np.random.Generator,
                             n_trials: int):
    """Vectorized deployment sampler for ``n_trials`` independent networks.

    Returns ``(x, y, dist, is_thz, is_los)``, each of shape
    ``(n_trials, N_A)``.  ``is_los`` is meaningful only where ``is_thz``.

    Draw order is fixed (radii, angles, THz subset, LOS marks) so that a seeded
    stream fully determines the result.  The THz subset is chosen by a partial
    Fisher-Yates shuffle of the AP indices.
    """
    g = cfg.geometry
    n_a, n_thz = g.N_A, g.n_thz
    der = derived_constants(cfg)

    radii = g.r_d * np.sqrt(rng.random((n_trials, n_a)))
    angles = 2.0 * math.pi * rng.random((n_trials, n_a))
    x = radii * np.cos(angles)
    y = radii * np.sin(angles)

    idx = np.broadcast_to(np.arange(n_a), (n_trials, n_a)).copy()
    rows = np.arange(n_trials)
    for j in range(n_thz):
        k = j + (rng.random(n_trials) * (n_a - j)).astype(np.int64)
        tmp = idx[rows, j].copy()
        idx[rows, j] = idx[rows, k]
        idx[rows, k] = tmp
    is_thz = np.zeros((n_trials, n_a), dtype=bool)
    if n_thz:
        is_thz[rows[:, None], idx[:, :n_thz]] = True

    dist = np.sqrt((x - g.v_0) ** 2 + y**2 + der.delta_h**2)
    is_los = rng.random((n_trials, n_a)) < kappa_los(dist, der.beta, der.delta_h)
    return x, y, dist, is_thz, is_los


def sample_deployment(cfg: NetworkConfig, rng: np.random.Generator) -> list[ApPoint]:
    """Sample one deployment: N_A points, exactly n_thz marked THZ."""
    x, y, _, is_thz, is_los = sample_deployment_arrays(cfg, rng, 1)
    points = []
    for i in range(cfg.geometry.N_A):
        if is_thz[0, i]:
            points.append(ApPoint(x[0, i], y[0, i], "THZ",
                                  "LOS" if is_los[0, i] else "NLOS"))
        else:
            points.append(ApPoint(x[0, i], y[0, i], "RF", None))
    return points
