"""Nelder-Mead simplex minimisation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    n_evals: int
    n_iter: int
    converged: bool
    diameter: float


def _diameter(simplex: np.ndarray) -> float:
    diffs = simplex[:, None, :] - simplex[None, :, :]
    return float(np.sqrt(np.max(np.sum(diffs**2, axis=-1))))


def nelder_mead(
    func: Callable[[np.ndarray], float],
    x0,
    step: float = 0.1,
    xtol: float = 1e-8,
    max_evals: int = 5000,
    alpha: float = 1.0,
    gamma: float = 2.0,
    rho: float = 0.5,
    sigma: float = 0.5,
) -> SimplexResult:
    """Minimise ``func`` from ``x0``.

    Stops when the simplex diameter drops below ``xtol`` or after
    ``max_evals`` function evaluations, whichever comes first.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    dim = x0.size
    evals = 0

    def f(x):
        nonlocal evals
        evals += 1
        val = float(func(x))
        return val if np.isfinite(val) else np.inf

    simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[i] for i in range(dim)])
    fvals = np.array([f(v) for v in simplex])
    n_iter = 0

    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        diam = _diameter(simplex)
        if diam < xtol:
            return SimplexResult(simplex[0].copy(), float(fvals[0]), evals, n_iter, True, diam)
        if evals >= max_evals:
            return SimplexResult(simplex[0].copy(), float(fvals[0]), evals, n_iter, False, diam)
        n_iter += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = f(xr)
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue

        if fr < fvals[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = f(xc)
            accept = fc <= fr
        else:
            xc = centroid + rho * (worst - centroid)
            fc = f(xc)
            accept = fc < fvals[-1]
        if accept:
            simplex[-1], fvals[-1] = xc, fc
            continue

        best = simplex[0]
        for i in range(1, dim + 1):
            simplex[i] = best + sigma * (simplex[i] - best)
            fvals[i] = f(simplex[i])
