"""Nonmetric multidimensional scaling by monotone-disparity majorization.

Embeds a dissimilarity matrix into k dimensions so that embedded distances
preserve, as well as possible, only the rank order of the dissimilarities.
Each iteration fits monotone disparities to the current distances (pool
adjacent violators) and then moves the configuration by a majorization step,
with a step-halving safeguard so the stress-1 value never increases. The
best of several restarts wins; higher-k runs are warm-started from lower-k
winners so stress is non-increasing in k by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grouping import DissimilarityMatrix

DEFAULT_RESTARTS = 20
DEFAULT_MAX_ITER = 500
DEFAULT_TOL = 1e-7
STRESS_CUTOFF = 0.15


@dataclass(frozen=True)
class MdsSolution:
    """An embedding plus the diagnostics needed to trust it."""

    coordinates: np.ndarray
    stress: float
    k: int
    iterations: int
    restarts_used: int
    degenerate: bool = False
    stress_history: tuple = ()

    def __post_init__(self):
        self.coordinates.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.coordinates)


@dataclass(frozen=True)
class ScreeCurve:
    """Best stress per dimension count, with the acceptability cutoff."""

    points: tuple  # of (k, stress)
    cutoff: float = STRESS_CUTOFF

    def stresses(self) -> list:
        return [s for _, s in self.points]

    def acceptable(self) -> dict:
        """k -> True where stress meets the cutoff."""
        return {k: s <= self.cutoff for k, s in self.points}


def stress1(distances, disparities) -> float:
    """Kruskal stress-1: sqrt(sum (d - dhat)^2 / sum d^2)."""
    d = np.asarray(distances, dtype=float)
    dhat = np.asarray(disparities, dtype=float)
    if d.shape != dhat.shape:
        raise ValueError("distances and disparities must have equal length")
    denom = np.sum(d**2)
    if denom <= 0:
        raise ValueError("all-zero distances have undefined stress")
    return float(np.sqrt(np.sum((d - dhat) ** 2) / denom))


def _pava(y: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit (pool adjacent violators), weights 1."""
    n = len(y)
    means = list(y.astype(float))
    counts = [1] * n
    i = 0
    while i < len(means) - 1:
        if means[i] > means[i + 1] + 1e-15:
            total = means[i] * counts[i] + means[i + 1] * counts[i + 1]
            counts[i] += counts[i + 1]
            means[i] = total / counts[i]
            del means[i + 1], counts[i + 1]
            if i > 0:
                i -= 1  # merged block may now violate to the left
        else:
            i += 1
    return np.repeat(means, counts)


def isotonic_fit(dissimilarities, distances) -> np.ndarray:
    """Monotone disparities for the given dissimilarity order.

    Pairs are processed in increasing dissimilarity; tied dissimilarities
    are ordered by current distance (the primary tie approach: tied pairs
    may take any order among themselves, so the fit constrains them as
    little as possible). Returns disparities in the input pair order.
    """
    delta = np.asarray(dissimilarities, dtype=float)
    d = np.asarray(distances, dtype=float)
    if delta.shape != d.shape:
        raise ValueError("dissimilarities and distances must have equal length")
    order = np.lexsort((d, delta))
    fitted = _pava(d[order])
    out = np.empty_like(fitted)
    out[order] = fitted
    return out


def _pair_indices(n: int):
    return np.triu_indices(n, k=1)


def _pair_distances(coords: np.ndarray, rows, cols) -> np.ndarray:
    diff = coords[rows] - coords[cols]
    return np.sqrt(np.sum(diff**2, axis=1))


def _guttman_step(coords, rows, cols, distances, disparities) -> np.ndarray:
    """Majorization update X <- B(X) X / n with unit weights."""
    n = len(coords)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(distances > 0, disparities / distances, 0.0)
    b = np.zeros((n, n))
    b[rows, cols] = -ratio
    b[cols, rows] = -ratio
    np.fill_diagonal(b, -b.sum(axis=1))
    return b @ coords / n


def _run(delta, coords, rows, cols, max_iter, tol):
    """One restart: returns (coords, stress, iterations, history)."""
    coords = coords - coords.mean(axis=0)
    distances = _pair_distances(coords, rows, cols)
    if not np.any(distances > 0):
        # all points coincide; nudge impossible without a seed, so report as is
        return coords, 1.0, 0, (1.0,)
    disparities = isotonic_fit(delta, distances)
    stress = stress1(distances, disparities)
    history = [stress]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        proposal = _guttman_step(coords, rows, cols, distances, disparities)
        # step-halving safeguard: stress-1 must not increase
        accepted = None
        for _ in range(30):
            d_new = _pair_distances(proposal, rows, cols)
            if np.any(d_new > 0):
                dh_new = isotonic_fit(delta, d_new)
                s_new = stress1(d_new, dh_new)
                if s_new <= stress + 1e-15:
                    accepted = (proposal, d_new, dh_new, s_new)
                    break
            proposal = 0.5 * (proposal + coords)
        if accepted is None:
            break
        coords, distances, disparities, s_new = accepted
        assert s_new <= stress + 1e-12, "stress increased within an iteration"
        converged = stress - s_new < tol * max(stress, 1e-30)
        stress = s_new
        history.append(stress)
        if converged or stress == 0.0:
            break
    coords = coords - coords.mean(axis=0)
    return coords, stress, iterations, tuple(history)


def _validate_diss(values: np.ndarray):
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("dissimilarity matrix must be square")
    if not np.allclose(values, values.T):
        raise ValueError("dissimilarity matrix must be symmetric")
    if np.any(np.diag(values) != 0):
        raise ValueError("dissimilarity diagonal must be zero")
    if np.any(values < 0):
        raise ValueError("dissimilarities must be nonnegative")


def classical_mds_init(diss: DissimilarityMatrix, k: int) -> np.ndarray:
    """Torgerson initialization: eigendecompose double-centered squares.

    Negative eigenvalues (non-Euclidean input) are clamped to zero; exact
    Euclidean input is recovered up to rotation.
    """
    values = np.asarray(diss.values, dtype=float)
    _validate_diss(values)
    n = len(values)
    if k >= n:
        raise ValueError(f"k must be < n = {n}, got {k}")
    j = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * j @ (values**2) @ j
    eigvals, eigvecs = np.linalg.eigh(gram)
    top = np.argsort(eigvals)[::-1][:k]
    scales = np.sqrt(np.clip(eigvals[top], 0.0, None))
    coords = eigvecs[:, top] * scales
    return coords - coords.mean(axis=0)


def nonmetric_mds(
    diss: DissimilarityMatrix,
    k: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    init: np.ndarray | None = None,
) -> MdsSolution:
    """Best-of-restarts nonmetric embedding of a dissimilarity matrix.

    Restart 0 starts from the classical (Torgerson) solution, the rest from
    seeded Gaussian configurations; an explicit init adds one more restart.
    Ties in final stress resolve to the earliest restart so results are
    reproducible bit-for-bit.
    """
    values = np.asarray(diss.values, dtype=float)
    _validate_diss(values)
    n = len(values)
    if n < k + 1:
        raise ValueError(f"need at least k+1 = {k + 1} points, have {n}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rows, cols = _pair_indices(n)
    delta = values[rows, cols]
    degenerate = bool(np.all(delta == delta[0]))

    starts = [classical_mds_init(diss, k)]
    for r in range(1, restarts):
        rng = np.random.Generator(np.random.Philox(key=[seed, r]))
        starts.append(rng.standard_normal((n, k)))
    if init is not None:
        init = np.asarray(init, dtype=float)
        if init.shape != (n, k):
            raise ValueError(f"init must have shape {(n, k)}, got {init.shape}")
        starts.append(init)

    best = None
    for index, start in enumerate(starts):
        coords, stress, iterations, history = _run(
            delta, start, rows, cols, max_iter, tol
        )
        if best is None or stress < best[0] - 1e-15:
            best = (stress, index, coords, iterations, history)
    stress, _, coords, iterations, history = best
    return MdsSolution(
        coordinates=coords,
        stress=stress,
        k=k,
        iterations=iterations,
        restarts_used=len(starts),
        degenerate=degenerate,
        stress_history=history,
    )


def scree(
    diss: DissimilarityMatrix,
    k_max: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> ScreeCurve:
    """Best stress for k = 1..k_max, warm-starting each k from the last.

    The k+1 run always includes the best-k coordinates padded with a zero
    column as one candidate start; since iterations never increase stress,
    the curve is non-increasing in k.
    """
    if k_max >= diss.n:
        raise ValueError(f"k_max must be < n = {diss.n}")
    points = []
    warm = None
    for k in range(1, k_max + 1):
        solution = nonmetric_mds(
            diss, k, restarts=restarts, max_iter=max_iter, tol=tol, seed=seed,
            init=warm,
        )
        points.append((k, solution.stress))
        warm = np.hstack([solution.coordinates, np.zeros((diss.n, 1))])
    return ScreeCurve(points=tuple(points))


def procrustes_align(a: np.ndarray, b: np.ndarray):
    """Align b onto a with the best rotation/reflection, scale, and shift.

    Returns (b_aligned, residual) where the residual is the normalized
    Procrustes disparity in [0, 1]: 0 for a perfect match after transform.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    a_center = a - a.mean(axis=0)
    b_center = b - b.mean(axis=0)
    norm_a = np.linalg.norm(a_center)
    norm_b = np.linalg.norm(b_center)
    if norm_a == 0 or norm_b == 0:
        raise ValueError("degenerate configuration: zero spread")
    u, sing, vt = np.linalg.svd(b_center.T @ a_center)
    rotation = u @ vt
    trace = float(np.sum(sing))
    scale = trace / norm_b**2
    aligned = scale * b_center @ rotation + a.mean(axis=0)
    residual = np.sqrt(max(0.0, 1.0 - (trace / (norm_a * norm_b)) ** 2))
    return aligned, float(residual)
