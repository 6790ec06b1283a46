"""Eigenvalue solver driven by exact eigenphase winding counts.

Write the eigenvalues of U(k) as exp(i theta_m(k)) with each branch
theta_m continuous and strictly increasing in k (velocity at least
2 l_min).  k is an eigenvalue wave number of the graph operator exactly
when some branch crosses a multiple of 2 pi.  Summing over branches,

    sum_m theta_m(k) = Theta(k) + const,

with Theta the closed-form total phase, because det U(k) equals a
k-independent unimodular constant times exp(i Theta(k)).  Splitting
each branch into 2 pi * floor + fractional part phi_m(k) in [0, 2 pi)
gives, for the number of crossings in a half-open window (a, b],

    count(a, b] = [Theta(b) - Theta(a) - (Phi(b) - Phi(a))] / (2 pi),

where Phi(k) = sum_m phi_m(k).  The constant cancels and the right
side is an integer up to rounding noise, so windows can be counted
without any branch matching or path continuity.  The solver scans a
grid fine enough to keep per-cell counts small, then bisects every
cell with a positive count, always recursing into halves whose count
stays positive.  Multiple eigenvalues are handled natively: a cluster
of m coincident roots is simply a bracket whose count never drops
below m.

Refinement stops when a bracket is narrower than
max(4 eps (1 + k), tol (1 + k)); the midpoint is reported.  Roots
closer than 1e-9 (1 + k) merge into one record.  Each record's
crossing count is cross-checked against dim ker(I - U(k)) measured by
singular values below 1e-8 sqrt(2E).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexCrossingAmbiguity,
    OutOfScannedRange,
    StepPolicyViolation,
    ToleranceNotMet,
)
from .graphs import MetricGraph, RobinSpec
from .scattering import total_phase_derivative, total_phase_values, unitary_stack

__all__ = [
    "SpectralPoint",
    "Spectrum",
    "EigenvalueCurve",
    "compute_spectrum",
    "counting_function",
    "spectral_shift",
    "robin_homotopy",
]

TWO_PI = 2.0 * np.pi
EPS = float(np.finfo(float).eps)
MAX_BISECTION_LEVELS = 200
MERGE_SCALE = 1e-9
KERNEL_SV_SCALE = 1e-8
EIG_CHUNK = 1024


@dataclass(frozen=True)
class SpectralPoint:
    """One spectral record: first index, wave number, multiplicity."""

    index: int
    k: float
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    """Ordered spectrum of one graph operator at fixed coupling.

    records carry multiplicity, so a record with multiplicity m owns the
    m consecutive indices starting at its index field.  k_cap is the
    largest wave number the scan certified; every eigenvalue at or below
    k_cap appears.
    """

    sigma: float
    records: tuple
    k_cap: float

    def wavenumbers(self, count: int | None = None) -> np.ndarray:
        """Expanded wave numbers, one entry per index."""
        ks = np.repeat(
            [r.k for r in self.records],
            [r.multiplicity for r in self.records],
        )
        return ks if count is None else ks[:count]

    def eigenvalues(self, count: int | None = None) -> np.ndarray:
        return self.wavenumbers(count) ** 2

    @property
    def size(self) -> int:
        return sum(r.multiplicity for r in self.records)


@dataclass(frozen=True)
class EigenvalueCurve:
    """k_n as a function of the coupling on a uniform grid over [0, sigma]."""

    index: int
    couplings: tuple
    wavenumbers: tuple
    degenerate_at: tuple

    @property
    def samples(self) -> list:
        return list(zip(self.couplings, self.wavenumbers))


def _phase_sums(graph: MetricGraph, robin: RobinSpec, ks: np.ndarray) -> np.ndarray:
    """Phi(k) = sum of eigenvalue arguments of U(k) reduced to [0, 2 pi)."""
    ks = np.asarray(ks, dtype=float)
    out = np.empty(ks.size)
    for start in range(0, ks.size, EIG_CHUNK):
        batch = ks[start : start + EIG_CHUNK]
        ev = np.linalg.eigvals(unitary_stack(graph, robin, batch))
        out[start : start + EIG_CHUNK] = np.mod(np.angle(ev), TWO_PI).sum(axis=1)
    return out


def _window_counts(dtheta: np.ndarray, dphi: np.ndarray) -> np.ndarray:
    return np.rint((dtheta - dphi) / TWO_PI).astype(int)


def _stop_width(ks: np.ndarray, tol: float | None) -> np.ndarray:
    floor = 4.0 * EPS * (1.0 + ks)
    if tol is None:
        return floor
    return np.maximum(floor, tol * (1.0 + ks))


def _refine_brackets(graph, robin, los, his, th_lo, th_hi, ph_lo, ph_hi, counts, tol):
    """Count-guided bisection of every bracket down to the stop width."""
    roots: list[float] = []
    mults: list[int] = []
    for _ in range(MAX_BISECTION_LEVELS):
        if los.size == 0:
            return np.asarray(roots), np.asarray(mults, dtype=int)
        done = (his - los) <= _stop_width(his, tol)
        if np.any(done):
            roots.extend(0.5 * (los[done] + his[done]))
            mults.extend(counts[done])
            keep = ~done
            los, his, counts = los[keep], his[keep], counts[keep]
            th_lo, th_hi = th_lo[keep], th_hi[keep]
            ph_lo, ph_hi = ph_lo[keep], ph_hi[keep]
            if los.size == 0:
                continue
        mids = 0.5 * (los + his)
        th_mid = total_phase_values(graph, robin, mids)
        ph_mid = _phase_sums(graph, robin, mids)
        # c_hi is defined as the remainder so totals are conserved exactly;
        # clipping only matters when a root sits within rounding noise of
        # the midpoint, where either half is an acceptable home for it.
        c_lo = np.clip(_window_counts(th_mid - th_lo, ph_mid - ph_lo), 0, counts)
        c_hi = counts - c_lo
        left = c_lo > 0
        right = c_hi > 0
        los = np.concatenate([los[left], mids[right]])
        his = np.concatenate([mids[left], his[right]])
        th_lo = np.concatenate([th_lo[left], th_mid[right]])
        th_hi = np.concatenate([th_mid[left], th_hi[right]])
        ph_lo = np.concatenate([ph_lo[left], ph_mid[right]])
        ph_hi = np.concatenate([ph_mid[left], ph_hi[right]])
        counts = np.concatenate([c_lo[left], c_hi[right]])
    raise ToleranceNotMet(
        f"{los.size} brackets still open after {MAX_BISECTION_LEVELS} bisection levels"
    )


def _merge_roots(roots: np.ndarray, mults: np.ndarray):
    """Sum multiplicities of roots closer than the merge radius."""
    if roots.size == 0:
        return roots, mults
    order = np.argsort(roots)
    roots, mults = roots[order], mults[order]
    out_k: list[float] = []
    out_m: list[int] = []
    for k, m in zip(roots, mults):
        if out_k and k - out_k[-1] <= MERGE_SCALE * (1.0 + k):
            total = out_m[-1] + m
            out_k[-1] = (out_m[-1] * out_k[-1] + m * k) / total
            out_m[-1] = total
        else:
            out_k.append(float(k))
            out_m.append(int(m))
    return np.asarray(out_k), np.asarray(out_m, dtype=int)


def _kernel_dimensions(graph, robin, ks: np.ndarray, tol) -> np.ndarray:
    # A reported root sits up to half a stop width from the true root,
    # which lifts the kernel singular values by roughly that distance
    # times the branch phase velocity; widen the threshold accordingly
    # so loose user tolerances do not trip the cross-check.
    sv_tol = np.maximum(
        KERNEL_SV_SCALE * np.sqrt(graph.num_slots),
        2.0 * _stop_width(ks, tol) * total_phase_derivative(graph, robin, ks),
    )
    dims = np.empty(ks.size, dtype=int)
    eye = np.eye(graph.num_slots)
    for start in range(0, ks.size, EIG_CHUNK):
        batch = ks[start : start + EIG_CHUNK]
        sv = np.linalg.svd(eye - unitary_stack(graph, robin, batch), compute_uv=False)
        dims[start : start + EIG_CHUNK] = np.sum(
            sv < sv_tol[start : start + EIG_CHUNK, None], axis=1
        )
    return dims


def _anchor(graph: MetricGraph, robin: RobinSpec) -> float:
    """Scan floor: below every positive eigenvalue.

    For sigma = 0 the first positive wave number is at least pi / |G|
    (path graphs saturate it), so half that is safe.  For sigma > 0 the
    lowest eigenvalue behaves like sigma |V_R| / |G| to first order in
    sigma; the extra sqrt(sigma / |G|) / 100 floor keeps the anchor far
    below it even for very weak coupling.
    """
    floor = min(1e-6, 0.5 * np.pi / graph.total_length)
    if robin.sigma > 0.0 and robin.vertices:
        floor = min(floor, 0.01 * np.sqrt(robin.sigma / graph.total_length))
    return floor


def compute_spectrum(
    graph: MetricGraph,
    robin: RobinSpec | None = None,
    n_max: int | None = None,
    k_max: float | None = None,
    *,
    step_scale: float = 1.0,
    tol: float | None = None,
    check_kernel: bool = True,
) -> Spectrum:
    """All eigenvalue wave numbers up to an index or wave-number target.

    Exactly one of n_max (count including multiplicity) and k_max must
    be given.  step_scale multiplies the scan step pi / (8 l_max); tol
    loosens the default bisection stop width to tol * (1 + k).
    """
    if robin is None:
        robin = RobinSpec.neumann()
    if (n_max is None) == (k_max is None):
        raise ValueError("give exactly one of n_max and k_max")
    if n_max is not None and n_max < 1:
        raise ValueError("n_max must be at least 1")
    if k_max is not None and k_max <= 0.0:
        raise ValueError("k_max must be positive")
    if step_scale <= 0.0:
        raise ValueError("step_scale must be positive")

    delta = np.pi / (8.0 * graph.max_edge_length) * step_scale
    k_start = _anchor(graph, robin)
    has_zero_mode = robin.sigma == 0.0 or not robin.vertices
    zero_count = 1 if has_zero_mode else 0

    if k_max is not None:
        k_goal = k_max
    else:
        # Weyl count k|G|/pi plus slack covers the boundary correction.
        k_goal = np.pi * (n_max + graph.num_slots + 8) / graph.total_length
    n_cells = max(int(np.ceil((k_goal - k_start) / delta)), 1)

    grid = np.concatenate([[k_start], k_start + delta * np.arange(1, n_cells + 1)])
    theta = total_phase_values(graph, robin, grid)
    phi = _phase_sums(graph, robin, grid)

    roots = np.empty(0)
    mults = np.empty(0, dtype=int)
    lo_edge = 0
    while True:
        cells = np.arange(lo_edge, grid.size - 1)
        counts = _window_counts(
            theta[cells + 1] - theta[cells], phi[cells + 1] - phi[cells]
        )
        hot = cells[counts > 0]
        if hot.size:
            new_roots, new_mults = _refine_brackets(
                graph,
                robin,
                grid[hot],
                grid[hot + 1],
                theta[hot],
                theta[hot + 1],
                phi[hot],
                phi[hot + 1],
                counts[counts > 0],
                tol,
            )
            roots = np.concatenate([roots, new_roots])
            mults = np.concatenate([mults, new_mults])
        if k_max is not None or zero_count + int(mults.sum()) >= n_max:
            break
        # Undershot the requested count: extend the scan by a quarter.
        lo_edge = grid.size - 1
        extra = max(int(np.ceil(0.25 * n_cells)), 64)
        ext = grid[-1] + delta * np.arange(1, extra + 1)
        grid = np.concatenate([grid, ext])
        theta = np.concatenate([theta, total_phase_values(graph, robin, ext)])
        phi = np.concatenate([phi, _phase_sums(graph, robin, ext)])
        n_cells += extra

    roots, mults = _merge_roots(roots, mults)
    if k_max is not None:
        inside = roots <= k_max
        roots, mults = roots[inside], mults[inside]
        k_cap = float(k_max)
    else:
        k_cap = float(grid[-1])

    if check_kernel and roots.size:
        dims = _kernel_dimensions(graph, robin, roots, tol)
        short = dims < mults
        if np.any(short):
            j = int(np.flatnonzero(short)[0])
            raise ToleranceNotMet(
                f"kernel dimension {dims[j]} below crossing count {mults[j]} "
                f"at k={roots[j]!r}"
            )

    # Post-hoc audit: the counting function may not drift from the total
    # phase by more than the number of eigenphase branches.
    n_at_grid = zero_count + np.searchsorted(
        np.repeat(roots, mults), grid, side="right"
    )
    drift = np.abs(n_at_grid - theta / TWO_PI)
    if np.any(drift > graph.num_slots):
        raise StepPolicyViolation(
            f"counting function drifts {drift.max():.3f} branch widths from the "
            "total phase; rerun with a smaller step_scale"
        )

    records = []
    index = 1
    if has_zero_mode:
        records.append(SpectralPoint(index=1, k=0.0, multiplicity=1))
        index = 2
    for k, m in zip(roots, mults):
        records.append(SpectralPoint(index=index, k=float(k), multiplicity=int(m)))
        index += int(m)
    return Spectrum(sigma=robin.sigma, records=tuple(records), k_cap=k_cap)


def counting_function(spectrum: Spectrum, k: float) -> int:
    """N(k): eigenvalue count with multiplicity at or below k."""
    if k > spectrum.k_cap:
        raise OutOfScannedRange(
            f"k={k!r} exceeds the scanned range k_cap={spectrum.k_cap!r}"
        )
    return int(np.searchsorted(spectrum.wavenumbers(), k, side="right"))


def spectral_shift(spec0: Spectrum, spec1: Spectrum, k: float) -> int:
    """N(k, 0) - N(k, sigma); in {0, 1} for a single coupled vertex."""
    return counting_function(spec0, k) - counting_function(spec1, k)


def robin_homotopy(
    graph: MetricGraph,
    vertices,
    sigma: float,
    n: int,
    t_steps: int,
    *,
    strict: bool = False,
    step_scale: float = 1.0,
) -> EigenvalueCurve:
    """Track k_n over couplings t = 0, sigma/t_steps, ..., sigma.

    Index pairing is by sorted order at each coupling.  Couplings where
    the n-th eigenvalue is multiple are reported in degenerate_at (the
    sorted-order pairing stays well defined, but the perturbation
    direction inside the eigenspace is not); strict=True raises
    IndexCrossingAmbiguity instead.
    """
    if t_steps < 1:
        raise ValueError("t_steps must be at least 1")
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    couplings = [sigma * j / t_steps for j in range(t_steps + 1)]
    ks: list[float] = []
    degenerate: list[float] = []
    for t in couplings:
        spec = compute_spectrum(
            graph,
            RobinSpec(frozenset(vertices), t),
            n_max=n,
            step_scale=step_scale,
        )
        ks.append(float(spec.wavenumbers()[n - 1]))
        for rec in spec.records:
            if rec.index <= n < rec.index + rec.multiplicity:
                if rec.multiplicity > 1:
                    degenerate.append(t)
                break
    if strict and degenerate:
        raise IndexCrossingAmbiguity(
            f"eigenvalue {n} is multiple at couplings {degenerate}"
        )
    return EigenvalueCurve(
        index=n,
        couplings=tuple(couplings),
        wavenumbers=tuple(ks),
        degenerate_at=tuple(degenerate),
    )
