"""Stability of the computed rank under inexact input vectors.

If every vector is known only up to ``phi'_j = phi_j + delta phi_j`` with
inaccuracy factor ``s = max_j ||delta phi_j|| / sqrt(d)``, each singular
value of the system matrix moves by at most ``f(d, N) s``, where

    f(d, N) = 2^6 d^{5/2} / N^2 (1 - 2d/N)^2 sqrt((N - d) / (d (N - 1)))

(valid for ``N > 2d``).  A zero singular value therefore cannot be confused
with the smallest non-zero one ``sigma_1`` while ``s < sigma_1 / (2 f)``:
this is the confidence region of the defect computation.

An alternative, differently scaled expression
``2^6 d^2 / N (1 - 2d/N)^2 sqrt((N - d) / (N (N - 1)))`` is available as
``variant="short"`` for comparison.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._format import fmt17
from .core import DEFAULT_TOLERANCES, HermitianUnitary, VectorSet
from .defect import assemble_matrix, build_linear_system, restricted_defect

__all__ = [
    "inaccuracy_factor",
    "perturb_vectors",
    "f_bound",
    "ConfidenceRegion",
    "confidence_region",
    "RobustnessReport",
    "singular_sweep",
    "PerturbationChain",
    "eigen_perturbation_chain",
    "parse_grid",
    "FS_VALIDITY_LIMIT",
]

#: ``f * s`` must stay below this for the confidence region to be meaningful.
FS_VALIDITY_LIMIT = 0.1


def inaccuracy_factor(exact: VectorSet, approx: VectorSet) -> float:
    """``s = max_j ||phi'_j - phi_j|| / sqrt(d)``."""
    if exact.vectors.shape != approx.vectors.shape:
        raise ValueError(f"shape mismatch: {exact.vectors.shape} vs {approx.vectors.shape}")
    diff = np.linalg.norm(approx.vectors - exact.vectors, axis=0)
    return float(diff.max() / math.sqrt(exact.d))


def perturb_vectors(v: VectorSet, s: float, seed: int | Sequence[int] | np.random.Generator = 0) -> VectorSet:
    """Add ``s * xi`` to the real and to the imaginary part of every entry,
    ``xi`` uniform in ``[-1, 1]`` and independent.  Vectors are not
    renormalised."""
    if s < 0:
        raise ValueError("s must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = v.vectors.shape
    noise = rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
    return VectorSet(v.vectors + s * noise, v.labels, norm_tol=None)


def f_bound(d: int, N: int, variant: str = "derived") -> float:
    """Perturbation constant ``f(d, N)`` (requires ``N > 2d``).

    ``variant="derived"`` (default) is the fully derived bound;
    ``variant="short"`` the alternative expression with different powers of
    ``d`` and ``N``.
    """
    if N <= 2 * d:
        raise ValueError(f"the bound requires N > 2d (got d={d}, N={N})")
    c = (1 - 2 * d / N) ** 2
    if variant == "derived":
        return 2**6 * d**2.5 / N**2 * c * math.sqrt((N - d) / (d * (N - 1)))
    if variant == "short":
        return 2**6 * d**2 / N * c * math.sqrt((N - d) / (N * (N - 1)))
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class ConfidenceRegion:
    s_max: float
    f_value: float
    valid: bool  # f * s below FS_VALIDITY_LIMIT
    certified: bool  # declared inaccuracy inside the region

    def describe(self) -> str:
        state = "certified" if self.certified else "NOT certified"
        warn = "" if self.valid else " (warning: f*s not small, bound unreliable)"
        return f"s_max = {self.s_max:.6g} (f = {self.f_value:.6g}); {state}{warn}"


def confidence_region(sigma1_observed: float, d: int, N: int, s: float = 0.0, variant: str = "derived") -> ConfidenceRegion:
    """Upper edge ``(sigma'_1 + f s) / (2 f)`` of the inaccuracy range over
    which the rank (and hence the defect) is certified unchanged.

    ``valid`` is False when ``f * s >= 0.1``; ``certified`` is True when the
    declared inaccuracy ``s`` lies inside the region.
    """
    f = f_bound(d, N, variant)
    smax = (sigma1_observed + f * s) / (2 * f)
    valid = f * s < FS_VALIDITY_LIMIT
    return ConfidenceRegion(smax, f, valid, bool(valid and s < smax))


@dataclass
class RobustnessReport:
    """Per-``s`` statistics of the two singular values straddling the rank
    cut, over independent perturbations."""

    structure: str
    d: int
    N: int
    s_grid: list[float]
    sigma0_mean: list[float]
    sigma1_mean: list[float]
    sigma0_min: list[float]
    sigma0_max: list[float]
    sigma1_min: list[float]
    sigma1_max: list[float]
    samples: int
    seed: int
    tol: float
    nullity: int
    gauge_row: int | None
    f_value: float | None
    s_max_bound: float | None
    povm_residual_max: list[float] = field(default_factory=list)

    def crossover(self) -> float | None:
        """Smallest grid ``s`` at which mean ``sigma0`` reaches mean ``sigma1``."""
        for s, a, b in zip(self.s_grid, self.sigma0_mean, self.sigma1_mean):
            if a >= b:
                return s
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = {
            "structure": self.structure,
            "d": self.d,
            "N": self.N,
            "samples": self.samples,
            "seed": self.seed,
            "tol": fmt17(self.tol),
            "nullity": self.nullity,
            "gauge_row": "none" if self.gauge_row is None else self.gauge_row,
            "f_value": "none" if self.f_value is None else fmt17(self.f_value),
            "s_max_bound": "none" if self.s_max_bound is None else fmt17(self.s_max_bound),
        }
        for k, v in meta.items():
            buf.write(f"# {k}: {v}\n")
        buf.write("s,sigma0_mean,sigma1_mean,sigma0_min,sigma0_max,sigma1_min,sigma1_max\n")
        cols = (self.s_grid, self.sigma0_mean, self.sigma1_mean, self.sigma0_min, self.sigma0_max, self.sigma1_min, self.sigma1_max)
        for row in zip(*cols):
            buf.write(",".join(fmt17(x) for x in row) + "\n")
        return buf.getvalue()


def _system_svals(U: np.ndarray, columns_from: HermitianUnitary, gauge_row: int | None) -> np.ndarray:
    """Singular values (ascending) of the system for the (possibly
    non-unitary) matrix ``U``, using the variable set of the reference."""
    ref = build_linear_system(columns_from, gauge_row, assemble=False)
    return np.sort(np.linalg.svd(assemble_matrix(U, ref.columns), compute_uv=False))


def singular_sweep(
    v: VectorSet,
    s_grid: Sequence[float],
    samples: int = 8,
    seed: int = 0,
    tol: float = DEFAULT_TOLERANCES.rank,
    gauge_row: int | None = None,
    structure: str = "custom",
    sigma1_reference: float | None = None,
) -> RobustnessReport:
    """Perturb ``v`` ``samples`` times at every ``s`` and record ``sigma0``
    (the ``nullity``-th smallest singular value, nullity frozen from the
    unperturbed system) and ``sigma1`` (the next one).

    The system keeps the variable set of the unperturbed structure; the
    perturbed Gram matrix is mapped through ``I - (2d/N) G`` without
    validation and its POVM residual is logged.  Sample ``i`` at grid
    position ``k`` uses the generator seeded with ``(seed, k, i)``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d, N = v.d, v.N
    G0 = v.vectors.conj().T @ v.vectors
    U0 = HermitianUnitary(np.eye(N) - (2 * d / N) * G0, d)
    ref = restricted_defect(U0, tol, gauge_row, method="dense")
    nul = ref.nullity
    f_val = f_bound(d, N) if N > 2 * d else None
    fixed_ref = restricted_defect(U0, tol, 0, method="dense")
    s_max = None
    if f_val is not None:
        s1 = fixed_ref.sigma1 if sigma1_reference is None else sigma1_reference
        s_max = confidence_region(s1 if s1 is not None else 0.0, d, N).s_max
    stats: dict[str, list[float]] = {k: [] for k in ("m0", "m1", "a0", "b0", "a1", "b1", "pr")}
    for ks, s in enumerate(s_grid):
        sig0, sig1, pr = [], [], []
        for i in range(samples):
            rng = np.random.default_rng([seed, ks, i])
            w = perturb_vectors(v, float(s), rng)
            G = w.vectors.conj().T @ w.vectors
            pr.append(float(np.abs(G @ G - (N / d) * G).max()))
            sv = _system_svals(np.eye(N) - (2 * d / N) * G, U0, gauge_row)
            sig0.append(sv[nul - 1] if nul >= 1 else 0.0)
            sig1.append(sv[nul] if nul < len(sv) else np.nan)
        stats["m0"].append(float(np.mean(sig0)))
        stats["m1"].append(float(np.mean(sig1)))
        stats["a0"].append(float(np.min(sig0)))
        stats["b0"].append(float(np.max(sig0)))
        stats["a1"].append(float(np.min(sig1)))
        stats["b1"].append(float(np.max(sig1)))
        stats["pr"].append(float(np.max(pr)))
    return RobustnessReport(
        structure=structure,
        d=d,
        N=N,
        s_grid=[float(x) for x in s_grid],
        sigma0_mean=stats["m0"],
        sigma1_mean=stats["m1"],
        sigma0_min=stats["a0"],
        sigma0_max=stats["b0"],
        sigma1_min=stats["a1"],
        sigma1_max=stats["b1"],
        samples=samples,
        seed=seed,
        tol=tol,
        nullity=nul,
        gauge_row=gauge_row,
        f_value=f_val,
        s_max_bound=s_max,
        povm_residual_max=stats["pr"],
    )


@dataclass(frozen=True)
class PerturbationChain:
    """Measured quantities next to the bounds of each step of the estimate.

    ``dG``: max entry change of the Gram matrix vs ``2 sqrt(d) s``;
    ``dU``: of the unitary vs ``4 d^{3/2} s / N``;
    ``dA``: of the system matrix vs ``(8 d^{3/2}/N)(1 - 2d/N) s``;
    ``gersh``: ``sum_ij |delta(A^T A)_ij|`` (the Gerschgorin-type bound on
    eigenvalue shifts of ``A^T A``);
    ``sv_shift``: max singular-value shift vs ``f(d, N) s``.
    """

    s: float
    dG: float
    dG_bound: float
    dU: float
    dU_bound: float
    dA: float
    dA_bound: float
    gersh: float
    sv_shift: float
    sv_bound: float | None

    def holds(self) -> dict[str, bool]:
        out = {
            "dG": self.dG <= self.dG_bound,
            "dU": self.dU <= self.dU_bound,
            "dA": self.dA <= self.dA_bound,
        }
        if self.sv_bound is not None:
            out["sv_shift"] = self.sv_shift <= self.sv_bound
        return out


def eigen_perturbation_chain(exact: VectorSet, approx: VectorSet, gauge_row: int | None = 0) -> PerturbationChain:
    """Evaluate every intermediate estimate on one concrete perturbation."""
    d, N = exact.d, exact.N
    s = inaccuracy_factor(exact, approx)
    G0 = exact.vectors.conj().T @ exact.vectors
    G1 = approx.vectors.conj().T @ approx.vectors
    U0 = np.eye(N) - (2 * d / N) * G0
    U1 = np.eye(N) - (2 * d / N) * G1
    ref = HermitianUnitary(U0, d)
    L0 = build_linear_system(ref, gauge_row)
    A1 = assemble_matrix(U1, L0.columns)
    A0 = L0.matrix
    s0 = np.linalg.svd(A0, compute_uv=False)
    s1 = np.linalg.svd(A1, compute_uv=False)
    gersh = float(np.abs(A1.T @ A1 - A0.T @ A0).sum())
    return PerturbationChain(
        s=s,
        dG=float(np.abs(G1 - G0).max()),
        dG_bound=2 * math.sqrt(d) * s,
        dU=float(np.abs(U1 - U0).max()),
        dU_bound=4 * d**1.5 * s / N,
        dA=float(np.abs(A1 - A0).max()),
        dA_bound=8 * d**1.5 / N * (1 - 2 * d / N) * s,
        gersh=gersh,
        sv_shift=float(np.abs(s1 - s0).max()),
        sv_bound=f_bound(d, N) * s if N > 2 * d else None,
    )


def parse_grid(spec: str) -> list[float]:
    """Parse ``"1e-8:1e-1:15"`` (log-spaced, inclusive) or a comma list."""
    spec = spec.strip()
    if not spec:
        raise ValueError("empty grid specification")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec {spec!r} must be LO:HI:COUNT")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= lo or n < 1:
            raise ValueError(f"invalid grid {spec!r}")
        return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n)]
    vals = [float(x) for x in spec.split(",")]
    if any(x < 0 for x in vals):
        raise ValueError("grid values must be non-negative")
    return vals
