"""Monogamy-based upper bounds for random access coding with bounded
entanglement and unconstrained classical communication.

Closed-form bounds are evaluated in exact rational arithmetic; the
asymmetric case is solved numerically by projected gradient ascent on the
ellipsoid surface that the cloning constraint carves out of [0, 1]^N.
Restarts draw from deterministically split seed streams, so results are
reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .qcore import DensityMatrix, F_from_f, haar_random_ket, partial_trace

PROB_SUM_TOL = 1e-12

_SQ2 = 1 / np.sqrt(2)
# columns: (|00>+|11>)/s2, i(|00>-|11>)/s2, i(|01>+|10>)/s2, (|01>-|10>)/s2
_MAGIC_BASIS = np.array(
    [
        [_SQ2, 1j * _SQ2, 0, 0],
        [0, 0, 1j * _SQ2, _SQ2],
        [0, 0, 1j * _SQ2, -_SQ2],
        [_SQ2, -1j * _SQ2, 0, 0],
    ]
)


@dataclass(frozen=True)
class CloningParams:
    """N1 input copies cloned to N2 outputs in dimension d."""

    n1: int
    n2: int
    d: int

    def __post_init__(self):
        if not 1 <= self.n1 <= self.n2:
            raise ValueError(f"need 1 <= n1 <= n2, got n1={self.n1}, n2={self.n2}")
        if self.d < 2:
            raise ValueError(f"dimension must be at least 2, got {self.d}")


@dataclass(frozen=True)
class AsymSpec:
    """Receiver dimension and the probabilities with which inputs are requested."""

    d: int
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be at least 2, got {self.d}")
        p = tuple(float(x) for x in self.probabilities)
        if len(p) < 2:
            raise ValueError("need at least two receivers")
        if any(x < 0 for x in p):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(p) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {sum(p)!r}")
        object.__setattr__(self, "probabilities", p)

    @property
    def n(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class BoundResult:
    """A bound value with exact rational form when one exists."""

    label: str
    value: float
    exact: Fraction | None = None
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        payload: dict = {"label": self.label, "value": self.value, "details": self.details}
        if self.exact is not None:
            payload["exact"] = {
                "numerator": self.exact.numerator,
                "denominator": self.exact.denominator,
            }
        return payload


def werner_fidelity(params: CloningParams) -> Fraction:
    """Optimal universal cloning fidelity N1/N2 + (N2-N1)(N1+1)/(N2(N1+d))."""
    n1, n2, d = params.n1, params.n2, params.d
    return Fraction(n1, n2) + Fraction((n2 - n1) * (n1 + 1), n2 * (n1 + d))


def symmetric_bound(d: int, n: int) -> Fraction:
    """Success bound (N + d - 1)/(d N) for N equally likely d-dimensional inputs."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if n < 1:
        raise ValueError(f"need at least one receiver, got {n}")
    return Fraction(n + d - 1, d * n)


def symmetric_bound_via_cloning(d: int, n: int) -> Fraction:
    """Same bound derived through the cloning fidelity and the f -> F conversion."""
    f = werner_fidelity(CloningParams(n1=1, n2=n, d=d))
    return F_from_f(f, d)


def kay_constraint_residual(F_values: Sequence[float], d: int) -> float:
    """Slack of the entanglement-fidelity constraint
    sum F_i <= (d-1)/d + (sum sqrt(F_i))^2 / (N + d - 1); >= 0 means feasible."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    fs = [float(v) for v in F_values]
    if any(not 0 <= v <= 1 + 1e-12 for v in fs):
        raise ValueError("fidelities must lie in [0, 1]")
    n = len(fs)
    rhs = (d - 1) / d + sum(np.sqrt(max(v, 0.0)) for v in fs) ** 2 / (n + d - 1)
    return float(rhs - sum(fs))


def asym_closed_form_n2(p: float, d: int) -> float:
    """Two-receiver bound (1 + sqrt(1 + 4 (d^2-1) (p-1) p / d^2)) / 2."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return 0.5 * (1 + np.sqrt(1 + 4 * (d * d - 1) * (p - 1) * p / d**2))


@dataclass(frozen=True)
class AsymOptimum:
    value: float
    point: tuple[float, ...]
    restarts: int
    details: dict = field(default_factory=dict)


def _constraint_matrix(n: int, d: int) -> tuple[np.ndarray, float]:
    q = np.eye(n) - np.ones((n, n)) / (n + d - 1)
    return q, (d - 1) / d


def _to_surface(x: np.ndarray, q: np.ndarray, c: float) -> np.ndarray:
    quad = float(x @ q @ x)
    if quad <= 0:
        raise ValueError("cannot project the zero direction onto the surface")
    return x * np.sqrt(c / quad)


def _push_to_box_surface(y: np.ndarray, q: np.ndarray, c: float) -> np.ndarray | None:
    """Return a point on the surface inside [0,1]^N near y, or None."""
    y = np.clip(y, 0.0, 1.0)
    for _ in range(16):
        quad = float(y @ q @ y)
        if abs(quad - c) < 1e-14:
            return y
        if quad > c:
            y = _to_surface(y, q, c)
            if y.max() <= 1 + 1e-12:
                return np.clip(y, 0.0, 1.0)
            y = np.clip(y, 0.0, 1.0)
            continue
        # below the surface with some coordinates clamped: scale the free ones up
        free = y < 1 - 1e-12
        if not free.any():
            return None
        lo, hi = 1.0, 2.0
        z = y.copy()
        for _ in range(60):
            z[free] = np.minimum(y[free] * hi, 1.0)
            if float(z @ q @ z) >= c or hi > 1e9:
                break
            hi *= 2.0
        if float(z @ q @ z) < c:
            return None
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            z = y.copy()
            z[free] = np.minimum(y[free] * mid, 1.0)
            if float(z @ q @ z) < c:
                lo = mid
            else:
                hi = mid
        z = y.copy()
        z[free] = np.minimum(y[free] * hi, 1.0)
        return np.clip(z, 0.0, 1.0)
    return np.clip(y, 0.0, 1.0)


def asym_optimize(
    spec: AsymSpec,
    restarts: int = 64,
    seed: int = 0,
    max_iterations: int = 2000,
    tol: float = 1e-10,
) -> AsymOptimum:
    """Maximise sum p_i x_i^2 over x in [0,1]^N on the constraint surface.

    Gradient ascent restricted to the ellipsoid x^T Q x = c with
    Q = 1 - J/(N+d-1), c = (d-1)/d: the gradient is projected onto the
    tangent space, the step is retracted radially back onto the surface, and
    coordinates at the box bounds have outward gradient components dropped.
    Restarts start from seeded uniform-random feasible points; ties resolve
    to the larger value, so the result is deterministic for a fixed seed.
    """
    n, d = spec.n, spec.d
    if n > 8:
        raise ValueError("optimizer supports up to 8 receivers")
    p = np.asarray(spec.probabilities)
    q, c = _constraint_matrix(n, d)
    diagonal = _to_surface(np.ones(n), q, c)
    if diagonal.max() > 1 + 1e-12:
        raise ValueError("constraint surface does not intersect the unit box")

    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best_val = -np.inf
    best_x = diagonal
    for seq in seeds:
        rng = np.random.Generator(np.random.PCG64(seq))
        start = _push_to_box_surface(_to_surface(rng.uniform(0.05, 1.0, n), q, c), q, c)
        x = start if start is not None else diagonal.copy()
        step = 0.1
        for _ in range(max_iterations):
            grad = 2 * p * x
            normal = q @ x
            normal /= np.linalg.norm(normal)
            tangent = grad - (grad @ normal) * normal
            tangent[(x >= 1 - 1e-12) & (tangent > 0)] = 0.0
            tangent[(x <= 1e-12) & (tangent < 0)] = 0.0
            if np.linalg.norm(tangent) < tol:
                break
            candidate = _push_to_box_surface(x + step * tangent, q, c)
            if candidate is not None and float(p @ candidate**2) > float(p @ x**2):
                x = candidate
            else:
                step *= 0.5
                if step < 1e-14:
                    break
        val = float(p @ x**2)
        if val > best_val:
            best_val, best_x = val, x
    return AsymOptimum(
        value=best_val,
        point=tuple(float(v) for v in best_x),
        restarts=restarts,
        details={"d": d, "n": n, "seed": seed},
    )


def fully_entangled_fraction(rho: DensityMatrix, seed: int = 0) -> float:
    """Maximal overlap of rho with a maximally entangled state.

    For two qubits this is the largest eigenvalue of the real part of rho in
    the magic basis, which is exact.  For d >= 3 a seeded ascent over local
    unitaries returns a lower estimate (each sweep solves the Procrustes
    alignment of the current unitary, which never decreases the overlap).
    """
    m = rho.matrix
    d = int(round(np.sqrt(m.shape[0])))
    if d * d != m.shape[0] or d < 2:
        raise ValueError(f"dimension {m.shape[0]} is not d*d with d >= 2")
    if d == 2:
        magic = _MAGIC_BASIS.conj().T @ m @ _MAGIC_BASIS
        return float(np.linalg.eigvalsh(magic.real)[-1])
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(16):
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        u, _ = np.linalg.qr(z)
        prev = -1.0
        for _ in range(500):
            vec = u.reshape(-1)
            aligned = (m @ vec).reshape(d, d)
            w, _, vh = np.linalg.svd(aligned)
            u = w @ vh
            vec = u.reshape(-1)
            cur = float(np.real(np.vdot(vec, m @ vec)) / d)
            done = cur - prev < 1e-14
            prev = cur
            if done:
                break
        best = max(best, prev)
    return best


@dataclass(frozen=True)
class MonogamyScan:
    min_residual: float
    n_states: int
    seed: int
    residuals_head: tuple[float, ...]


def kay_feasibility_scan(n_states: int = 500, seed: int = 20220314, keep_head: int = 8) -> MonogamyScan:
    """Sample random pure three-qubit states and check the fidelity constraint
    on the two marginals that share the receiver qubit."""
    if n_states < 1:
        raise ValueError("need at least one state")
    rng = np.random.default_rng(seed)
    residuals = []
    for _ in range(n_states):
        psi = haar_random_ket(8, rng)
        rho = DensityMatrix(psi.projector())
        marg_1 = partial_trace(rho, [2, 2, 2], keep=[0, 2])
        marg_2 = partial_trace(rho, [2, 2, 2], keep=[1, 2])
        f1 = fully_entangled_fraction(marg_1)
        f2 = fully_entangled_fraction(marg_2)
        residuals.append(kay_constraint_residual([f1, f2], d=2))
    return MonogamyScan(
        min_residual=float(min(residuals)),
        n_states=n_states,
        seed=seed,
        residuals_head=tuple(float(r) for r in residuals[:keep_head]),
    )
