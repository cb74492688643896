"""Dense complex linear algebra and quantum primitives.

States, tensor products, partial traces, fidelities and the conversion
between entanglement fidelity F and transmission fidelity f.  Everything
here is a pure function on immutable values, so concurrent use is safe.
Monte Carlo sampling draws from PCG64 streams derived deterministically
from the user seed (one stream per fixed-size chunk), so estimates are
reproducible regardless of how the chunks are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
PHASE_EQUALITY_TOL = 1e-10

MC_CHUNK = 64

RationalLike = int | float | Fraction


def _as_complex_matrix(entries: np.ndarray | Sequence) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def ensure_square(m: np.ndarray) -> np.ndarray:
    m = _as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class Ket:
    """Unit-norm complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("a ket is a nonempty 1-d complex vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("ket amplitudes must be finite")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError(f"ket must be normalised, |norm - 1| = {abs(np.linalg.norm(v) - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "Ket") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = ensure_square(self.matrix)
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix must have unit trace, got {np.trace(m).real!r}")
        if np.linalg.eigvalsh(m)[0] < PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {np.linalg.eigvalsh(m)[0]:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Fidelity:
    """Real fidelity value in [0, 1]; float noise within 1e-12 is clamped."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (-NORM_TOL <= v <= 1.0 + NORM_TOL):
            raise ValueError(f"fidelity must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "value", min(max(v, 0.0), 1.0))


@dataclass(frozen=True)
class FidelityEstimate:
    """Monte Carlo fidelity estimate with its standard error."""

    value: float
    std_error: float
    samples: int = field(default=0)


def states_equal(a: Ket, b: Ket, tol: float = PHASE_EQUALITY_TOL) -> bool:
    """Equality up to global phase: |<a|b>| = 1 within tol."""
    if a.dim != b.dim:
        return False
    return abs(abs(a.overlap(b)) - 1.0) <= tol


def bell_state(d: int) -> Ket:
    """Maximally entangled state (1/sqrt(d)) sum_i |ii> on a d x d system."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return Ket(v)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(_as_complex_matrix(a), _as_complex_matrix(b))


def apply_to_bell_half(op: np.ndarray, d: int) -> Ket:
    """(op (x) 1)|psi+> for a d x d operator; op must preserve the norm."""
    op = ensure_square(op)
    if op.shape[0] != d:
        raise ValueError(f"operator dimension {op.shape[0]} does not match d={d}")
    # components of (W (x) 1)|psi+> are W[j, i]/sqrt(d) at index j*d + i
    return Ket(op.reshape(-1) / np.sqrt(d))


def embed_operator(op: np.ndarray, sites: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on the given sites into the full product space.

    ``op`` is a matrix on the tensor product of ``dims[s]`` for ``s`` in
    ``sites`` (in that order); the result acts as the identity elsewhere.
    """
    op = ensure_square(op)
    dims = list(dims)
    n = len(dims)
    sites = list(sites)
    if len(set(sites)) != len(sites) or any(not 0 <= s < n for s in sites):
        raise ValueError(f"invalid site list {sites} for {n} subsystems")
    expected = int(np.prod([dims[s] for s in sites]))
    if op.shape[0] != expected:
        raise ValueError(f"operator dim {op.shape[0]} does not match sites {sites}")
    rest = [i for i in range(n) if i not in sites]
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    perm = sites + rest
    tensor = full.reshape([dims[p] for p in perm] * 2)
    inv = np.argsort(perm)
    tensor = tensor.transpose(list(inv) + [n + i for i in inv])
    total = int(np.prod(dims))
    return tensor.reshape(total, total)


def partial_trace(
    rho: DensityMatrix | np.ndarray,
    dims: Sequence[int],
    keep: Sequence[int],
) -> DensityMatrix:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` are the subsystem dimensions in tensor order; their product must
    equal the dimension of ``rho``.  The kept subsystems appear in the output
    in the order given by ``keep``.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else ensure_square(rho)
    dims = list(dims)
    n = len(dims)
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"subsystem dims {dims} do not factor dimension {m.shape[0]}")
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= k < n for k in keep):
        raise ValueError(f"invalid keep list {keep} for {n} subsystems")
    tensor = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many subsystems")
    left = list(letters[:n])
    right = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            right[i] = left[i]
    out = "".join(left[i] for i in keep) + "".join(right[i] for i in keep)
    spec = "".join(left) + "".join(right) + "->" + out
    d_keep = int(np.prod([dims[i] for i in keep]))
    reduced = np.einsum(spec, tensor).reshape(d_keep, d_keep)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced)


def entanglement_fidelity(rho: DensityMatrix | np.ndarray) -> Fidelity:
    """Overlap <psi+|rho|psi+> of a bipartite d x d state with |psi+>."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else ensure_square(rho)
    d = int(round(np.sqrt(m.shape[0])))
    if d * d != m.shape[0] or d < 2:
        raise ValueError(f"dimension {m.shape[0]} is not a square d*d with d >= 2")
    psi = bell_state(d).amplitudes
    return Fidelity(float(np.real(np.vdot(psi, m @ psi))))


def f_from_F(F: RationalLike, d: int) -> Fraction:
    """Transmission fidelity from entanglement fidelity: f = (F d + 1)/(d + 1)."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return (Fraction(F) * d + 1) / (d + 1)


def F_from_f(f: RationalLike, d: int) -> Fraction:
    """Inverse of :func:`f_from_F`: F = (f (d + 1) - 1)/d."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return (Fraction(f) * (d + 1) - 1) / d


def haar_random_ket(d: int, rng: np.random.Generator) -> Ket:
    """Haar-random pure state: normalised vector of i.i.d. complex Gaussians."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return Ket(v / np.linalg.norm(v))


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, chunk))))


def transmission_fidelity_mc(
    channel: Callable[[Ket], DensityMatrix],
    d: int,
    samples: int,
    seed: int,
) -> FidelityEstimate:
    """Monte Carlo average of <phi|channel(|phi><phi|)|phi> over Haar-random |phi>.

    Deterministic for a fixed seed: sample i is drawn from the PCG64 stream
    of chunk i // MC_CHUNK, so the estimate does not depend on scheduling.
    Returns the sample mean and its standard error.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    values = np.empty(samples)
    for start in range(0, samples, MC_CHUNK):
        rng = _chunk_rng(seed, start // MC_CHUNK)
        for i in range(start, min(start + MC_CHUNK, samples)):
            phi = haar_random_ket(d, rng)
            out = channel(phi)
            if out.dim != d:
                raise ValueError("channel output dimension mismatch")
            values[i] = np.real(np.vdot(phi.amplitudes, out.matrix @ phi.amplitudes))
    mean = float(values.mean())
    std_error = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return FidelityEstimate(value=mean, std_error=std_error, samples=samples)
