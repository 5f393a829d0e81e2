"""Complex dense vector/matrix primitives and seeded complex-Gaussian sampling.

All downstream modules build on the handful of operations defined here:
Hermitian inner products, adjoint matrix-vector products, the vector
pseudoinverse, projection onto an orthogonal complement, and deterministic
circularly-symmetric Gaussian draws.

Vectors are 1-D complex128 ndarrays, matrices are 2-D complex128 ndarrays.
Random streams are counter-based (Philox) so that every Monte Carlo trial
can own an independent stream addressed by (seed, stream id) without any
shared mutable generator state.
"""

from dataclasses import dataclass

import numpy as np

# Centralized tolerances for double-precision dense ops at dimensions <= 64.
TOL_EQ = 1e-12        # relative equality of scalars/vectors
TOL_ORTHO = 1e-10     # residual orthogonality after projection
PARALLEL_RTOL = 1e-12  # |residual| / |input| below which a projection counts as zero


def as_cvector(x):
    """Coerce to a finite 1-D complex128 vector of dimension >= 1."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector with at least one entry, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_cmatrix(x):
    """Coerce to a finite 2-D complex128 matrix with rows, cols >= 1."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def inner(a, b):
    """Hermitian inner product sum_i conj(a_i) * b_i (conjugate on the first argument)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def norm_sq(a):
    """Squared Euclidean norm, real and >= 0."""
    a = np.asarray(a)
    return float(np.vdot(a, a).real)


def matvec_adj(H, v):
    """Adjoint product H^H v, mapping C^rows -> C^cols. Linear in v."""
    H = np.asarray(H)
    v = np.asarray(v)
    if v.shape != (H.shape[0],):
        raise ValueError(f"dimension mismatch: H is {H.shape}, v is {v.shape}")
    return H.conj().T @ v


def pinv_vec(a):
    """Pseudoinverse of a vector, returned as a row functional.

    For a != 0 the result is conj(a) / ||a||^2, so that np.dot(pinv_vec(a), a) == 1.
    The zero vector maps to the zero functional.
    """
    a = np.asarray(a)
    g = np.vdot(a, a).real
    if g == 0.0:
        return np.zeros_like(a)
    return a.conj() / g


def project_complement(a, x):
    """Project x onto the orthogonal complement of span{a}: (I - a a^#) x.

    Leaves x untouched when a = 0. The result is orthogonal to a and the map
    is idempotent.
    """
    a = np.asarray(a)
    x = np.asarray(x)
    if a.shape != x.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {x.shape}")
    g = np.vdot(a, a).real
    if g == 0.0:
        return x.copy()
    return x - a * (np.vdot(a, x) / g)


@dataclass(frozen=True)
class RngState:
    """Value-type handle onto a counter-based random stream.

    The same (seed, stream_id) pair always reproduces the same draw sequence;
    distinct stream ids give statistically independent streams, so concurrent
    trials never share generator state.
    """

    seed: int
    stream_id: int = 0

    def generator(self):
        """Fresh numpy Generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def stream(self, stream_id):
        """Sibling state addressing another stream under the same seed."""
        return RngState(self.seed, stream_id)


def _standard_complex_normal(gen, n):
    """n i.i.d. CN(0, 1) draws from an active Generator.

    Uses the polar (Box-Muller) transform on exactly 2n uniforms so the draw
    count per call is fixed; no rejection loop is ever taken.
    """
    u1 = 1.0 - gen.random(n)   # in (0, 1], keeps log() finite
    u2 = gen.random(n)
    r = np.sqrt(-np.log(u1))
    phase = 2.0 * np.pi * u2
    return r * (np.cos(phase) + 1j * np.sin(phase))


def sample_complex_gaussian(rng, n, mean=0.0, std=1.0):
    """n i.i.d. complex Gaussian draws CN(mean, std^2).

    Total variance is std^2, split evenly between real and imaginary parts.
    `rng` is either an RngState (value semantics: repeated calls with the
    same state return identical vectors) or an active numpy Generator
    (sequential semantics: each call consumes the stream).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if std < 0:
        raise ValueError("std must be >= 0")
    gen = rng.generator() if isinstance(rng, RngState) else rng
    z = _standard_complex_normal(gen, n)
    return complex(mean) + float(std) * z
