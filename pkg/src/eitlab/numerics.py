"""Shared numeric kernels with documented contracts.

Small dense complex linear solves, power-of-two FFT wrappers, fixed-step RK4
for linear systems, Richardson-extrapolated central differences, a Hermitian
eigendecomposition oracle, and a prominence-based peak finder.  All kernels
are stateless; callers own every buffer, so concurrent use is safe.

FFT normalization: unnormalized forward transform, 1/N inverse (the numpy
convention).  All call sites assume it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLength, SingularMatrix, StepTooLarge

# Pivot threshold relative to the row scale; below this the matrix is
# treated as singular rather than dividing by a denormal.
_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class ComplexGrid:
    """Complex samples on a uniform 1-D grid.

    ``values[k]`` lives at coordinate ``origin + k*spacing``.
    """

    values: np.ndarray
    spacing: float
    origin: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise BadLength(f"grid needs >= 2 samples, got shape {values.shape}")
        if not (self.spacing > 0):
            raise ValueError(f"grid spacing must be > 0, got {self.spacing}")

    def __len__(self) -> int:
        return self.values.size

    def times(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.values.size)


def _require_power_of_two(n: int) -> None:
    if n < 2 or (n & (n - 1)) != 0:
        raise BadLength(f"spectral kernels need a power-of-two length, got {n}")


def fft(values: np.ndarray) -> np.ndarray:
    """Forward FFT (unnormalized) of a power-of-two complex array."""
    values = np.asarray(values)
    _require_power_of_two(values.size)
    return np.fft.fft(values)


def ifft(values: np.ndarray) -> np.ndarray:
    """Inverse FFT (1/N normalization) of a power-of-two complex array."""
    values = np.asarray(values)
    _require_power_of_two(values.size)
    return np.fft.ifft(values)


def solve4(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a small dense complex system by Gaussian elimination with
    scaled partial pivoting.

    Intended for the 4x4 systems of the linear response; works for any n.
    Raises SingularMatrix when the best available pivot falls below
    1e-300 times its row scale.  Backward error satisfies
    ``||A x - b|| <= ~1e-12 ||A|| ||x||`` for well-conditioned systems.
    """
    a = np.array(matrix, dtype=complex)
    b = np.array(rhs, dtype=complex)
    n = b.size
    if a.shape != (n, n):
        raise ValueError(f"matrix shape {a.shape} does not match rhs length {n}")

    scale = np.max(np.abs(a), axis=1)
    if np.any(scale == 0.0):
        raise SingularMatrix("matrix has an all-zero row")

    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k]) / scale[k:]))
        if abs(a[p, k]) <= _PIVOT_FLOOR * scale[p]:
            raise SingularMatrix(f"pivot {abs(a[p, k]):.3e} below scaled floor")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
            scale[[k, p]] = scale[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        b[k + 1:] -= factors * b[k]

    if abs(a[n - 1, n - 1]) <= _PIVOT_FLOOR * scale[n - 1]:
        raise SingularMatrix("last pivot below scaled floor")

    x = np.zeros(n, dtype=complex)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - np.dot(a[k, k + 1:], x[k + 1:])) / a[k, k]
    return x


def rk4_linear(
    generator: np.ndarray,
    drive: np.ndarray,
    state0: np.ndarray,
    dt: float,
    steps: int,
) -> np.ndarray:
    """Classical fixed-step RK4 for ``x' = G x + b`` with constant G and b.

    For a constant-coefficient linear system the four RK4 stages collapse to
    fixed matrices, so the step operator ``x -> Phi x + Psi b`` (Phi, Psi the
    degree-4 Taylor truncations) is precomputed once and every step is a
    single mat-vec.  This is algebraically identical to running the classical
    stages and keeps the usual O(dt^4) global error.
    """
    g = np.asarray(generator, dtype=complex)
    b = np.asarray(drive, dtype=complex)
    x = np.array(state0, dtype=complex)
    n = x.size
    if g.shape != (n, n):
        raise ValueError(f"generator shape {g.shape} does not match state length {n}")

    gnorm = np.linalg.norm(g, 2)
    if dt * gnorm > 0.2:
        raise StepTooLarge(f"dt*||G|| = {dt * gnorm:.3g} exceeds 0.2")

    a = dt * g
    a2 = a @ a
    a3 = a2 @ a
    eye = np.eye(n, dtype=complex)
    phi = eye + a + a2 / 2.0 + a3 / 6.0 + (a3 @ a) / 24.0
    psi = dt * (eye + a / 2.0 + a2 / 6.0 + a3 / 24.0)
    forced = psi @ b

    for _ in range(steps):
        x = phi @ x + forced
    return x


def central_difference(f, x0: float, h: float, order: int = 1):
    """Plain central difference of first or second order derivative."""
    if order == 1:
        return (f(x0 + h) - f(x0 - h)) / (2.0 * h)
    if order == 2:
        return (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / h**2
    raise ValueError(f"order must be 1 or 2, got {order}")


def richardson_derivative(f, x0: float, h: float, order: int = 1):
    """Richardson-extrapolated central difference (steps h and h/2).

    Cancels the leading O(h^2) truncation term of the central stencil,
    leaving O(h^4).  ``f`` may return complex values.
    """
    coarse = central_difference(f, x0, h, order)
    fine = central_difference(f, x0, h / 2.0, order)
    return (4.0 * fine - coarse) / 3.0


def hermitian_eigensystem(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense Hermitian eigendecomposition with deterministic conventions.

    Eigenvalues ascending; each eigenvector normalized with its
    largest-magnitude component made real positive.  Serves as the numeric
    oracle for the closed-form eigensystems.  Backed by LAPACK through
    numpy; residuals are at the 1e-14 * ||H|| level for 4x4 input.
    """
    eigenvalues, vectors = np.linalg.eigh(np.asarray(matrix, dtype=complex))
    return eigenvalues, fix_eigenvector_phases(vectors)


def fix_eigenvector_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real > 0."""
    out = np.array(vectors, dtype=complex)
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        pivot = col[k]
        if pivot != 0:
            out[:, j] = col * (abs(pivot) / pivot)
    return out


def prominent_peaks(values: np.ndarray, min_prominence: float) -> list[int]:
    """Indices of strict local maxima with topographic prominence above a floor.

    Prominence of a peak is its height minus the higher of the two valley
    minima separating it from the nearest higher ground on each side (or
    from the array edge when no higher ground exists).
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    peaks: list[int] = []
    for i in range(1, n - 1):
        if not (y[i] > y[i - 1] and y[i] > y[i + 1]):
            continue
        left_min = y[i]
        j = i - 1
        while j >= 0 and y[j] < y[i]:
            left_min = min(left_min, y[j])
            j -= 1
        if j < 0:
            left_min = float(np.min(y[: i + 1]))
        right_min = y[i]
        j = i + 1
        while j < n and y[j] < y[i]:
            right_min = min(right_min, y[j])
            j += 1
        if j >= n:
            right_min = float(np.min(y[i:]))
        prominence = y[i] - max(left_min, right_min)
        if prominence >= min_prominence:
            peaks.append(i)
    return peaks
