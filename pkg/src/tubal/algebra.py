"""Third-order tensor algebra under the t-product.

A real tensor ``x`` of shape ``(n1, n2, n3)`` is treated as an n1 x n2
matrix of length-n3 tubes.  The t-product of two such tensors is the
circular convolution of their tubes, equivalently ``fold(bcirc(a) @
unfold(b))``.  All heavy operations here (t-product, t-SVD, singular
value thresholding, norms) are computed slice-by-slice after a DFT
along the tube axis, which block-diagonalizes the circulant structure;
conjugate symmetry of the transform of a real tensor means only
``n3 // 2 + 1`` slices are ever touched.  The explicit block-circulant
path survives only as a test oracle.

Conventions fixed here and relied on elsewhere in the package:

* vectorization order is frontal-slice-major, column-major within a
  slice, i.e. Fortran ravel of an ``(n1, n2, n3)`` array;
* singular tubes are ordered so the first-frontal-slice diagonal of the
  t-SVD middle factor is nonincreasing;
* index sets over singular tubes are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "ConjugateSymmetryError",
    "TsvdFactors",
    "as_tensor3",
    "average_rank",
    "bcirc",
    "complement_indices",
    "conj_transpose",
    "dft_mode3",
    "fold",
    "fro_norm",
    "identity_tensor",
    "idft_mode3",
    "is_fdiagonal",
    "is_orthogonal",
    "restrict",
    "tnn",
    "tprod",
    "truncate",
    "tsvd",
    "tubal_rank",
    "unfold",
]

DEFAULT_RANK_TOL = 1e-8

# Relative imaginary residual above which an inverse transform is not
# the transform of any real tensor.
IMAG_RESIDUAL_TOL = 1e-8


class ConjugateSymmetryError(ValueError):
    """Fourier-domain input is not conjugate-symmetric across slices."""


def as_tensor3(x, check_finite: bool = True) -> np.ndarray:
    """Validate and return `x` as a float64 array of shape (n1, n2, n3)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise ValueError(f"tensor dimensions must be >= 1, got {arr.shape}")
    if check_finite and not np.isfinite(arr).all():
        raise ValueError("tensor entries must be finite")
    return arr


# ---------------------------------------------------------------------------
# transforms and unfoldings


def dft_mode3(x: np.ndarray) -> np.ndarray:
    """DFT along the tube axis; returns a complex (n1, n2, n3) array."""
    return np.fft.fft(as_tensor3(x), axis=2)


def idft_mode3(xf: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft_mode3`, returning a real tensor.

    Raises
    ------
    ConjugateSymmetryError
        If the inverse transform has a relative imaginary residual above
        1e-8, i.e. `xf` is not the mode-3 DFT of any real tensor.
    """
    xf = np.asarray(xf, dtype=np.complex128)
    if xf.ndim != 3:
        raise ValueError(f"expected a third-order tensor, got ndim={xf.ndim}")
    out = np.fft.ifft(xf, axis=2)
    scale = np.linalg.norm(out.ravel())
    resid = np.linalg.norm(out.imag.ravel())
    if resid > IMAG_RESIDUAL_TOL * max(scale, np.finfo(np.float64).tiny):
        raise ConjugateSymmetryError(
            f"imaginary residual {resid:.3e} exceeds {IMAG_RESIDUAL_TOL:.0e} "
            f"of norm {scale:.3e}; input slices are not conjugate-symmetric"
        )
    return np.ascontiguousarray(out.real)


def _rfft(x: np.ndarray) -> np.ndarray:
    """Half-spectrum DFT along tubes: (n1, n2, n3//2 + 1) complex slices."""
    return np.fft.rfft(x, axis=2)


def _irfft(xf: np.ndarray, n3: int) -> np.ndarray:
    return np.fft.irfft(xf, n=n3, axis=2)


def _half_weights(n3: int) -> np.ndarray:
    """Multiplicity of each retained slice in the full spectrum."""
    w = np.full(n3 // 2 + 1, 2.0)
    w[0] = 1.0
    if n3 % 2 == 0:
        w[-1] = 1.0
    return w


def _real_slice(j: int, n3: int) -> bool:
    """Whether half-spectrum slice j is self-conjugate (hence real)."""
    return j == 0 or (n3 % 2 == 0 and j == n3 // 2)


def unfold(x: np.ndarray) -> np.ndarray:
    """Stack the frontal slices vertically into an (n1*n3, n2) matrix."""
    x = as_tensor3(x)
    n1, n2, n3 = x.shape
    return x.transpose(2, 0, 1).reshape(n1 * n3, n2)


def fold(mat: np.ndarray, n3: int) -> np.ndarray:
    """Inverse of :func:`unfold`; `mat` must have n3 row blocks."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("fold expects a matrix")
    rows, n2 = mat.shape
    if n3 < 1 or rows % n3 != 0:
        raise ValueError(f"row count {rows} is not divisible by n3={n3}")
    n1 = rows // n3
    return np.ascontiguousarray(mat.reshape(n3, n1, n2).transpose(1, 2, 0))


def bcirc(x: np.ndarray) -> np.ndarray:
    """Block-circulant matrix of `x`: block (p, q) is slice (p - q) mod n3.

    Quadratic in n3; kept as the definitional oracle for the
    Fourier-domain fast paths.
    """
    x = as_tensor3(x)
    n1, n2, n3 = x.shape
    out = np.empty((n1 * n3, n2 * n3))
    for p in range(n3):
        for q in range(n3):
            out[p * n1 : (p + 1) * n1, q * n2 : (q + 1) * n2] = x[:, :, (p - q) % n3]
    return out


# ---------------------------------------------------------------------------
# products


def tprod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """t-product of an (n1, n2, n3) tensor with an (n2, n4, n3) tensor.

    Computed as slicewise matrix products in the Fourier domain, which
    equals ``fold(bcirc(a) @ unfold(b))``.
    """
    a = as_tensor3(a)
    b = as_tensor3(b)
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ValueError(f"t-product shape mismatch: {a.shape} * {b.shape}")
    n3 = a.shape[2]
    cf = np.einsum("ijk,jlk->ilk", _rfft(a), _rfft(b))
    return _irfft(cf, n3)


def conj_transpose(x: np.ndarray) -> np.ndarray:
    """Transpose each frontal slice and reverse the order of slices 2..n3."""
    x = as_tensor3(x)
    out = np.empty((x.shape[1], x.shape[0], x.shape[2]))
    out[:, :, 0] = x[:, :, 0].T
    if x.shape[2] > 1:
        out[:, :, 1:] = x[:, :, :0:-1].transpose(1, 0, 2)
    return out


def identity_tensor(n: int, n3: int) -> np.ndarray:
    """Identity for the t-product: eye(n) in slice 1, zeros elsewhere."""
    if n < 1 or n3 < 1:
        raise ValueError("identity_tensor dimensions must be >= 1")
    out = np.zeros((n, n, n3))
    out[:, :, 0] = np.eye(n)
    return out


def is_orthogonal(q: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff q^* * q and q * q^* are within `tol` of the identity (Frobenius)."""
    q = as_tensor3(q)
    if q.shape[0] != q.shape[1]:
        raise ValueError(f"orthogonality requires square slices, got {q.shape}")
    eye = identity_tensor(q.shape[0], q.shape[2])
    qt = conj_transpose(q)
    left = np.linalg.norm((tprod(qt, q) - eye).ravel())
    right = np.linalg.norm((tprod(q, qt) - eye).ravel())
    return bool(left <= tol and right <= tol)


def is_fdiagonal(s: np.ndarray, tol: float = 0.0) -> bool:
    """True iff every frontal slice is diagonal up to `tol` (entrywise)."""
    s = as_tensor3(s)
    k = min(s.shape[0], s.shape[1])
    off = s.copy()
    off[np.arange(k), np.arange(k), :] = 0.0
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


# ---------------------------------------------------------------------------
# t-SVD


@dataclass(frozen=True)
class TsvdFactors:
    """Orthogonal factors u (n1,n1,n3), v (n2,n2,n3) and f-diagonal s with
    x = u * s * v^*.  ``spectrum`` is the first-frontal-slice diagonal of s,
    nonnegative and nonincreasing."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def spectrum(self) -> np.ndarray:
        k = min(self.s.shape[0], self.s.shape[1])
        return self.s[np.arange(k), np.arange(k), 0]

    def compose(self) -> np.ndarray:
        """Rebuild u * s * v^*."""
        return tprod(tprod(self.u, self.s), conj_transpose(self.v))


def _fix_phases(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate paired singular vectors so each u column's largest-magnitude
    entry is real and positive; unpaired columns/rows are fixed alone.

    Pins down the per-slice unitary freedom so factorizations are
    reproducible; the product u @ diag(s) @ vt is unchanged.
    """
    u = u.copy()
    vt = vt.copy()
    k = min(u.shape[1], vt.shape[0])
    for i in range(u.shape[1]):
        col = u[:, i]
        piv = col[np.argmax(np.abs(col))]
        mag = np.abs(piv)
        if mag == 0.0:
            continue
        c = np.conj(piv) / mag
        u[:, i] = col * c
        if i < k:
            vt[i, :] = vt[i, :] * np.conj(c)
    for i in range(k, vt.shape[0]):
        row = vt[i, :]
        piv = row[np.argmax(np.abs(row))]
        mag = np.abs(piv)
        if mag > 0.0:
            vt[i, :] = row * (np.conj(piv) / mag)
    return u, vt


def _half_spectrum_svd(x: np.ndarray):
    """Per-slice SVDs of the half spectrum of `x`.

    Returns (uf, sf, vtf) with shapes (n1, n1, h), (h, kappa), (n2, n2, h);
    self-conjugate slices go through the real SVD path so the assembled
    factors are exactly real after the inverse transform.
    """
    n1, n2, n3 = x.shape
    xf = _rfft(x)
    h = xf.shape[2]
    uf = np.empty((n1, n1, h), dtype=np.complex128)
    vtf = np.empty((n2, n2, h), dtype=np.complex128)
    sf = np.empty((h, min(n1, n2)))
    for j in range(h):
        mat = xf[:, :, j].real if _real_slice(j, n3) else xf[:, :, j]
        u, s, vt = np.linalg.svd(mat, full_matrices=True)
        u, vt = _fix_phases(u, vt)
        uf[:, :, j] = u
        vtf[:, :, j] = vt
        sf[j] = s
    return uf, sf, vtf


def tsvd(x: np.ndarray) -> TsvdFactors:
    """t-SVD factorization x = u * s * v^*.

    Computed by independent SVDs of the Fourier slices followed by the
    inverse transform.  Per-slice singular values are each sorted
    descending, so the first-slice diagonal of s (their mean across the
    full spectrum) is nonnegative and nonincreasing.

    The all-zero tensor gets identity u, v and zero s.
    """
    x = as_tensor3(x)
    n1, n2, n3 = x.shape
    if not x.any():
        return TsvdFactors(
            u=identity_tensor(n1, n3), s=np.zeros((n1, n2, n3)), v=identity_tensor(n2, n3)
        )
    uf, sf, vtf = _half_spectrum_svd(x)
    k = min(n1, n2)
    sf_embed = np.zeros((n1, n2, sf.shape[0]), dtype=np.complex128)
    sf_embed[np.arange(k), np.arange(k), :] = sf.T
    u = _irfft(uf, n3)
    s = _irfft(sf_embed, n3)
    v = _irfft(vtf.conj().transpose(1, 0, 2), n3)
    return TsvdFactors(u=u, s=s, v=v)


def _half_spectrum_svals(x: np.ndarray) -> np.ndarray:
    """Descending singular values of each half-spectrum slice, shape (h, kappa)."""
    xf = _rfft(x)
    return np.linalg.svd(xf.transpose(2, 0, 1), compute_uv=False)


def _mean_spectrum(x: np.ndarray) -> np.ndarray:
    """First-frontal-slice diagonal of the t-SVD middle factor.

    Equals the mean over all n3 Fourier slices of the sorted per-slice
    singular values, evaluated on the half spectrum with multiplicities.
    """
    sv = _half_spectrum_svals(x)
    w = _half_weights(x.shape[2])
    return (w @ sv) / x.shape[2]


def tubal_rank(x: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular tubes whose first-slice value exceeds tol * largest."""
    x = as_tensor3(x)
    spec = _mean_spectrum(x)
    if spec.size == 0 or spec[0] == 0.0:
        return 0
    return int(np.count_nonzero(spec > tol * spec[0]))


def average_rank(x: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> Fraction:
    """Rank of the block-diagonal Fourier matrix divided by n3, as a Fraction.

    Per-slice ranks use a threshold relative to the largest singular
    value across all slices.
    """
    x = as_tensor3(x)
    n3 = x.shape[2]
    sv = _half_spectrum_svals(x)
    top = sv.max(initial=0.0)
    if top == 0.0:
        return Fraction(0)
    counts = (sv > tol * top).sum(axis=1)
    total = int(np.rint(_half_weights(n3) @ counts))
    return Fraction(total, n3)


def tnn(x: np.ndarray) -> float:
    """Tensor nuclear norm: sum of the first-slice diagonal of the t-SVD
    middle factor, equal to the mean over Fourier slices of the slice
    nuclear norms."""
    x = as_tensor3(x)
    sv = _half_spectrum_svals(x)
    return float(_half_weights(x.shape[2]) @ sv.sum(axis=1) / x.shape[2])


def fro_norm(x: np.ndarray) -> float:
    """Frobenius norm: sqrt of the sum of squared entries."""
    return float(np.linalg.norm(as_tensor3(x).ravel()))


# ---------------------------------------------------------------------------
# spectral truncation and index restriction


def _select_components(x: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Sum of the selected rank-1 tubal components of x, via the half spectrum."""
    n1, n2, n3 = x.shape
    if indices.size == 0:
        return np.zeros_like(x)
    uf, sf, vtf = _half_spectrum_svd(x)
    picked = np.einsum(
        "ijk,kj,jlk->ilk",
        uf[:, indices, :],
        sf[:, indices],
        vtf[indices, :, :],
    )
    return _irfft(picked, n3)


def truncate(x: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Split x into its best tubal-rank-r approximation and the residual.

    Returns ``(head, tail)`` where head keeps the r leading singular
    tubes and ``tail = x - head``.
    """
    x = as_tensor3(x)
    kappa = min(x.shape[0], x.shape[1])
    if not 0 <= r <= kappa:
        raise ValueError(f"truncation rank {r} outside [0, {kappa}]")
    head = _select_components(x, np.arange(r))
    return head, x - head


def _validate_index_set(indices: Sequence[int], kappa: int) -> np.ndarray:
    idx = np.asarray(sorted(int(i) for i in indices), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= kappa):
        raise ValueError(f"index set entries must lie in [0, {kappa})")
    if np.unique(idx).size != idx.size:
        raise ValueError("index set entries must be distinct")
    return idx


def complement_indices(indices: Sequence[int], kappa: int) -> tuple[int, ...]:
    """Complement of a 0-based index set within range(kappa)."""
    idx = set(_validate_index_set(indices, kappa).tolist())
    return tuple(i for i in range(kappa) if i not in idx)


def restrict(x: np.ndarray, indices: Sequence[int]) -> np.ndarray:
    """Sum of the singular-tube components of x selected by a 0-based index set.

    ``restrict(x, g) + restrict(x, complement_indices(g, kappa))``
    reconstructs x.
    """
    x = as_tensor3(x)
    kappa = min(x.shape[0], x.shape[1])
    idx = _validate_index_set(indices, kappa)
    return _select_components(x, idx)
