"""Catalog of matrix generator families with known regularity behaviour.

Each entry builds, for a requested truncation dimension, a generator
matrix together with its label and analytically known growth data.  The
``expected`` tag records how the family behaves as the dimension grows:
``holomorphic_in_limit`` families keep a positive criterion margin at
every truncation, ``not_holomorphic_in_limit`` families lose it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, UnknownEntry
from .semigroup import GeneratorSpec, GrowthBound

__all__ = ["ZooEntry", "CATALOG", "build", "entry_names"]

_DIMS = tuple(2 ** k for k in range(3, 10))  # 8 .. 512


@dataclass(frozen=True)
class ZooEntry:
    name: str
    builder: Callable[..., np.ndarray] = field(repr=False)
    expected: Optional[str]
    notes: str = ""
    growth: Callable[[np.ndarray, dict], Optional[GrowthBound]] = field(
        default=lambda A, params: None, repr=False)


def _diag_ray(dim: int, phi: float = np.pi / 4.0) -> np.ndarray:
    if not (0.0 <= phi < np.pi / 2.0):
        raise BadParams(f"diag_ray needs phi in [0, pi/2), got {phi}")
    k = np.arange(1, dim + 1, dtype=float)
    return np.diag(-np.exp(1j * phi) * k)


def _skew_diag(dim: int) -> np.ndarray:
    k = np.arange(1, dim + 1, dtype=float)
    return np.diag(1j * k)


def _jordan(dim: int, lam: complex = -1.0) -> np.ndarray:
    A = np.diag(np.full(dim, complex(lam)))
    A += np.diag(np.ones(dim - 1, dtype=complex), k=1)
    return A


def _tridiag_laplacian(dim: int, h: float = 1.0) -> np.ndarray:
    if h <= 0.0:
        raise BadParams(f"tridiag_laplacian needs h > 0, got {h}")
    A = (np.diag(np.full(dim, -2.0)) + np.diag(np.ones(dim - 1), k=1)
         + np.diag(np.ones(dim - 1), k=-1)).astype(complex)
    return A / h ** 2


def _fourier_symbol(dim: int, symbol: np.ndarray) -> np.ndarray:
    """Circulant matrix with the given Fourier-mode symbol (fft order)."""
    F = np.fft.fft(np.eye(dim), axis=0) / np.sqrt(dim)
    return F.conj().T @ (symbol[:, None] * F)


def _shift_periodic(dim: int, period: float = 2.0 * np.pi) -> np.ndarray:
    if period <= 0.0:
        raise BadParams(f"shift_periodic needs period > 0, got {period}")
    freq = np.fft.fftfreq(dim, d=1.0 / dim)  # integer modes
    omega = 2.0 * np.pi * freq / period
    return _fourier_symbol(dim, 1j * omega)


def _heat_conv(dim: int, period: float = 2.0 * np.pi) -> np.ndarray:
    if period <= 0.0:
        raise BadParams(f"heat_conv needs period > 0, got {period}")
    freq = np.fft.fftfreq(dim, d=1.0 / dim)
    omega = 2.0 * np.pi * freq / period
    return _fourier_symbol(dim, -(omega ** 2) + 0.0j)


def _mult_symbol(dim: int, values=None) -> np.ndarray:
    if values is None:
        raise BadParams("mult_symbol needs params['values'] (diagonal entries)")
    v = np.asarray(values, dtype=complex).reshape(-1)
    if v.size != dim:
        raise BadParams(f"mult_symbol got {v.size} values for dim {dim}")
    return np.diag(v)


def _contraction_growth(A, params) -> GrowthBound:
    return GrowthBound(1.0, 0.0, 1.0)


def _jordan_growth(A, params) -> GrowthBound:
    lam = complex(params.get("lam", -1.0))
    # ||e^{t(lam + N)}||_2 <= e^{t Re lam} e^{t ||N||} with ||N|| = 1.
    return GrowthBound(1.0, lam.real + 1.0, 1.0)


def _mult_growth(A, params) -> GrowthBound:
    return GrowthBound(1.0, float(np.max(np.diag(A).real)), 1.0)


CATALOG: dict[str, ZooEntry] = {
    "diag_ray": ZooEntry(
        "diag_ray", _diag_ray, "holomorphic_in_limit",
        "eigenvalues -e^{i phi} k on a ray inside the right sector",
        _contraction_growth),
    "skew_diag": ZooEntry(
        "skew_diag", _skew_diag, "not_holomorphic_in_limit",
        "group generator i k; isometric at p = 2 (M = 1, omega = 0)",
        _contraction_growth),
    "jordan": ZooEntry(
        "jordan", _jordan, "holomorphic_in_limit",
        "single Jordan block at lam; bounded in the limit (shift plus lam)",
        _jordan_growth),
    "tridiag_laplacian": ZooEntry(
        "tridiag_laplacian", _tridiag_laplacian, "holomorphic_in_limit",
        "Dirichlet second difference scaled by h^-2; self-adjoint <= 0",
        _contraction_growth),
    "shift_periodic": ZooEntry(
        "shift_periodic", _shift_periodic, "not_holomorphic_in_limit",
        "cyclic shift group generator (spectral derivative); unitary group",
        _contraction_growth),
    "heat_conv": ZooEntry(
        "heat_conv", _heat_conv, "holomorphic_in_limit",
        "periodic Gaussian-convolution generator (Fourier symbol -omega^2)",
        _contraction_growth),
    "mult_symbol": ZooEntry(
        "mult_symbol", _mult_symbol, None,
        "diagonal with a user-supplied symbol; behaviour depends on it",
        _mult_growth),
}


def entry_names() -> list[str]:
    return sorted(CATALOG)


def build(name: str, dim: int, params: Optional[dict] = None) -> GeneratorSpec:
    """Instantiate a catalog entry at the requested truncation dimension.

    Dimensions are powers of two in [8, 512]; parameters are forwarded
    to the builder and validated there.
    """
    if name not in CATALOG:
        raise UnknownEntry(f"unknown zoo entry {name!r}; have {entry_names()}")
    if dim not in _DIMS:
        raise BadParams(f"zoo dims are powers of two in [8, 512], got {dim}")
    entry = CATALOG[name]
    params = dict(params or {})
    try:
        A = entry.builder(dim, **params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name}: {exc}") from None
    growth = entry.growth(A, params)
    return GeneratorSpec(matrix=A, label=name, family_index=dim, growth=growth)
