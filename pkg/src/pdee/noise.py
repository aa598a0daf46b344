"""Fractional Gaussian noise statistics and exact-in-distribution path synthesis.

Fractional Brownian motion B^H is the centered Gaussian process with

    E[B^H_t B^H_s] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2,

H in [1/2, 1). Its increments over a uniform grid form fractional Gaussian
noise (FGN), a stationary sequence synthesized here by circulant embedding
(Davies & Harte 1987; Dieker 2004), which is exact in distribution and
O(n log n) per path. A dense Cholesky factorization of the Toeplitz
covariance is the fallback if the embedding is indefinite.

Paths are reproducible independently of any parallel scheduling: path i
always draws from the counter-offset substream ``Philox(seed).jumped(i)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

__all__ = [
    "NoiseSpec",
    "PathEnsemble",
    "EmbeddingError",
    "fgn_autocorrelation",
    "spectral_density",
    "fbm_covariance",
    "fgn_increment_autocovariance",
    "generate_paths",
    "save_ensemble",
    "load_ensemble",
]

_EIG_TOL = 1e-10
_BLOCK = 4096


class EmbeddingError(RuntimeError):
    """Circulant embedding indefinite and the dense fallback failed."""


def _check_hurst(H: float) -> float:
    if not 0.5 <= H < 1.0:
        raise ValueError(f"Hurst parameter must satisfy 0.5 <= H < 1, got {H}")
    return float(H)


def fgn_autocorrelation(tau: float, H: float) -> float:
    """Regular part 2H(2H-1)|tau|^{2H-2} of the FGN autocorrelation.

    The full autocorrelation carries an additional 2H|tau|^{2H-1} delta(tau)
    term; that singular component is analytic and cannot be represented
    pointwise, so tau = 0 raises and callers must treat it separately.
    """
    _check_hurst(H)
    if tau == 0:
        raise ValueError("tau = 0 lies on the Dirac component; no pointwise value")
    return 2.0 * H * (2.0 * H - 1.0) * abs(tau) ** (2.0 * H - 2.0)


def spectral_density(omega: float, H: float) -> float:
    """One-sided power-law spectrum Gamma(2H+1) sin(pi H)/pi * |omega|^{1-2H}."""
    _check_hurst(H)
    if omega == 0.0:
        if H > 0.5:
            raise ValueError("spectral density diverges at omega = 0 for H > 1/2")
        return 1.0 / np.pi
    return _gamma(2.0 * H + 1.0) * np.sin(H * np.pi) / np.pi * abs(omega) ** (1.0 - 2.0 * H)


def fbm_covariance(t: float, s: float, H: float) -> float:
    """E[B^H_t B^H_s] for t, s >= 0."""
    _check_hurst(H)
    if t < 0 or s < 0:
        raise ValueError("fBm covariance is defined for nonnegative times")
    return 0.5 * (t ** (2 * H) + s ** (2 * H) - abs(t - s) ** (2 * H))


def fgn_increment_autocovariance(lag: int, dt: float, H: float) -> float:
    """Exact autocovariance of grid increments, gamma(l) for l = |i - j|."""
    _check_hurst(H)
    k = abs(int(lag))
    return 0.5 * dt ** (2 * H) * (
        (k + 1.0) ** (2 * H) - 2.0 * k ** (2 * H) + abs(k - 1.0) ** (2 * H)
    )


@dataclass(frozen=True)
class NoiseSpec:
    """Simulation grid and seed for one ensemble of driving increments."""

    H: float
    dt: float
    n_steps: int
    n_paths: int
    seed: int

    def __post_init__(self):
        _check_hurst(self.H)
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1 or self.n_paths < 1:
            raise ValueError("n_steps and n_paths must be >= 1")


@dataclass(frozen=True)
class PathEnsemble:
    """Per-path increments; immutable after construction, safe to share."""

    spec: NoiseSpec
    increments: np.ndarray  # [n_paths, n_steps], increment over each step
    kind: str               # "fbm" or "bm"

    @property
    def times(self) -> np.ndarray:
        return self.spec.dt * np.arange(self.spec.n_steps + 1)

    def levels(self) -> np.ndarray:
        """Running sums B_t on the grid, with B_0 = 0 prepended."""
        out = np.zeros((self.spec.n_paths, self.spec.n_steps + 1))
        np.cumsum(self.increments, axis=1, out=out[:, 1:])
        return out


def _circulant_eigenvalues(n: int, H: float) -> np.ndarray:
    gam = np.array([fgn_increment_autocovariance(k, 1.0, H) for k in range(n + 1)])
    row = np.concatenate([gam, gam[-2:0:-1]])  # length 2n
    return np.fft.fft(row).real


def _substream(seed: int, channel: int, path: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed, spawn_key=(channel,)).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key).jumped(path))


def generate_paths(spec: NoiseSpec, kind: str = "fbm") -> PathEnsemble:
    """Synthesize an increment ensemble, exact in distribution.

    kind="fbm": stationary FGN increments whose covariance matches
    ``fgn_increment_autocovariance`` on the grid. kind="bm": independent
    N(0, dt) increments. Deterministic for a fixed seed.
    """
    if kind not in ("fbm", "bm"):
        raise ValueError(f"kind must be 'fbm' or 'bm', got {kind!r}")
    n, npth = spec.n_steps, spec.n_paths
    out = np.empty((npth, n))

    if kind == "bm":
        sdt = np.sqrt(spec.dt)
        for i0 in range(0, npth, _BLOCK):
            i1 = min(i0 + _BLOCK, npth)
            for i in range(i0, i1):
                out[i] = _substream(spec.seed, 0, i).standard_normal(n)
            out[i0:i1] *= sdt
        return PathEnsemble(spec=spec, increments=out, kind="bm")

    m = 2 * n
    eig = _circulant_eigenvalues(n, spec.H)
    scale = spec.dt ** spec.H
    if eig.min() >= -_EIG_TOL * eig.max():
        coeff = np.sqrt(np.clip(eig, 0.0, None) / m)
        for i0 in range(0, npth, _BLOCK):
            i1 = min(i0 + _BLOCK, npth)
            z = np.empty((i1 - i0, m), dtype=complex)
            for i in range(i0, i1):
                u = _substream(spec.seed, 1, i).standard_normal(m)
                zi = z[i - i0]
                zi[0] = u[0]
                zi[n] = u[1]
                re = u[2::2]
                im = u[3::2]
                zi[1:n] = (re + 1j * im) / np.sqrt(2.0)
                zi[n + 1:] = np.conj(zi[1:n][::-1])
            block = m * np.fft.ifft(coeff[None, :] * z, axis=1).real[:, :n]
            out[i0:i1] = scale * block
        return PathEnsemble(spec=spec, increments=out, kind="fbm")

    # indefinite embedding: dense factorization of the Toeplitz covariance
    idx = np.arange(n)
    cov = np.empty((n, n))
    for k in range(n):
        cov[idx[: n - k], idx[: n - k] + k] = fgn_increment_autocovariance(k, 1.0, spec.H)
        cov[idx[: n - k] + k, idx[: n - k]] = cov[idx[: n - k], idx[: n - k] + k]
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise EmbeddingError(
            f"circulant embedding indefinite (min eig {eig.min():.3e}) and the dense "
            f"covariance is not positive definite; refusing to truncate eigenvalues "
            f"beyond tolerance {_EIG_TOL:g}"
        ) from exc
    for i in range(npth):
        out[i] = scale * (chol @ _substream(spec.seed, 1, i).standard_normal(n))
    return PathEnsemble(spec=spec, increments=out, kind="fbm")


_MAGIC = b"FPE1"


def save_ensemble(path, ens: PathEnsemble) -> None:
    """Binary dump: magic "FPE1", then H, dt (f64), n_steps, n_paths, seed (i64),
    then row-major little-endian float64 increments."""
    spec = ens.spec
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<ddqqq", spec.H, spec.dt, spec.n_steps, spec.n_paths, spec.seed))
        fh.write(np.ascontiguousarray(ens.increments, dtype="<f8").tobytes())


def load_ensemble(path, kind: str = "fbm") -> PathEnsemble:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        H, dt, n_steps, n_paths, seed = struct.unpack("<ddqqq", fh.read(40))
        data = np.frombuffer(fh.read(8 * n_steps * n_paths), dtype="<f8")
    spec = NoiseSpec(H=H, dt=dt, n_steps=int(n_steps), n_paths=int(n_paths), seed=int(seed))
    return PathEnsemble(spec=spec, increments=data.reshape(n_paths, n_steps).copy(), kind=kind)
