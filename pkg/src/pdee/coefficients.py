"""Drift/diffusion fields of the density evolution equation.

Every supported model class reduces to

    p_t = -d/dx [ D1(x,t) p ] + d^2/dx^2 [ D2(x,t) p ],

with the four coefficient families

  FPK_STRATONOVICH       D1 = f + g g_x / 2,               D2 = g^2 / 2
  FGN_ONLY               D1 = H t^{2H-1} h' h,              D2 = H t^{2H-1} h^2
  LINEAR_TV_THEOREM1     D1 = (A_t + B_t^2/2 + Chat_t) x,   D2 = (B_t^2/2 + Chat_t) x^2
  COMMUTATIVE_THEOREM2   D1 = f + g g'/2 + H t^{2H-1} h h', D2 = g^2/2 + H t^{2H-1} h^2

where Chat_t = C_t * int_0^t phi(t,r) C_r dr with the memory kernel
phi(t,s) = H(2H-1)|t-s|^{2H-2}. Spatial derivatives of D1, D2 are assembled
from the model's analytic derivatives, never by numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as _gamma

from .models import Field, ModelClass, SdeModel, TimeCoefficient

__all__ = [
    "Provenance",
    "PdeeCoefficients",
    "CommutativityReport",
    "phi_kernel",
    "c_hat",
    "build_pdee",
    "check_commutativity",
]


class Provenance(Enum):
    FPK_STRATONOVICH = "fpk_stratonovich"
    FGN_ONLY = "fgn_only"
    LINEAR_TV_THEOREM1 = "linear_tv_theorem1"
    COMMUTATIVE_THEOREM2 = "commutative_theorem2"


def phi_kernel(t: float, s: float, H: float) -> float:
    """Memory kernel H(2H-1)|t-s|^{2H-2}; integrable singularity at t = s."""
    if not 0.5 <= H < 1.0:
        raise ValueError(f"Hurst parameter must satisfy 0.5 <= H < 1, got {H}")
    if t == s:
        raise ValueError("phi_kernel has an integrable singularity at t = s; "
                         "integrate it with c_hat instead of sampling pointwise")
    return H * (2.0 * H - 1.0) * abs(t - s) ** (2.0 * H - 2.0)


def c_hat(t: float, C: TimeCoefficient, H: float, rtol: float = 1e-8) -> float:
    """Memory coefficient Chat_t = C_t * int_0^t phi(t,r) C_r dr.

    Tagged coefficients use the closed forms

        C = c:          c^2 H t^{2H-1}
        C = c t^d:      c^2 t^{2d+2H-1} H Gamma(2H) Gamma(1+d) / Gamma(d+2H)

    otherwise the substitution u = (t-r)^{2H-1} removes the kernel
    singularity exactly and the regular integrand is integrated by adaptive
    Gauss-Kronrod to relative accuracy below ``rtol``.
    """
    if not 0.5 <= H < 1.0:
        raise ValueError(f"Hurst parameter must satisfy 0.5 <= H < 1, got {H}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if H == 0.5 or t == 0.0:
        return 0.0
    if C.form is not None:
        if C.form[0] == "constant":
            c = C.form[1]
            return c * c * H * t ** (2 * H - 1)
        if C.form[0] == "power_law":
            _, c, d = C.form
            return (c * c * t ** (2 * d + 2 * H - 1) * H
                    * _gamma(2 * H) * _gamma(1 + d) / _gamma(d + 2 * H))
        raise ValueError(f"unknown closed-form tag {C.form[0]!r}")
    # int_0^t (t-r)^{2H-2} C(r) dr  ==  int_0^{t^{2H-1}} C(t - u^{1/(2H-1)}) du / (2H-1)
    beta = 2.0 * H - 1.0
    u_max = t ** beta

    def integrand(u):
        return C.fn(t - u ** (1.0 / beta))

    val, _ = quad(integrand, 0.0, u_max, epsabs=0.0, epsrel=min(rtol, 1e-10), limit=200)
    return C.fn(t) * H * val


@dataclass(frozen=True)
class PdeeCoefficients:
    """Callable coefficient fields D1(x,t), D2(x,t) and their x-derivatives.

    All callables broadcast over array x at scalar t. ``time_dependent=False``
    lets the solvers assemble their operators once.
    """

    d1: Callable
    d1_dx: Callable
    d2: Callable
    d2_dx: Callable
    d2_dxx: Callable
    provenance: Provenance
    t_min: float = 0.0
    time_dependent: bool = True

    def advection(self, x, t):
        """Effective advection velocity D1 - (D2)_x of the conservative form."""
        return self.d1(x, t) - self.d2_dx(x, t)


def _fpk_stratonovich(model: SdeModel) -> PdeeCoefficients:
    f, g = model.f, model.g
    return PdeeCoefficients(
        d1=lambda x, t: f.value(t, x) + 0.5 * g.value(t, x) * g.dx(t, x),
        d1_dx=lambda x, t: f.dx(t, x) + 0.5 * (g.dx(t, x) ** 2 + g.value(t, x) * g.dxx(t, x)),
        d2=lambda x, t: 0.5 * g.value(t, x) ** 2,
        d2_dx=lambda x, t: g.value(t, x) * g.dx(t, x),
        d2_dxx=lambda x, t: g.dx(t, x) ** 2 + g.value(t, x) * g.dxx(t, x),
        provenance=Provenance.FPK_STRATONOVICH,
        time_dependent=f.time_dependent or g.time_dependent,
    )


def _memory_weight(H: float):
    return lambda t: H * t ** (2.0 * H - 1.0) if t > 0 else 0.0


def _fgn_only(model: SdeModel) -> PdeeCoefficients:
    h = model.h
    w = _memory_weight(model.hurst)
    return PdeeCoefficients(
        d1=lambda x, t: w(t) * h.dx(t, x) * h.value(t, x),
        d1_dx=lambda x, t: w(t) * (h.dxx(t, x) * h.value(t, x) + h.dx(t, x) ** 2),
        d2=lambda x, t: w(t) * h.value(t, x) ** 2,
        d2_dx=lambda x, t: 2.0 * w(t) * h.value(t, x) * h.dx(t, x),
        d2_dxx=lambda x, t: 2.0 * w(t) * (h.dx(t, x) ** 2 + h.value(t, x) * h.dxx(t, x)),
        provenance=Provenance.FGN_ONLY,
    )


def _linear_tv(model: SdeModel) -> PdeeCoefficients:
    A, B, C, H = model.A, model.B, model.C, model.hurst

    @lru_cache(maxsize=None)
    def chat(t: float) -> float:
        return c_hat(t, C, H)

    def alpha(t):  # drift rate
        return A.fn(t) + 0.5 * B.fn(t) ** 2 + chat(t)

    def beta(t):  # diffusion rate
        return 0.5 * B.fn(t) ** 2 + chat(t)

    return PdeeCoefficients(
        d1=lambda x, t: alpha(t) * x,
        d1_dx=lambda x, t: alpha(t) + 0.0 * x,
        d2=lambda x, t: beta(t) * x * x,
        d2_dx=lambda x, t: 2.0 * beta(t) * x,
        d2_dxx=lambda x, t: 2.0 * beta(t) + 0.0 * x,
        provenance=Provenance.LINEAR_TV_THEOREM1,
    )


def _commutative(model: SdeModel) -> PdeeCoefficients:
    f, g, h = model.f, model.g, model.h
    w = _memory_weight(model.hurst)
    return PdeeCoefficients(
        d1=lambda x, t: (f.value(t, x) + 0.5 * g.value(t, x) * g.dx(t, x)
                         + w(t) * h.value(t, x) * h.dx(t, x)),
        d1_dx=lambda x, t: (f.dx(t, x)
                            + 0.5 * (g.dx(t, x) ** 2 + g.value(t, x) * g.dxx(t, x))
                            + w(t) * (h.dx(t, x) ** 2 + h.value(t, x) * h.dxx(t, x))),
        d2=lambda x, t: 0.5 * g.value(t, x) ** 2 + w(t) * h.value(t, x) ** 2,
        d2_dx=lambda x, t: (g.value(t, x) * g.dx(t, x)
                            + 2.0 * w(t) * h.value(t, x) * h.dx(t, x)),
        d2_dxx=lambda x, t: (g.dx(t, x) ** 2 + g.value(t, x) * g.dxx(t, x)
                             + 2.0 * w(t) * (h.dx(t, x) ** 2 + h.value(t, x) * h.dxx(t, x))),
        provenance=Provenance.COMMUTATIVE_THEOREM2,
    )


@dataclass(frozen=True)
class CommutativityReport:
    max_residual: float
    passed: bool


def check_commutativity(model: SdeModel, grid: np.ndarray, tol: float = 1e-8,
                        t: float = 0.0) -> CommutativityReport:
    """Pairwise Lie-bracket residuals |a b' - b a'| of (f, g, h) on a grid."""
    x = np.asarray(grid, dtype=float)
    fields = [model.f, model.g, model.h]
    vals = [fld.value(t, x) for fld in fields]
    ders = [fld.dx(t, x) for fld in fields]
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            res = np.max(np.abs(vals[i] * ders[j] - vals[j] * ders[i]))
            worst = max(worst, float(res))
    return CommutativityReport(max_residual=worst, passed=worst <= tol)


def build_pdee(model: SdeModel, commutativity_grid: np.ndarray | None = None,
               commutativity_tol: float = 1e-8) -> PdeeCoefficients:
    """Assemble the density-equation coefficients for a classified model.

    Nonlinear mixed models are admitted only when the pairwise commutativity
    residuals on ``commutativity_grid`` stay below ``commutativity_tol``.
    """
    if model.kind is ModelClass.PURE_GWN:
        return _fpk_stratonovich(model)
    if model.kind is ModelClass.PURE_FGN:
        return _fgn_only(model)
    if model.kind is ModelClass.LINEAR_TV:
        return _linear_tv(model)
    if model.kind is ModelClass.NONLINEAR_COMMUTATIVE:
        if commutativity_grid is None:
            commutativity_grid = model.x0 + np.linspace(-1.0, 1.0, 41)
        report = check_commutativity(model, commutativity_grid, commutativity_tol)
        if not report.passed:
            raise ValueError(
                f"coefficients do not commute: max Lie-bracket residual "
                f"{report.max_residual:.3e} exceeds tolerance {commutativity_tol:g}"
            )
        return _commutative(model)
    raise ValueError(f"unknown model class {model.kind}")
