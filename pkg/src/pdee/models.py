"""Langevin model descriptions: dX = f dt + g o dW + h o dB^H.

A model bundles the three coefficient fields with their analytic x-derivatives
and is the single source of truth for both the Monte Carlo integrator and the
density-equation construction. The GWN integral is Stratonovich, the FGN
integral is the symmetric pathwise one (H >= 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable


class ModelClass(Enum):
    PURE_GWN = "pure_gwn"                      # h = 0
    PURE_FGN = "pure_fgn"                      # f = g = 0, autonomous h
    LINEAR_TV = "linear_tv"                    # A_t x, B_t x, C_t x
    NONLINEAR_COMMUTATIVE = "nonlinear_commutative"  # autonomous f, g, h


@dataclass(frozen=True)
class Field:
    """Scalar field of (t, x) with analytic first and second x-derivatives.

    Callables must broadcast over array x. ``time_dependent=False`` marks
    fields that ignore t, which lets the solvers cache coefficient arrays.
    """

    value: Callable
    dx: Callable
    dxx: Callable
    time_dependent: bool = True

    @staticmethod
    def zero() -> "Field":
        return Field(lambda t, x: 0.0 * x, lambda t, x: 0.0 * x,
                     lambda t, x: 0.0 * x, time_dependent=False)

    @staticmethod
    def autonomous(value, dx, dxx) -> "Field":
        return Field(lambda t, x: value(x), lambda t, x: dx(x),
                     lambda t, x: dxx(x), time_dependent=False)


@dataclass(frozen=True)
class TimeCoefficient:
    """Scalar function of t for the linear time-varying class.

    ``form`` tags the closed-form families ("constant", c) and
    ("power_law", c, d) for which the memory integral has an exact value.
    """

    fn: Callable[[float], float]
    form: tuple | None = None

    @staticmethod
    def constant(c: float) -> "TimeCoefficient":
        return TimeCoefficient(fn=lambda t: c, form=("constant", float(c)))

    @staticmethod
    def power_law(c: float, d: float) -> "TimeCoefficient":
        return TimeCoefficient(fn=lambda t: c * t ** d, form=("power_law", float(c), float(d)))


def _is_zero_field(fld: Field) -> bool:
    return fld.value(0.0, 1.234) == 0.0 and fld.value(0.7, -2.5) == 0.0


@dataclass(frozen=True)
class SdeModel:
    kind: ModelClass
    x0: float
    hurst: float
    f: Field
    g: Field
    h: Field
    A: TimeCoefficient | None = None
    B: TimeCoefficient | None = None
    C: TimeCoefficient | None = None

    def __post_init__(self):
        if not 0.5 <= self.hurst < 1.0:
            raise ValueError(f"Hurst parameter must satisfy 0.5 <= H < 1, got {self.hurst}")
        if self.kind is ModelClass.LINEAR_TV:
            if self.A is None or self.B is None or self.C is None:
                raise ValueError("linear time-varying model requires A, B, C")
        elif self.A is not None or self.B is not None or self.C is not None:
            raise ValueError(f"A, B, C only apply to {ModelClass.LINEAR_TV}")
        if self.kind is ModelClass.PURE_GWN and not _is_zero_field(self.h):
            raise ValueError("pure-GWN model must have h = 0")
        if self.kind is ModelClass.PURE_FGN and not (
            _is_zero_field(self.f) and _is_zero_field(self.g)
        ):
            raise ValueError("pure-FGN model must have f = g = 0")
        if self.kind in (ModelClass.PURE_FGN, ModelClass.NONLINEAR_COMMUTATIVE):
            for name in ("f", "g", "h"):
                if getattr(self, name).time_dependent:
                    raise ValueError(
                        f"{self.kind.value} model requires autonomous coefficients; "
                        f"{name} is time-dependent"
                    )

    # -- constructors -----------------------------------------------------

    @staticmethod
    def pure_gwn(f: Field, g: Field, x0: float) -> "SdeModel":
        return SdeModel(kind=ModelClass.PURE_GWN, x0=x0, hurst=0.5,
                        f=f, g=g, h=Field.zero())

    @staticmethod
    def pure_fgn(h: Field, x0: float, hurst: float) -> "SdeModel":
        return SdeModel(kind=ModelClass.PURE_FGN, x0=x0, hurst=hurst,
                        f=Field.zero(), g=Field.zero(), h=h)

    @staticmethod
    def linear_tv(A: TimeCoefficient, B: TimeCoefficient, C: TimeCoefficient,
                  x0: float, hurst: float) -> "SdeModel":
        def lin(coef):
            return Field(lambda t, x: coef.fn(t) * x,
                         lambda t, x: coef.fn(t) + 0.0 * x,
                         lambda t, x: 0.0 * x)
        return SdeModel(kind=ModelClass.LINEAR_TV, x0=x0, hurst=hurst,
                        f=lin(A), g=lin(B), h=lin(C), A=A, B=B, C=C)

    @staticmethod
    def nonlinear_commutative(f: Field, g: Field, h: Field,
                              x0: float, hurst: float) -> "SdeModel":
        return SdeModel(kind=ModelClass.NONLINEAR_COMMUTATIVE, x0=x0, hurst=hurst,
                        f=f, g=g, h=h)
