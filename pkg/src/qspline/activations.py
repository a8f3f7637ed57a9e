"""Target activation functions and the min-max scaling into [0, 1]."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError

ACTIVATIONS = ("sigmoid", "tanh", "relu", "elu")


@dataclass(frozen=True)
class ActivationKind:
    tag: str
    elu_alpha: float = 1.0

    def __post_init__(self):
        if self.tag not in ACTIVATIONS:
            raise InvalidInputError(f"unknown activation {self.tag!r}; choose from {ACTIVATIONS}")

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return self.tag


def as_activation(kind):
    return kind if isinstance(kind, ActivationKind) else ActivationKind(str(kind))


def evaluate(kind, x):
    kind = as_activation(kind)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if kind.tag == "sigmoid":
        # exp(-|x|) never overflows
        ex = np.exp(-np.abs(x))
        out = np.where(x >= 0, 1.0 / (1.0 + ex), ex / (1.0 + ex))
    elif kind.tag == "tanh":
        out = np.tanh(x)
    elif kind.tag == "relu":
        out = np.maximum(x, 0.0)
    else:
        out = np.where(x >= 0, x, kind.elu_alpha * np.expm1(np.minimum(x, 0.0)))
    return float(out) if scalar else out


@dataclass(frozen=True)
class Scaler:
    """Affine map sending ``[f_min, f_max]`` onto ``[0, 1]``."""

    f_min: float
    f_max: float

    def __post_init__(self):
        if not (np.isfinite(self.f_min) and np.isfinite(self.f_max)):
            raise InvalidInputError("scaler bounds must be finite")
        if not self.f_max > self.f_min:
            raise InvalidInputError("function is constant over the domain; cannot scale")

    @property
    def span(self):
        return self.f_max - self.f_min

    def apply(self, f):
        return (np.asarray(f, dtype=float) - self.f_min) / self.span

    def invert(self, g):
        return np.asarray(g, dtype=float) * self.span + self.f_min

    def wrap(self, func):
        """``func`` composed with :meth:`apply`."""
        return lambda x: self.apply(func(x))


def fit_scaler(func, domain=(-1.0, 1.0), n_points=1000):
    """Min-max bounds of ``func`` over a dense grid of the closed domain."""
    if isinstance(func, (str, ActivationKind)):
        func = as_activation(func)
    a, b = domain
    if not a < b:
        raise InvalidInputError(f"invalid domain {domain}")
    values = np.asarray(func(np.linspace(a, b, n_points)), dtype=float)
    return Scaler(float(values.min()), float(values.max()))
