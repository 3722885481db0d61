"""Manufactured solutions with closed-form gradients and sources."""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from ..mfem_core import PermeabilityField

PI = np.pi


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact pressure, its gradient, permeability and the matching source.

    ``velocity = -K grad p`` and ``source = div(velocity)``; the Dirichlet
    data is the pressure itself.
    """

    name: str
    pressure: Callable
    gradient: Callable
    source: Callable
    permeability: PermeabilityField
    blocks: tuple = (2, 2)

    def velocity(self, x, y):
        px, py = self.gradient(x, y)
        kxx, kyy = self.permeability(x, y)
        return -kxx * px, -kyy * py

    @property
    def boundary(self):
        return self.pressure

    def scaled(self, alpha):
        """Same case with every datum multiplied by ``alpha``."""
        p, gr, f = self.pressure, self.gradient, self.source
        return ManufacturedCase(
            name=f"{self.name}*{alpha:g}",
            pressure=lambda x, y: alpha * p(x, y),
            gradient=lambda x, y: tuple(alpha * c for c in gr(x, y)),
            source=lambda x, y: alpha * f(x, y),
            permeability=self.permeability, blocks=self.blocks)


# gaussian bump: p = 1000 x y exp(-10 (x^2 + y^2)), K = I
def _ex1_p(x, y):
    return 1000.0 * x * y * np.exp(-10.0 * (x * x + y * y))


def _ex1_grad(x, y):
    e = 1000.0 * np.exp(-10.0 * (x * x + y * y))
    return y * e * (1.0 - 20.0 * x * x), x * e * (1.0 - 20.0 * y * y)


def _ex1_f(x, y):
    lap = _ex1_p(x, y) * (400.0 * (x * x + y * y) - 120.0)
    return -lap


# heterogeneous: p = sin(pi x) sin(pi y), K = exp(phi) I
def _ex2_phi(x, y):
    return np.cos(4 * PI * x) * np.cos(2 * PI * y) + 3.0 * np.sin(5 * PI * x) * np.cos(3 * PI * y)


def _ex2_dphi(x, y):
    dx = -4 * PI * np.sin(4 * PI * x) * np.cos(2 * PI * y) + 15 * PI * np.cos(5 * PI * x) * np.cos(3 * PI * y)
    dy = -2 * PI * np.cos(4 * PI * x) * np.sin(2 * PI * y) - 9 * PI * np.sin(5 * PI * x) * np.sin(3 * PI * y)
    return dx, dy


def _ex2_k(x, y):
    return np.exp(_ex2_phi(x, y))


def _ex2_p(x, y):
    return np.sin(PI * x) * np.sin(PI * y)


def _ex2_grad(x, y):
    return PI * np.cos(PI * x) * np.sin(PI * y), PI * np.sin(PI * x) * np.cos(PI * y)


def _ex2_f(x, y):
    px, py = _ex2_grad(x, y)
    dx, dy = _ex2_dphi(x, y)
    lap = -2 * PI * PI * _ex2_p(x, y)
    return -_ex2_k(x, y) * (dx * px + dy * py + lap)


# polynomial: p = x (x - 1) y (y - 1), K = I
def _ex3_p(x, y):
    return x * (x - 1.0) * y * (y - 1.0)


def _ex3_grad(x, y):
    return (2 * x - 1.0) * y * (y - 1.0), x * (x - 1.0) * (2 * y - 1.0)


def _ex3_f(x, y):
    return -(2.0 * y * (y - 1.0) + 2.0 * x * (x - 1.0))


def _patch_p(x, y):
    return 1.0 - x + 0.0 * y


def _patch_grad(x, y):
    z = np.zeros(np.broadcast(x, y).shape)
    return z - 1.0, z


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


CASES = {
    "example1": ManufacturedCase("example1", _ex1_p, _ex1_grad, _ex1_f,
                                 PermeabilityField.identity(), blocks=(2, 2)),
    "example2": ManufacturedCase("example2", _ex2_p, _ex2_grad, _ex2_f,
                                 PermeabilityField.scalar(_ex2_k, name="exp-oscillatory"),
                                 blocks=(2, 2)),
    "example3": ManufacturedCase("example3", _ex3_p, _ex3_grad, _ex3_f,
                                 PermeabilityField.identity(), blocks=(3, 3)),
    "patch": ManufacturedCase("patch", _patch_p, _patch_grad, _zero,
                              PermeabilityField.identity(), blocks=(2, 2)),
}


def get_case(name, custom=None):
    """Look up a case by name.

    ``"custom"`` loads ``custom = "package.module:factory"`` where ``factory()``
    returns a :class:`ManufacturedCase`.
    """
    if name == "custom":
        if not custom or ":" not in str(custom):
            raise ConfigurationError("case 'custom' needs a 'custom' entry of the form 'module:factory'")
        mod_name, attr = str(custom).split(":", 1)
        try:
            factory = getattr(importlib.import_module(mod_name), attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigurationError(f"cannot load custom case {custom!r}: {exc}") from exc
        case = factory()
        if not isinstance(case, ManufacturedCase):
            raise ConfigurationError(f"{custom!r} did not return a ManufacturedCase")
        return case
    try:
        return CASES[name]
    except KeyError:
        known = ", ".join(sorted(CASES) + ["custom"])
        raise ConfigurationError(f"unknown case {name!r}; known cases: {known}") from None
