"""Fully connected heading network: tanh hidden layers, ``R_max * tanh`` output.

The flat parameter layout is, for each consecutive layer pair ``(a, b)``,
the ``a x b`` weight matrix in row-major order followed by the ``b`` biases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidArgument

FULL_SHAPE = (102, 200, 200, 50, 3)
DESK_SHAPE = (102, 32, 3)
R_MAX = 500.0


def param_count(shape: Sequence[int]) -> int:
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2 or min(shape) < 1:
        raise InvalidArgument(f"invalid layer shape {shape}")
    return sum(a * b + b for a, b in zip(shape[:-1], shape[1:]))


@dataclass(frozen=True)
class PolicyParams:
    flat: np.ndarray
    shape: tuple = FULL_SHAPE

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        flat = np.asarray(self.flat, dtype=np.float64)
        if flat.shape[-1] != param_count(shape):
            raise InvalidArgument(
                f"parameter vector has length {flat.shape[-1]}, "
                f"shape {shape} needs {param_count(shape)}"
            )
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "flat", flat)

    @classmethod
    def zeros(cls, shape=FULL_SHAPE) -> "PolicyParams":
        return cls(np.zeros(param_count(shape)), tuple(shape))

    def layers(self):
        return unflatten(self.flat, self.shape)


def unflatten(flat: np.ndarray, shape: Sequence[int]):
    """Split ``flat`` (``(..., P)``) into ``[(W (..., a, b), b (..., b)), ...]`` views."""
    layers = []
    pos = 0
    lead = flat.shape[:-1]
    for a, b in zip(shape[:-1], shape[1:]):
        w = flat[..., pos:pos + a * b].reshape(*lead, a, b)
        pos += a * b
        bias = flat[..., pos:pos + b]
        pos += b
        layers.append((w, bias))
    return layers


def init_params(shape: Sequence[int], rng: np.random.Generator, gain: float = 1.0) -> np.ndarray:
    """Glorot-normal weights, zero biases."""
    parts = []
    for a, b in zip(shape[:-1], shape[1:]):
        parts.append((gain * np.sqrt(2.0 / (a + b)) * rng.standard_normal(a * b)))
        parts.append(np.zeros(b))
    return np.concatenate(parts)


def forward_batch(flat: np.ndarray, shape: Sequence[int], obs: np.ndarray,
                  r_max: float = R_MAX) -> np.ndarray:
    """Evaluate many networks at once.

    ``flat`` is ``(E, P)`` and ``obs`` is ``(E, A, in)``; network ``e`` is
    applied to the ``A`` observations of row ``e``. Returns ``(E, A, out)``.
    """
    layers = unflatten(flat, shape)
    h = obs
    for w, b in layers[:-1]:
        h = np.tanh(np.matmul(h, w) + b[..., None, :])
    w, b = layers[-1]
    return r_max * np.tanh(np.matmul(h, w) + b[..., None, :])


def forward(params: PolicyParams, obs, r_max: float = R_MAX) -> np.ndarray:
    """Heading target ``[x_ref, y_ref, z_ref]`` for one observation (or a stack)."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape[-1] != params.shape[0]:
        raise InvalidArgument(
            f"observation length {obs.shape[-1]} does not match input size {params.shape[0]}"
        )
    if params.flat.ndim != 1:
        raise InvalidArgument("forward takes a single parameter vector")
    single = obs.ndim == 1
    x = obs.reshape(1, -1, obs.shape[-1])
    out = forward_batch(params.flat[None, :], params.shape, x, r_max)[0]
    return out[0] if single else out.reshape(*obs.shape[:-1], -1)
