"""Minimal MLP substrate: forward pass, exact manual backprop, Adam, soft updates.

Every learnable object in the package (selection net, action net, both
critics) is a plain fully connected ReLU network over these primitives.
All functions are pure: parameters and optimizer state go in, updated
copies come out.  Default arithmetic is float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Shapes or settings that can never work (caller bug, not data)."""


class NumericalError(FloatingPointError):
    """Non-finite values encountered where finite arithmetic is required."""


@dataclass
class ParamSet:
    """Per-layer weight matrices ``(fan_in, fan_out)`` and bias vectors."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.biases):
            raise ConfigurationError("weights and biases must pair up per layer")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
                raise ConfigurationError(f"layer {k}: weight {w.shape} / bias {b.shape} mismatch")
            if k > 0 and self.weights[k - 1].shape[1] != w.shape[0]:
                raise ConfigurationError(
                    f"layer {k}: input dim {w.shape[0]} != previous output "
                    f"dim {self.weights[k - 1].shape[1]}"
                )

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def dtype(self) -> np.dtype:
        return self.weights[0].dtype

    def copy(self) -> "ParamSet":
        return ParamSet([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )

    def flat(self) -> np.ndarray:
        """All entries as one vector (weights then bias, layer by layer)."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def with_flat(self, vec: np.ndarray) -> "ParamSet":
        """Rebuild a ParamSet of this shape from a flat vector."""
        out_w, out_b = [], []
        i = 0
        for w, b in zip(self.weights, self.biases):
            out_w.append(vec[i : i + w.size].reshape(w.shape).astype(w.dtype))
            i += w.size
            out_b.append(vec[i : i + b.size].reshape(b.shape).astype(b.dtype))
            i += b.size
        if i != vec.size:
            raise ConfigurationError("flat vector length does not match parameter count")
        return ParamSet(out_w, out_b)


# GradSet is shape-congruent with its ParamSet; reuse the container.
GradSet = ParamSet


def init_params(
    sizes: tuple[int, ...] | list[int],
    rng: np.random.Generator,
    dtype: np.dtype | str = np.float64,
) -> ParamSet:
    """Uniform fan-in init: W ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero."""
    dtype = np.dtype(dtype)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return ParamSet(weights, biases)


def zeros_like_params(params: ParamSet) -> ParamSet:
    return ParamSet(
        [np.zeros_like(w) for w in params.weights],
        [np.zeros_like(b) for b in params.biases],
    )


def _as_batch(x: np.ndarray, in_dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != in_dim:
        raise ConfigurationError(f"input shape {x.shape} incompatible with in_dim {in_dim}")
    return x, single


@dataclass
class ForwardCache:
    """Activations needed for the backward pass."""

    inputs: list[np.ndarray] = field(default_factory=list)  # layer inputs, post-ReLU
    masks: list[np.ndarray] = field(default_factory=list)  # ReLU active masks, hidden layers
    output: np.ndarray | None = None
    single: bool = False


def mlp_forward(params: ParamSet, x: np.ndarray) -> np.ndarray:
    """ReLU hidden layers, linear output.  Accepts a vector or a batch."""
    return _forward(params, x, None)


def forward_cached(params: ParamSet, x: np.ndarray) -> ForwardCache:
    """Forward pass keeping intermediates for :func:`backward_from_cache`."""
    cache = ForwardCache()
    cache.output = _forward(params, x, cache)
    return cache


def _forward(params: ParamSet, x: np.ndarray, cache: ForwardCache | None) -> np.ndarray:
    h, single = _as_batch(x, params.in_dim)
    h = h.astype(params.dtype, copy=False)
    if cache is not None:
        cache.single = single
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        if cache is not None:
            cache.inputs.append(h)
        z = h @ w + b
        if not np.isfinite(z).all():
            raise NumericalError(f"non-finite activation in layer {k}")
        if k < last:
            mask = z > 0.0
            h = np.where(mask, z, 0.0)
            if cache is not None:
                cache.masks.append(mask)
        else:
            h = z
    return h[0] if single else h


def backward_from_cache(
    params: ParamSet,
    cache: ForwardCache,
    upstream: np.ndarray,
    with_param_grads: bool = True,
) -> tuple[GradSet | None, np.ndarray]:
    """Exact gradients of ``sum(upstream * output)`` from a cached forward pass.

    Returns per-parameter gradients (summed over the batch) and the gradient
    with respect to the network input.  ``with_param_grads=False`` skips the
    weight-gradient matmuls when only the input gradient is needed.
    """
    delta, single_up = _as_batch(upstream, params.out_dim)
    delta = delta.astype(params.dtype, copy=False)
    if cache.single != single_up and delta.shape[0] != cache.inputs[0].shape[0]:
        raise ConfigurationError("upstream batch size does not match cached forward")
    grad_w: list[np.ndarray] = []
    grad_b: list[np.ndarray] = []
    for k in range(len(params.weights) - 1, -1, -1):
        if with_param_grads:
            grad_w.append(cache.inputs[k].T @ delta)
            grad_b.append(delta.sum(axis=0))
        delta = delta @ params.weights[k].T
        if k > 0:
            delta = np.where(cache.masks[k - 1], delta, 0.0)
    grads = None
    if with_param_grads:
        grads = GradSet(grad_w[::-1], grad_b[::-1])
        if not grads.all_finite():
            raise NumericalError("non-finite gradient in backward pass")
    return grads, delta[0] if cache.single else delta


def backprop(
    params: ParamSet, x: np.ndarray, upstream: np.ndarray
) -> tuple[GradSet, np.ndarray]:
    """Forward then backward: gradients of ``upstream . output`` w.r.t. params and input."""
    cache = forward_cached(params, x)
    grads, input_grad = backward_from_cache(params, cache, upstream)
    assert grads is not None
    return grads, input_grad


@dataclass
class AdamState:
    """Adaptive-moment accumulators, shape-congruent with the owning ParamSet."""

    m: ParamSet
    v: ParamSet
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, params: ParamSet, **kwargs) -> "AdamState":
        return cls(m=zeros_like_params(params), v=zeros_like_params(params), **kwargs)

    def copy(self) -> "AdamState":
        return AdamState(self.m.copy(), self.v.copy(), self.step, self.beta1, self.beta2, self.eps)


def adam_step(
    state: AdamState, params: ParamSet, grads: GradSet, lr: float
) -> tuple[ParamSet, AdamState]:
    """One bias-corrected adaptive-moment update; returns new params and state.

    Non-finite gradients reject the update.
    """
    if not grads.all_finite():
        raise NumericalError("adam_step: non-finite gradient, update rejected")
    t = state.step + 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    new_w, new_b, m_w, m_b, v_w, v_b = [], [], [], [], [], []
    for p, g, m, v, out_p, out_m, out_v in (
        (params.weights, grads.weights, state.m.weights, state.v.weights, new_w, m_w, v_w),
        (params.biases, grads.biases, state.m.biases, state.v.biases, new_b, m_b, v_b),
    ):
        for pk, gk, mk, vk in zip(p, g, m, v):
            mk = b1 * mk + (1.0 - b1) * gk
            vk = b2 * vk + (1.0 - b2) * gk * gk
            out_m.append(mk)
            out_v.append(vk)
            out_p.append(pk - lr * (mk / c1) / (np.sqrt(vk / c2) + eps))
    new_state = AdamState(ParamSet(m_w, m_b), ParamSet(v_w, v_b), t, b1, b2, eps)
    return ParamSet(new_w, new_b), new_state


def soft_update(target: ParamSet, online: ParamSet, tau: float) -> ParamSet:
    """Exponential-moving-average tracking: entry <- (1-tau)*target + tau*online."""
    if target.sizes != online.sizes:
        raise ConfigurationError("soft_update: parameter shapes differ")
    if not 0.0 <= tau <= 1.0:
        raise ConfigurationError(f"soft_update: tau={tau} outside [0, 1]")
    return ParamSet(
        [(1.0 - tau) * tw + tau * ow for tw, ow in zip(target.weights, online.weights)],
        [(1.0 - tau) * tb + tau * ob for tb, ob in zip(target.biases, online.biases)],
    )
