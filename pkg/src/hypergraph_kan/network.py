"""Spline-activation network stack with analytic gradients.

Each KAN layer carries an out_dim x in_dim grid of learnable scalar
activations phi(t) = w_base * silu(t) + w_spline * sum_b c_b B_b(t); output
neuron i is the sum of its row of activations applied to the inputs. The
network front end aggregates raw vertex features with the weighted hop
matrices, embeds them to the working dimension, then applies the layer
stack; the final layer's width is the class count and emits logits.

Forward passes return a cache consumed by `backward`; the cache is tied to
the parameter version so a stale cache (after an optimizer update) is
rejected instead of silently producing wrong gradients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .adjustment import AdjustedStructuralFeatures
from .core import SparseRowMatrix
from .errors import DimensionMismatch, StaleForwardCache
from .splines import BSplineBasis, silu, silu_grad

__all__ = [
    "KanActivation",
    "activation_forward",
    "KanLayer",
    "AffineLayer",
    "KanNetwork",
    "MlpNetwork",
    "aggregate",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass(frozen=True)
class KanActivation:
    """One learnable scalar activation: spline coefficients plus base/spline gains."""

    spline_coeffs: np.ndarray
    w_base: float
    w_spline: float


def activation_forward(a: KanActivation, basis: BSplineBasis, t: float) -> float:
    """w_base * silu(t) + w_spline * sum_b c_b B_b(t), with t clamped for the spline term."""
    values = basis.design_matrix(np.float64(t))
    return float(a.w_base * silu(t) + a.w_spline * (values @ a.spline_coeffs))


class KanLayer:
    """Grid of spline activations mapping in_dim inputs to out_dim sums."""

    def __init__(self, basis: BSplineBasis, coeffs, w_base, w_spline):
        self.basis = basis
        self.coeffs = np.asarray(coeffs, dtype=np.float64)
        self.w_base = np.asarray(w_base, dtype=np.float64)
        self.w_spline = np.asarray(w_spline, dtype=np.float64)
        if self.coeffs.ndim != 3 or self.coeffs.shape[2] != basis.num_basis:
            raise DimensionMismatch(
                f"coeffs must be (out, in, {basis.num_basis}), got {self.coeffs.shape}"
            )
        if self.w_base.shape != self.coeffs.shape[:2] or self.w_spline.shape != self.coeffs.shape[:2]:
            raise DimensionMismatch("w_base/w_spline must match the activation grid shape")

    @property
    def out_dim(self):
        return self.coeffs.shape[0]

    @property
    def in_dim(self):
        return self.coeffs.shape[1]

    @classmethod
    def create(cls, rng: np.random.Generator, in_dim: int, out_dim: int, basis: BSplineBasis):
        nb = basis.num_basis
        coeffs = rng.normal(0.0, 0.1 / np.sqrt(nb), size=(out_dim, in_dim, nb))
        w_base = rng.uniform(-1.0, 1.0, size=(out_dim, in_dim)) / np.sqrt(in_dim)
        w_spline = np.ones((out_dim, in_dim))
        return cls(basis, coeffs, w_base, w_spline)

    def activation_at(self, i: int, j: int) -> KanActivation:
        return KanActivation(self.coeffs[i, j].copy(), float(self.w_base[i, j]), float(self.w_spline[i, j]))

    def forward(self, z: np.ndarray):
        """Batch forward: z is (n, in_dim); returns (out, cache)."""
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[1] != self.in_dim:
            raise DimensionMismatch(f"layer expects (n, {self.in_dim}), got {z.shape}")
        values, derivs = self.basis.design_and_derivative(z)
        n = z.shape[0]
        weighted = self.w_spline[:, :, None] * self.coeffs  # (out, in, nb)
        out = values.reshape(n, -1) @ weighted.reshape(self.out_dim, -1).T
        out += silu(z) @ self.w_base.T
        return out, (z, values, derivs)

    def backward(self, cache, d_out: np.ndarray):
        """Return (d_input, grads) for upstream d_out of shape (n, out_dim)."""
        z, values, derivs = cache
        d_out = np.asarray(d_out, dtype=np.float64)
        # shared contraction over the batch: (out, in, nb)
        t_ib = np.einsum("ni,njb->ijb", d_out, values)
        grads = {
            "w_base": d_out.T @ silu(z),
            "w_spline": np.sum(t_ib * self.coeffs, axis=2),
            "coeffs": t_ib * self.w_spline[:, :, None],
        }
        weighted = self.w_spline[:, :, None] * self.coeffs
        spline_in = np.einsum("ni,ijb->njb", d_out, weighted)
        d_z = np.sum(spline_in * derivs, axis=2)
        d_z += (d_out @ self.w_base) * silu_grad(z)
        return d_z, grads

    def __call__(self, z):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            return self.forward(z[None, :])[0][0]
        return self.forward(z)[0]

    def param_arrays(self):
        return {"coeffs": self.coeffs, "w_base": self.w_base, "w_spline": self.w_spline}


class AffineLayer:
    """Dense layer with an optional fixed silu nonlinearity (the no-KAN stand-in)."""

    def __init__(self, weight, bias, nonlinear: bool):
        self.weight = np.asarray(weight, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.nonlinear = bool(nonlinear)
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise DimensionMismatch("affine layer needs weight (out, in) and bias (out,)")

    @property
    def out_dim(self):
        return self.weight.shape[0]

    @property
    def in_dim(self):
        return self.weight.shape[1]

    @classmethod
    def create(cls, rng: np.random.Generator, in_dim: int, out_dim: int, nonlinear: bool):
        bound = 1.0 / np.sqrt(in_dim)
        weight = rng.uniform(-bound, bound, size=(out_dim, in_dim))
        return cls(weight, np.zeros(out_dim), nonlinear)

    def forward(self, z: np.ndarray):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[1] != self.in_dim:
            raise DimensionMismatch(f"layer expects (n, {self.in_dim}), got {z.shape}")
        pre = z @ self.weight.T + self.bias
        out = silu(pre) if self.nonlinear else pre
        return out, (z, pre)

    def backward(self, cache, d_out: np.ndarray):
        z, pre = cache
        d_pre = d_out * silu_grad(pre) if self.nonlinear else np.asarray(d_out, dtype=np.float64)
        grads = {"weight": d_pre.T @ z, "bias": d_pre.sum(axis=0)}
        return d_pre @ self.weight, grads

    def __call__(self, z):
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            return self.forward(z[None, :])[0][0]
        return self.forward(z)[0]

    def param_arrays(self):
        return {"weight": self.weight, "bias": self.bias}


def _hop_matrices(adj) -> list[SparseRowMatrix]:
    if isinstance(adj, AdjustedStructuralFeatures):
        return adj.hops
    return list(adj)


def aggregate(adj, x: np.ndarray, hop_weights: np.ndarray) -> np.ndarray:
    """Weighted sum of raw features and per-hop neighbor means.

    e = w_0 * x + sum_p w_p * (hop_p @ x). Accepts AdjustedStructuralFeatures
    or a plain list of row-stochastic matrices; an empty hop list reduces to
    w_0 * x.
    """
    agg, _ = _aggregate_cached(_hop_matrices(adj), np.asarray(x, dtype=np.float64), hop_weights)
    return agg


def _aggregate_cached(hops, x, hop_weights):
    hop_weights = np.asarray(hop_weights, dtype=np.float64)
    if hop_weights.shape != (len(hops) + 1,):
        raise DimensionMismatch(
            f"hop_weights must have length {len(hops) + 1}, got {hop_weights.shape}"
        )
    products = []
    agg = hop_weights[0] * x
    for p, hop in enumerate(hops, start=1):
        if hop.shape != (x.shape[0], x.shape[0]):
            raise DimensionMismatch(f"hop {p} is {hop.shape}, expected square of {x.shape[0]}")
        prod = hop.to_scipy() @ x
        products.append(prod)
        agg = agg + hop_weights[p] * prod
    return agg, products


@dataclass
class _ForwardCache:
    net: object
    version: int
    x: np.ndarray
    agg: np.ndarray
    hop_products: list
    layer_caches: list


class _FeedForwardNet:
    """Shared mechanics: aggregation, embedding, layer stack, parameter plumbing."""

    def __init__(self, hop_weights, embed_w, embed_b, layers):
        self.hop_weights = np.asarray(hop_weights, dtype=np.float64)
        self.embed_w = np.asarray(embed_w, dtype=np.float64)
        self.embed_b = np.asarray(embed_b, dtype=np.float64)
        self.layers = list(layers)
        self._version = 0
        if self.embed_w.ndim != 2 or self.embed_b.shape != (self.embed_w.shape[0],):
            raise DimensionMismatch("embed needs weight (d, raw_dim) and bias (d,)")
        dims = [self.embed_w.shape[0]] + [layer.out_dim for layer in self.layers]
        for t, layer in enumerate(self.layers):
            if layer.in_dim != dims[t]:
                raise DimensionMismatch(
                    f"layer {t} expects in_dim {dims[t]}, got {layer.in_dim}"
                )

    @property
    def num_hops(self):
        return len(self.hop_weights) - 1

    @property
    def raw_dim(self):
        return self.embed_w.shape[1]

    @property
    def num_classes(self):
        return self.layers[-1].out_dim if self.layers else self.embed_w.shape[0]

    def forward(self, adj, x: np.ndarray):
        """Run the pipeline; returns (logits, cache) with cache bound to this parameter version."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.raw_dim:
            raise DimensionMismatch(f"expected features (n, {self.raw_dim}), got {x.shape}")
        hops = _hop_matrices(adj) if adj is not None else []
        if len(hops) != self.num_hops:
            raise DimensionMismatch(f"network has {self.num_hops} hops, got {len(hops)}")
        agg, products = _aggregate_cached(hops, x, self.hop_weights)
        z = agg @ self.embed_w.T + self.embed_b
        layer_caches = []
        for layer in self.layers:
            z, cache = layer.forward(z)
            layer_caches.append(cache)
        return z, _ForwardCache(self, self._version, x, agg, products, layer_caches)

    def predict(self, adj, x: np.ndarray) -> np.ndarray:
        return self.forward(adj, x)[0]

    def backward(self, cache: _ForwardCache, upstream: np.ndarray) -> dict[str, np.ndarray]:
        """Exact gradients of sum(upstream * logits) w.r.t. every parameter."""
        if cache.net is not self or cache.version != self._version:
            raise StaleForwardCache("forward cache predates the current parameters")
        d_z = np.asarray(upstream, dtype=np.float64)
        grads: dict[str, np.ndarray] = {}
        for t in range(len(self.layers) - 1, -1, -1):
            d_z, layer_grads = self.layers[t].backward(cache.layer_caches[t], d_z)
            for name, g in layer_grads.items():
                grads[f"layers.{t}.{name}"] = g
        grads["embed.w"] = d_z.T @ cache.agg
        grads["embed.b"] = d_z.sum(axis=0)
        d_agg = d_z @ self.embed_w
        d_hw = np.empty_like(self.hop_weights)
        d_hw[0] = np.sum(d_agg * cache.x)
        for p, prod in enumerate(cache.hop_products, start=1):
            d_hw[p] = np.sum(d_agg * prod)
        grads["hop_weights"] = d_hw
        return grads

    def parameters(self) -> dict[str, np.ndarray]:
        params = {"hop_weights": self.hop_weights, "embed.w": self.embed_w, "embed.b": self.embed_b}
        for t, layer in enumerate(self.layers):
            for name, arr in layer.param_arrays().items():
                params[f"layers.{t}.{name}"] = arr
        return params

    def set_parameters(self, params: dict[str, np.ndarray]):
        """Install new parameter values (copied); invalidates outstanding caches."""
        current = self.parameters()
        if set(params) != set(current):
            raise DimensionMismatch(
                f"parameter name mismatch: {sorted(set(current) ^ set(params))}"
            )
        for name, arr in current.items():
            new = np.asarray(params[name], dtype=np.float64)
            if new.shape != arr.shape:
                raise DimensionMismatch(f"parameter {name}: expected {arr.shape}, got {new.shape}")
            arr[...] = new
        self._version += 1


class KanNetwork(_FeedForwardNet):
    """Aggregation + embedding + spline-activation layer stack."""

    kind = "kan"

    def __init__(self, hop_weights, embed_w, embed_b, layers, basis: BSplineBasis):
        super().__init__(hop_weights, embed_w, embed_b, layers)
        self.basis = basis

    @classmethod
    def create(
        cls,
        rng: np.random.Generator,
        raw_dim: int,
        num_classes: int,
        num_hops: int,
        embed_dim: int = 64,
        hidden_dims: Sequence[int] | None = None,
        basis: BSplineBasis | None = None,
    ):
        basis = basis or BSplineBasis()
        hidden = list(hidden_dims) if hidden_dims is not None else [embed_dim, embed_dim]
        dims = [embed_dim, *hidden, num_classes]
        layers = [
            KanLayer.create(rng, dims[t], dims[t + 1], basis) for t in range(len(dims) - 1)
        ]
        embed_w = rng.uniform(-1.0, 1.0, size=(embed_dim, raw_dim)) / np.sqrt(raw_dim)
        return cls(np.ones(num_hops + 1), embed_w, np.zeros(embed_dim), layers, basis)


class MlpNetwork(_FeedForwardNet):
    """Same front end feeding a plain affine + fixed-nonlinearity stack."""

    kind = "mlp"

    @classmethod
    def create(
        cls,
        rng: np.random.Generator,
        raw_dim: int,
        num_classes: int,
        num_hops: int,
        embed_dim: int = 64,
        hidden_dims: Sequence[int] | None = None,
    ):
        hidden = list(hidden_dims) if hidden_dims is not None else [embed_dim, embed_dim]
        dims = [embed_dim, *hidden, num_classes]
        layers = [
            AffineLayer.create(rng, dims[t], dims[t + 1], nonlinear=(t < len(dims) - 2))
            for t in range(len(dims) - 1)
        ]
        embed_w = rng.uniform(-1.0, 1.0, size=(embed_dim, raw_dim)) / np.sqrt(raw_dim)
        return cls(np.ones(num_hops + 1), embed_w, np.zeros(embed_dim), layers)


CHECKPOINT_FORMAT_VERSION = 1


def save_checkpoint(net: _FeedForwardNet, path):
    """Write all parameters plus reconstruction metadata; round-trips bitwise."""
    meta = {
        "format_version": np.int64(CHECKPOINT_FORMAT_VERSION),
        "kind": np.str_(net.kind),
        "num_layers": np.int64(len(net.layers)),
    }
    if net.kind == "kan":
        b = net.basis
        meta["basis"] = np.array([b.degree, b.lo, b.hi, b.intervals], dtype=np.float64)
    else:
        meta["nonlinear"] = np.array([layer.nonlinear for layer in net.layers], dtype=np.bool_)
    arrays = {name.replace(".", "__"): arr for name, arr in net.parameters().items()}
    with open(path, "wb") as fh:
        np.savez(fh, **meta, **arrays)


def load_checkpoint(path) -> _FeedForwardNet:
    with np.load(path, allow_pickle=False) as zf:
        if int(zf["format_version"]) != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {zf['format_version']}")
        kind = str(zf["kind"])
        num_layers = int(zf["num_layers"])
        get = lambda name: zf[name.replace(".", "__")]
        hop_weights = get("hop_weights")
        embed_w = get("embed.w")
        embed_b = get("embed.b")
        if kind == "kan":
            degree, lo, hi, intervals = zf["basis"]
            basis = BSplineBasis(int(degree), float(lo), float(hi), int(intervals))
            layers = [
                KanLayer(
                    basis,
                    get(f"layers.{t}.coeffs"),
                    get(f"layers.{t}.w_base"),
                    get(f"layers.{t}.w_spline"),
                )
                for t in range(num_layers)
            ]
            return KanNetwork(hop_weights, embed_w, embed_b, layers, basis)
        nonlinear = zf["nonlinear"]
        layers = [
            AffineLayer(get(f"layers.{t}.weight"), get(f"layers.{t}.bias"), bool(nonlinear[t]))
            for t in range(num_layers)
        ]
        return MlpNetwork(hop_weights, embed_w, embed_b, layers)
