"""Deterministic problem generators and the portable random stream behind them.

Randomness contract
-------------------
All seeded draws in this package go through :class:`PortableRng`, built on the
Philox 4x64 counter-based generator keyed by ``(seed, stream)``:

* uniforms take the top 53 bits of each raw 64-bit word:
  ``u = ((raw >> 11) + 1) * 2**-53``, so ``u`` lies in (0, 1];
* normals come from the Box-Muller transform applied to consecutive uniform
  pairs ``(u1, u2)``: ``z0 = sqrt(-2 ln u1) cos(2 pi u2)``,
  ``z1 = sqrt(-2 ln u1) sin(2 pi u2)``, consumed in (z0, z1) order;
* integer draws in [0, n) are ``floor(u * n)`` with ``u`` uniform in [0, 1)
  (i.e. the same 53-bit uniform minus the +1 offset);
* k-subsets come from a partial Fisher-Yates shuffle of [0, n), taking one
  integer draw per selected element, reported sorted.

The raw word stream is consumed strictly left to right, so any implementation
of Philox 4x64-10 reproduces every draw bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, DuplicateNodes
from .linalg import as_matrix, matrix_from_json, matrix_to_json

_TWO_NEG53 = 2.0 ** -53


class PortableRng:
    """Counter-based random stream: Philox 4x64 keyed by (seed, stream)."""

    def __init__(self, seed: int, stream: int = 0):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise DomainError(f"seed must be an integer, got {seed!r}")
        if seed < 0 or stream < 0:
            raise DomainError("seed and stream must be nonnegative")
        self.seed = int(seed)
        self.stream = int(stream)
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._bg = np.random.Philox(key=key)

    def raw(self, count: int) -> np.ndarray:
        """Next *count* raw uint64 words."""
        return np.atleast_1d(self._bg.random_raw(count)).astype(np.uint64)

    def uniform_open(self, count: int) -> np.ndarray:
        """Uniforms in (0, 1]: top 53 bits, shifted off zero."""
        return (np.right_shift(self.raw(count), np.uint64(11)) + 1.0) * _TWO_NEG53

    def uniform(self, count: int) -> np.ndarray:
        """Uniforms in [0, 1): top 53 bits."""
        return np.right_shift(self.raw(count), np.uint64(11)) * _TWO_NEG53

    def normal(self, shape) -> np.ndarray:
        """Standard normals via Box-Muller, filled in C order."""
        total = int(np.prod(shape)) if not isinstance(shape, (int, np.integer)) else int(shape)
        pairs = (total + 1) // 2
        u = self.uniform_open(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * math.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        out = z[:total]
        if isinstance(shape, (int, np.integer)):
            return out
        return out.reshape(shape)

    def integer_below(self, n: int) -> int:
        """One integer uniform on [0, n)."""
        if n < 1:
            raise DomainError("integer_below needs n >= 1")
        return int(self.uniform(1)[0] * n)

    def subset(self, n: int, k: int) -> tuple[int, ...]:
        """A uniform k-subset of {0, ..., n-1} via partial Fisher-Yates, sorted."""
        if not (0 <= k <= n):
            raise DomainError(f"subset needs 0 <= k <= n, got k={k}, n={n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.integer_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return tuple(sorted(pool[:k]))


# ---------------------------------------------------------------------------
# generation specs


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a reproducible MMV instance.

    kind is "gaussian" (i.i.d. normal A) or "vandermonde" (nodes**row powers);
    k = 0 is allowed and plants the zero solution.
    """

    kind: str
    m: int
    n: int
    r: int
    k: int
    seed: int
    nodes: tuple[float, ...] | None = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "vandermonde"):
            raise DomainError(f"kind must be 'gaussian' or 'vandermonde', got {self.kind!r}")
        for label, v in (("m", self.m), ("n", self.n), ("r", self.r)):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise DomainError(f"{label} must be a positive integer, got {v!r}")
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool) or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k!r}")
        if self.k > min(self.m // 2, self.n):
            raise DomainError(
                f"k={self.k} exceeds min(floor(m/2), n) = {min(self.m // 2, self.n)}"
            )
        if self.seed < 0:
            raise DomainError("seed must be nonnegative")
        if self.amplitude <= 0:
            raise DomainError("amplitude must be positive")
        if self.nodes is not None:
            object.__setattr__(self, "nodes", tuple(float(t) for t in self.nodes))
            if len(self.nodes) != self.n:
                raise DomainError(f"nodes length {len(self.nodes)} != n = {self.n}")
            if len(set(self.nodes)) != len(self.nodes):
                raise DuplicateNodes("nodes must be pairwise distinct")

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "k": self.k,
            "seed": self.seed,
            "amplitude": self.amplitude,
        }
        if self.nodes is not None:
            out["nodes"] = list(self.nodes)
        return out


def genspec_from_json(obj) -> GenSpec:
    if not isinstance(obj, dict):
        raise DomainError("GenSpec JSON must be an object")
    known = {"kind", "m", "n", "r", "k", "seed", "nodes", "amplitude"}
    unknown = set(obj) - known
    if unknown:
        raise DomainError(f"GenSpec JSON has unknown fields: {sorted(unknown)}")
    missing = {"kind", "m", "n", "r", "k", "seed"} - set(obj)
    if missing:
        raise DomainError(f"GenSpec JSON is missing fields: {sorted(missing)}")
    nodes = obj.get("nodes")
    return GenSpec(
        kind=obj["kind"],
        m=obj["m"],
        n=obj["n"],
        r=obj["r"],
        k=obj["k"],
        seed=obj["seed"],
        nodes=tuple(nodes) if nodes is not None else None,
        amplitude=obj.get("amplitude", 1.0),
    )


def gen_vandermonde(nodes, m: int) -> np.ndarray:
    """The m x len(nodes) matrix with entries nodes[j] ** i, i = 0..m-1."""
    try:
        t = np.asarray(list(nodes), dtype=float)
    except (TypeError, ValueError):
        raise DomainError("nodes must be a sequence of numbers") from None
    if t.ndim != 1 or t.size == 0:
        raise DomainError("nodes must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(t)):
        raise DomainError("nodes must be finite")
    if len(set(t.tolist())) != t.size:
        raise DuplicateNodes("nodes must be pairwise distinct")
    if m < 1:
        raise DomainError("m must be >= 1")
    powers = np.arange(m).reshape(-1, 1)
    return as_matrix(t.reshape(1, -1) ** powers, name="vandermonde")


def default_nodes(n: int) -> tuple[float, ...]:
    """Equispaced nodes on [-1, 1] used when a vandermonde spec omits nodes."""
    return tuple(float(t) for t in np.linspace(-1.0, 1.0, n))


def gen_problem(spec: GenSpec):
    """Materialize a GenSpec into an MmvProblem with a planted k-row solution.

    Draw order from PortableRng(spec.seed): first A (gaussian kind only,
    m*n normals in row-major order), then the support (k-subset of rows),
    then each planted row in ascending row order (r normals each, redrawn
    whole while its 2-norm is below 0.1 * amplitude).
    """
    from .solvers import MmvProblem  # local import: solvers depends on this module

    rng = PortableRng(spec.seed)
    if spec.kind == "gaussian":
        a = as_matrix(rng.normal((spec.m, spec.n)), name="A")
    else:
        nodes = spec.nodes if spec.nodes is not None else default_nodes(spec.n)
        a = gen_vandermonde(nodes, spec.m)
    support = rng.subset(spec.n, spec.k)
    x = np.zeros((spec.n, spec.r))
    for i in support:
        row = rng.normal(spec.r) * spec.amplitude
        while float(np.sqrt(row @ row)) < 0.1 * spec.amplitude:
            row = rng.normal(spec.r) * spec.amplitude
        x[i] = row
    b = a @ x
    return MmvProblem(
        a=a,
        b=as_matrix(b, name="B"),
        planted=as_matrix(x, name="planted"),
        k=spec.k if spec.k > 0 else None,
    )


def genspec_dumps(spec: GenSpec) -> str:
    return json.dumps(spec.to_json(), sort_keys=True)


__all__ = [
    "PortableRng",
    "GenSpec",
    "genspec_from_json",
    "genspec_dumps",
    "gen_vandermonde",
    "default_nodes",
    "gen_problem",
    "matrix_to_json",
    "matrix_from_json",
]
