"""Chart specifications: expression-valued metric and cubic form components,
validation, and deterministic point sampling.

A spec is a JSON-compatible object::

    {
      "schema": 1,
      "name": "...",
      "dim": 2,
      "coordinates": ["x1", "x2"],
      "parameters": {"a1": 1.0},
      "metric": {"11": "...", "12": "...", "22": "..."},      # sorted index keys
      "cubic":  {"111": "...", "112": "..."},                 # sorted index keys
      "sample": {"box": {"x1": [0.5, 3.0], "x2": [0.5, 3.0]},
                 "count": 100, "seed": 42, "strategy": "uniform"}
    }

Metric keys cover the lower triangle (indices 1-based, nondecreasing); the
full symmetric matrix is implied.  Cubic keys are nondecreasing index triples;
missing triples are zero, total symmetry is implied.  The sample box must sit
strictly inside the domain of every expression; validation probes it.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

import numpy as np

from .expr import EvalDomainError, ExprError, eval_jet, parse_expression
from .jets import Jet, jet_space, jet_tensor

MAX_DIM = 8
SCHEMA_VERSION = 1

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
_RESERVED = {"pow", "exp", "log", "sin", "cos", "sqrt"}


class SpecValidationError(ValueError):
    """Aggregated spec problems; ``problems`` lists one message per issue."""

    def __init__(self, problems):
        super().__init__("invalid manifold spec:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = list(problems)


@dataclass
class SampleSpec:
    box: dict
    count: int = 100
    seed: int = 42
    strategy: str = "uniform"

    def to_dict(self):
        return {
            "box": {name: [float(lo), float(hi)] for name, (lo, hi) in self.box.items()},
            "count": int(self.count),
            "seed": int(self.seed),
            "strategy": self.strategy,
        }


@dataclass
class ManifoldSpec:
    name: str
    dim: int
    coordinates: list
    metric: dict
    cubic: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    sample: SampleSpec = None

    # -- (de)serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, data):
        try:
            sample = data.get("sample") or {}
            box = {name: (float(lo), float(hi)) for name, (lo, hi) in sample.get("box", {}).items()}
            spec = cls(
                name=str(data.get("name", "unnamed")),
                dim=int(data["dim"]),
                coordinates=list(data["coordinates"]),
                metric=dict(data["metric"]),
                cubic=dict(data.get("cubic", {})),
                parameters={k: float(v) for k, v in (data.get("parameters") or {}).items()},
                sample=SampleSpec(
                    box=box,
                    count=int(sample.get("count", 100)),
                    seed=int(sample.get("seed", 42)),
                    strategy=str(sample.get("strategy", "uniform")),
                ),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise SpecValidationError([f"malformed spec object: {err}"]) from err
        return spec

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "dim": self.dim,
            "coordinates": list(self.coordinates),
            "parameters": {k: float(v) for k, v in self.parameters.items()},
            "metric": dict(self.metric),
            "cubic": dict(self.cubic),
            "sample": self.sample.to_dict() if self.sample else None,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())

    def content_hash(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()

    # -- validation ------------------------------------------------------------

    def validate(self, probe=True):
        """Raise :class:`SpecValidationError` collecting every problem found."""
        problems = []
        if not 2 <= self.dim <= MAX_DIM:
            problems.append(f"dim must be in 2..{MAX_DIM}, got {self.dim}")
        if len(self.coordinates) != self.dim:
            problems.append("coordinates list must have length dim")
        seen = set()
        for name in self.coordinates:
            if not _IDENT.match(str(name)) or name in _RESERVED:
                problems.append(f"invalid coordinate name {name!r}")
            if name in seen:
                problems.append(f"duplicate coordinate name {name!r}")
            seen.add(name)
        for name in self.parameters:
            if not _IDENT.match(str(name)) or name in _RESERVED or name in seen:
                problems.append(f"invalid parameter name {name!r}")
        if problems:
            raise SpecValidationError(problems)

        expected_metric = {self._key(pair) for pair in combinations_with_replacement(range(1, self.dim + 1), 2)}
        for key in self.metric:
            if key not in expected_metric:
                problems.append(f"metric key {key!r} is not a sorted index pair within 1..{self.dim}")
        for key in expected_metric - set(self.metric):
            problems.append(f"missing metric component {key!r} (lower triangle must be complete)")
        valid_cubic = {self._key(t) for t in combinations_with_replacement(range(1, self.dim + 1), 3)}
        for key in self.cubic:
            if key not in valid_cubic:
                problems.append(
                    f"cubic key {key!r} is not a sorted index triple within 1..{self.dim}"
                )

        asts = {}
        for label, table in (("metric", self.metric), ("cubic", self.cubic)):
            for key, src in table.items():
                try:
                    asts[(label, key)] = parse_expression(src, self.coordinates, self.parameters)
                except ExprError as err:
                    problems.append(f"{label}[{key}]: {err}")

        if self.sample is None:
            problems.append("sample section is required")
        else:
            for name in self.coordinates:
                if name not in self.sample.box:
                    problems.append(f"sample box is missing coordinate {name!r}")
                else:
                    lo, hi = self.sample.box[name]
                    if not lo < hi:
                        problems.append(f"sample box for {name!r} must satisfy lo < hi")
            if self.sample.strategy not in ("uniform", "grid"):
                problems.append(f"unknown sampling strategy {self.sample.strategy!r}")
            if self.sample.count < 0:
                problems.append("sample count must be nonnegative")
        if problems:
            raise SpecValidationError(problems)

        if probe:
            self._probe(asts, problems)
        if problems:
            raise SpecValidationError(problems)
        return self

    def _key(self, indices):
        return "".join(str(i) for i in indices)

    def _probe(self, asts, problems):
        """Evaluate every expression at probe points and check g is positive definite."""
        points = self._probe_points()
        values = {}
        for (label, key), ast in asts.items():
            try:
                values[(label, key)] = eval_jet(ast, points, 2, self.parameters).value
            except EvalDomainError as err:
                problems.append(f"{label}[{key}] leaves its domain inside the box: {err}")
        if problems:
            return
        g = np.zeros((points.shape[0], self.dim, self.dim))
        for i in range(1, self.dim + 1):
            for j in range(i, self.dim + 1):
                g[:, i - 1, j - 1] = g[:, j - 1, i - 1] = values[("metric", self._key((i, j)))]
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            problems.append("metric is not positive definite at a probe point inside the box")

    def _probe_points(self):
        lo, hi = self._box_arrays()
        center = 0.5 * (lo + hi)
        corners = _shrunk_corners(lo, hi)
        rng = np.random.default_rng(self.sample.seed)
        uniform = lo + (hi - lo) * rng.random((16, self.dim))
        return np.vstack([center[None, :], corners, uniform])

    def _box_arrays(self):
        lo = np.array([self.sample.box[name][0] for name in self.coordinates])
        hi = np.array([self.sample.box[name][1] for name in self.coordinates])
        return lo, hi

    # -- sampling ----------------------------------------------------------------

    def sample_points(self, count=None, seed=None):
        """Deterministic sample: strategy points plus the corners pulled 10% inward."""
        lo, hi = self._box_arrays()
        count = self.sample.count if count is None else int(count)
        seed = self.sample.seed if seed is None else int(seed)
        if self.sample.strategy == "grid":
            per_axis = 2
            while per_axis**self.dim < count:
                per_axis += 1
            axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(self.dim)]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
        else:
            rng = np.random.default_rng(seed)
            pts = lo + (hi - lo) * rng.random((count, self.dim))
        return np.vstack([pts, _shrunk_corners(lo, hi)])

    # -- compilation ----------------------------------------------------------------

    def compile(self):
        self.validate()
        return CompiledManifold(self)


def _shrunk_corners(lo, hi):
    width = hi - lo
    options = [(lo[i] + 0.1 * width[i], hi[i] - 0.1 * width[i]) for i in range(len(lo))]
    return np.array(list(product(*options)))


class CompiledManifold:
    """Parsed expressions of a validated spec, ready for jet evaluation."""

    def __init__(self, spec: ManifoldSpec):
        self.spec = spec
        self.metric_asts = {
            key: parse_expression(src, spec.coordinates, spec.parameters)
            for key, src in spec.metric.items()
        }
        self.cubic_asts = {
            key: parse_expression(src, spec.coordinates, spec.parameters)
            for key, src in spec.cubic.items()
        }

    @property
    def dim(self):
        return self.spec.dim

    def metric_jets(self, points, order=3):
        m = self.dim
        out = jet_tensor((m, m))
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                jet = eval_jet(self.metric_asts[f"{i}{j}"], points, order, self.spec.parameters)
                out[i - 1, j - 1] = out[j - 1, i - 1] = jet
        return out

    def cubic_jets(self, points, order=3):
        points = np.asarray(points, dtype=float)
        m = self.dim
        batch = points.shape[:-1]
        zero = Jet.constant(jet_space(m, order), 0.0, batch)
        out = jet_tensor((m, m, m))
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    out[i, j, k] = zero
        for key, ast in self.cubic_asts.items():
            jet = eval_jet(ast, points, order, self.spec.parameters)
            indices = [int(c) - 1 for c in key]
            seen = set()
            for perm in _permutations3(indices):
                if perm not in seen:
                    out[perm] = jet
                    seen.add(perm)
        return out

    def sample_points(self, count=None, seed=None):
        return self.spec.sample_points(count, seed)


def _permutations3(indices):
    i, j, k = indices
    return [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
