"""Explicit path summation over layered compositions of matrices.

A ``PathDiagram`` lists square layers in time order: ``layers[0]`` acts
first, so the listed sequence ``[U1, U2, ..., UL]`` denotes the product
``UL ... U2 U1`` applied to kets. A path assigns one basis index to every
wire segment after each layer; its weight is the product of the matrix
entries it traverses. Summing path weights reproduces the matrix-product
amplitude entry for entry, which is the executable content of this module
and is enforced by the test suite against the matrix route.

Zero-weight paths are enumerated, never pruned: the correspondence between
paths and product terms covers vanishing terms too, and pruning would break
the bijection with walks through the laboratory diagram.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import linalg
from .formatting import complex6

__all__ = [
    "FREE",
    "DEFAULT_PATH_CAP",
    "PathCapExceeded",
    "PathDiagram",
    "Path",
    "enumerate_paths",
    "path_sum_amplitude",
    "composition_matrix",
    "InterferenceReport",
    "interference_report",
    "LabDiagram",
    "emit_lab_diagram",
    "to_dot",
]

#: Sentinel for an unpinned output: enumerate over all final indices.
FREE = None

#: Path enumeration is materialized; fail loudly past this many paths.
DEFAULT_PATH_CAP = 10**6


class PathCapExceeded(RuntimeError):
    """Enumerating this diagram would materialize more paths than the cap."""


@dataclass(frozen=True, eq=False)
class PathDiagram:
    """A layered composition with a fixed input basis index.

    Fields:
        dim: basis size d of every layer.
        layers: square d x d matrices in time order.
        input: basis index prepared on the input wire.
        output: basis index detected at the end, or FREE.
    """

    dim: int
    layers: tuple[np.ndarray, ...]
    input: int
    output: int | None = FREE

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        frozen = []
        for t, layer in enumerate(self.layers):
            m = linalg.as_matrix(layer)
            if m.shape != (d, d):
                raise ValueError(
                    f"layer {t} has shape {m.shape}, expected ({d}, {d})"
                )
            m = m.copy()
            m.setflags(write=False)
            frozen.append(m)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "layers", tuple(frozen))
        if not 0 <= int(self.input) < d:
            raise ValueError(f"input index {self.input} out of range for dimension {d}")
        object.__setattr__(self, "input", int(self.input))
        if self.output is not FREE:
            if not 0 <= int(self.output) < d:
                raise ValueError(
                    f"output index {self.output} out of range for dimension {d}"
                )
            object.__setattr__(self, "output", int(self.output))

    @property
    def n_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class Path:
    """One basis-index assignment per layer boundary, with its complex weight."""

    indices: tuple[int, ...]
    weight: complex


def _require_layers(pd: PathDiagram) -> None:
    if pd.n_layers == 0:
        raise ValueError("an empty composition has no diagram")


def _path_weight(pd: PathDiagram, indices: tuple[int, ...]) -> complex:
    w = 1 + 0j
    prev = pd.input
    for layer, k in zip(pd.layers, indices):
        w *= layer[k, prev]
        prev = k
    return complex(w)


def enumerate_paths(pd: PathDiagram, cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """All paths through the diagram in lexicographic index order.

    With the output pinned to j there are exactly d**(L-1) paths (interior
    indices run free, the last index is forced to j); with a FREE output
    there are d**L. Zero-weight paths are included.
    """
    _require_layers(pd)
    d, L = pd.dim, pd.n_layers
    count = d**L if pd.output is FREE else d ** (L - 1)
    if count > cap:
        raise PathCapExceeded(
            f"diagram has {count} paths, exceeding the cap of {cap}"
        )
    paths = []
    if pd.output is FREE:
        for indices in product(range(d), repeat=L):
            paths.append(Path(indices, _path_weight(pd, indices)))
    else:
        for interior in product(range(d), repeat=L - 1):
            indices = interior + (pd.output,)
            paths.append(Path(indices, _path_weight(pd, indices)))
    return paths


def path_sum_amplitude(
    pd: PathDiagram, output_index: int, cap: int = DEFAULT_PATH_CAP
) -> complex:
    """Sum of path weights with the output pinned to ``output_index``.

    Equals the matrix-product amplitude <j|UL...U1|i> up to float
    reassociation; the test suite holds the two routes together at 1e-10.
    """
    _require_layers(pd)
    if not 0 <= int(output_index) < pd.dim:
        raise ValueError(
            f"output index {output_index} out of range for dimension {pd.dim}"
        )
    pinned = dataclasses.replace(pd, output=int(output_index))
    total = 0j
    for path in enumerate_paths(pinned, cap=cap):
        total += path.weight
    return total


def composition_matrix(pd: PathDiagram) -> np.ndarray:
    """The matrix route: the product of the layers in application order."""
    _require_layers(pd)
    u = pd.layers[0]
    for layer in pd.layers[1:]:
        u = linalg.matmul(layer, u)
    return u


@dataclass(frozen=True)
class InterferenceReport:
    """Paths into one output with their sum and an interference verdict."""

    output: int
    paths: tuple[Path, ...]
    total: complex
    magnitude: float
    weight_sum: float
    verdict: str  # "destructive" | "constructive" | "mixed"


def interference_report(
    pd: PathDiagram, output_index: int, tol: float = 1e-10
) -> InterferenceReport:
    """Classify how the paths into ``output_index`` combine.

    Destructive: the weights cancel (|sum| <= tol although the magnitudes
    add to more). Constructive: |sum| matches the sum of magnitudes within
    tol. Anything in between is mixed.
    """
    _require_layers(pd)
    if not 0 <= int(output_index) < pd.dim:
        raise ValueError(
            f"output index {output_index} out of range for dimension {pd.dim}"
        )
    pinned = dataclasses.replace(pd, output=int(output_index))
    paths = tuple(enumerate_paths(pinned))
    total = complex(sum(p.weight for p in paths))
    magnitude = abs(total)
    weight_sum = float(sum(abs(p.weight) for p in paths))
    if magnitude <= tol and weight_sum > tol:
        verdict = "destructive"
    elif abs(magnitude - weight_sum) <= tol:
        verdict = "constructive"
    else:
        verdict = "mixed"
    return InterferenceReport(
        output=int(output_index),
        paths=paths,
        total=total,
        magnitude=magnitude,
        weight_sum=weight_sum,
        verdict=verdict,
    )


@dataclass(frozen=True)
class LabDiagram:
    """The standardized laboratory form of a composition, as a layered DAG.

    One source node carries the prepared ket and fans out with one edge per
    basis value, weighted by the preparation amplitude (1 on the input
    branch, 0 elsewhere; zero-weight edges are kept). Each layer then has d
    device nodes, one per incoming branch value, each fanning out d weighted
    lines; the last layer's lines land on the d detector sinks. Node ids are
    stable: ``prep``, ``L<t>_k<b>``, ``D<k>``.

    Totals: 1 + L*d + d nodes and L*d**2 + d edges.
    """

    dim: int
    input: int
    n_layers: int
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, complex], ...]

    def successors(self, node_id: str) -> list[tuple[str, complex]]:
        return [(dst, w) for src, dst, w in self.edges if src == node_id]

    def input_walks(self) -> list[tuple[tuple[int, ...], complex]]:
        """Root-to-sink walks entering through the prepared input branch.

        Each walk is read as the sequence of branch values it visits after
        each layer, paired with the product of its edge weights; these
        correspond one to one with the FREE-output path enumeration.
        """
        start = f"L1_k{self.input}"
        walks: list[tuple[tuple[int, ...], complex]] = []

        def descend(node_id: str, indices: tuple[int, ...], weight: complex) -> None:
            nexts = self.successors(node_id)
            if not nexts:
                walks.append((indices, weight))
                return
            for dst, w in nexts:
                descend(dst, indices + (_branch_of(dst),), weight * w)

        descend(start, (), 1 + 0j)
        return walks


def _branch_of(node_id: str) -> int:
    # "L<t>_k<b>" -> b, "D<k>" -> k
    if node_id.startswith("D"):
        return int(node_id[1:])
    return int(node_id.rsplit("k", 1)[1])


def emit_lab_diagram(pd: PathDiagram) -> LabDiagram:
    """Build the laboratory DAG for a composition.

    Every root-to-sink walk through the prepared branch traverses one
    weighted line per layer; its weight product is the corresponding path
    weight, so the walk set is exactly the FREE-output path set.
    """
    _require_layers(pd)
    d, L = pd.dim, pd.n_layers

    nodes = ["prep"]
    for t in range(1, L + 1):
        nodes.extend(f"L{t}_k{b}" for b in range(d))
    nodes.extend(f"D{k}" for k in range(d))

    edges: list[tuple[str, str, complex]] = []
    for b in range(d):
        amp = 1 + 0j if b == pd.input else 0j
        edges.append(("prep", f"L1_k{b}", amp))
    for t in range(1, L + 1):
        layer = pd.layers[t - 1]
        for b in range(d):
            src = f"L{t}_k{b}"
            for k in range(d):
                dst = f"L{t + 1}_k{k}" if t < L else f"D{k}"
                edges.append((src, dst, complex(layer[k, b])))

    return LabDiagram(
        dim=d,
        input=pd.input,
        n_layers=L,
        nodes=tuple(nodes),
        edges=tuple(edges),
    )


def to_dot(diagram: LabDiagram, role_labels: bool = False) -> str:
    """Serialize a laboratory DAG to Graphviz DOT text.

    Node identifiers are the stable ids of the diagram; edge labels carry
    the complex weights as ``a+bi`` with 6 significant digits. With
    ``role_labels`` (two-dimensional diagrams only), each device edge is
    additionally tagged T or R for the transmission (branch kept) or
    reflection (branch flipped) reading of a mirror element.
    """
    if role_labels and diagram.dim != 2:
        raise ValueError("role labels are defined only for two-dimensional diagrams")
    lines = ["digraph lab {", "  rankdir=LR;"]
    for node_id in diagram.nodes:
        if node_id == "prep":
            label = f"|{diagram.input}>"
            attrs = f'[shape=plaintext, label="{label}"]'
        elif node_id.startswith("D"):
            attrs = f'[shape=doublecircle, label="{node_id}"]'
        else:
            t, branch = node_id[1:].split("_k")
            attrs = f'[shape=box, label="U{t} b={branch}"]'
        lines.append(f'  "{node_id}" {attrs};')
    for src, dst, weight in diagram.edges:
        label = complex6(weight)
        if role_labels and src != "prep":
            role = "T" if _branch_of(src) == _branch_of(dst) else "R"
            label = f"{label} {role}"
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
