"""Plain-text dataset files: header, hyperedges, features, labels.

Format, line by line:

    N M d C              header: vertices, hyperedges, feature dim, classes
    <M hyperedge lines>  space-separated vertex indices
    <N feature lines>    d reals each
    <N label lines>      one integer in [0, C)

Blank lines and lines starting with '#' are ignored. Serialization uses
repr-precision floats, so parse -> serialize -> parse is an identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hypergraph, build_hypergraph
from .errors import HeaderMismatch, LabelOutOfRange, ParseError
from .features import as_feature_matrix

__all__ = ["VertexDataset", "parse_dataset", "parse_dataset_text", "serialize_dataset"]


@dataclass(frozen=True)
class VertexDataset:
    """In-memory dataset: hypergraph, raw vertex features, integer labels."""

    hypergraph: Hypergraph
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    @property
    def num_vertices(self):
        return self.hypergraph.num_vertices

    def hyperedge_sets(self):
        """Back out the hyperedge membership lists from the incidence matrix."""
        inc = self.hypergraph.incidence
        edges = [[] for _ in range(self.hypergraph.num_hyperedges)]
        for v in range(inc.rows):
            for j in inc.row(v)[0]:
                edges[j].append(v)
        return edges


def _significant_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_dataset_text(text: str, source: str = "<string>") -> VertexDataset:
    lines = list(_significant_lines(text))
    if not lines:
        raise ParseError(f"{source}: empty dataset file")
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise HeaderMismatch(f"{source}: file ended while reading {what}")
        lineno, line = lines[pos]
        pos += 1
        return lineno, line

    lineno, header = take("header")
    parts = header.split()
    if len(parts) != 4:
        raise ParseError(f"{source}:{lineno}: header must be 'N M d C', got {header!r}")
    try:
        n, m, dim, classes = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"{source}:{lineno}: header fields must be integers") from None
    if n < 1 or m < 0 or dim < 1 or classes < 1:
        raise ParseError(f"{source}:{lineno}: header counts out of range")

    edges = []
    for j in range(m):
        lineno, line = take(f"hyperedge {j}")
        try:
            members = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"{source}:{lineno}: hyperedge {j} has a non-integer vertex") from None
        edges.append(members)

    rows = np.empty((n, dim), dtype=np.float64)
    for i in range(n):
        lineno, line = take(f"feature row {i}")
        toks = line.split()
        if len(toks) != dim:
            raise ParseError(
                f"{source}:{lineno}: feature row {i} has {len(toks)} values, expected {dim}"
            )
        try:
            rows[i] = [float(tok) for tok in toks]
        except ValueError:
            raise ParseError(f"{source}:{lineno}: feature row {i} has a non-numeric value") from None

    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        lineno, line = take(f"label {i}")
        try:
            labels[i] = int(line)
        except ValueError:
            raise ParseError(f"{source}:{lineno}: label {i} must be an integer") from None
        if not 0 <= labels[i] < classes:
            raise LabelOutOfRange(
                f"{source}:{lineno}: label {labels[i]} outside [0, {classes})"
            )

    if pos != len(lines):
        extra_lineno = lines[pos][0]
        raise HeaderMismatch(
            f"{source}:{extra_lineno}: {len(lines) - pos} extra line(s) beyond header counts"
        )
    try:
        hg = build_hypergraph(n, edges)
        x = as_feature_matrix(rows)
    except Exception as exc:
        raise ParseError(f"{source}: {exc}") from exc
    return VertexDataset(hg, x, labels, classes)


def parse_dataset(path) -> VertexDataset:
    """Load a dataset file; errors report the path and line number."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return parse_dataset_text(text, source=str(path))


def serialize_dataset(ds: VertexDataset) -> str:
    out = [f"{ds.num_vertices} {ds.hypergraph.num_hyperedges} {ds.features.shape[1]} {ds.num_classes}"]
    for edge in ds.hyperedge_sets():
        out.append(" ".join(str(v) for v in edge))
    for row in ds.features:
        out.append(" ".join(repr(float(v)) for v in row))
    out.extend(str(int(label)) for label in ds.labels)
    return "\n".join(out) + "\n"


def write_dataset(ds: VertexDataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_dataset(ds))
