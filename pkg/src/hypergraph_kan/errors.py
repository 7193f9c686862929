"""Exception types shared across the package."""


class HypergraphKanError(Exception):
    """Base class for all errors raised by this package."""


class EmptyHyperedge(HypergraphKanError):
    """A hyperedge with no member vertices was supplied."""


class VertexIndexOutOfRange(HypergraphKanError):
    """A hyperedge refers to a vertex index outside [0, num_vertices)."""


class DimensionMismatch(HypergraphKanError):
    """Operand shapes are incompatible."""


class InvalidHopCount(HypergraphKanError):
    """Hop count must be at least 1."""


class StaleForwardCache(HypergraphKanError):
    """A backward pass was attempted with a cache from an outdated forward pass."""


class TooFewVertices(HypergraphKanError):
    """Not enough labeled vertices to form a train/val/test split."""


class EmptySubset(HypergraphKanError):
    """Loss was requested over an empty vertex subset."""


class ShapeMismatch(HypergraphKanError):
    """Gradient and parameter shapes disagree."""


class ParseError(HypergraphKanError):
    """A dataset or config file is malformed; message carries line context."""


class HeaderMismatch(ParseError):
    """Dataset body does not match the counts declared in its header."""


class LabelOutOfRange(ParseError):
    """A vertex label lies outside [0, num_classes)."""


class IoError(HypergraphKanError):
    """A filesystem write or read failed; message carries the path."""


class UsageError(HypergraphKanError):
    """Bad command-line invocation."""
