"""Exception hierarchy.

Everything raised on purpose derives from :class:`ClusteringError`.  The two
intermediate classes decide the CLI exit code: :class:`DataError` maps to 2,
:class:`NumericError` to 3.
"""


class ClusteringError(Exception):
    """Base class for all library errors."""


class DataError(ClusteringError, ValueError):
    """Invalid input data or arguments."""


class NumericError(ClusteringError, ArithmeticError):
    """A quantity is undefined for the given (valid) input."""


class EmptyInput(DataError):
    pass


class InvalidDataset(DataError):
    pass


class BadK(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooFewPoints(DataError):
    pass


class BadClusterCount(DataError):
    pass


class BadSpec(DataError):
    pass


class EmptyFile(DataError):
    pass


class RaggedRows(DataError):
    pass


class ParseError(DataError):
    def __init__(self, row: int, column: int, value: str = ""):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"cannot parse {value!r} as a finite number at row {row}, column {column}")


class MissingCell(DataError):
    pass


class DegenerateFeature(NumericError):
    pass


class IdenticalCentroids(NumericError):
    pass


class EmptyCluster(NumericError):
    def __init__(self, cluster_index: int):
        self.cluster_index = cluster_index
        super().__init__(f"cluster {cluster_index} has no members")
