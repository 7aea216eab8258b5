"""Exception hierarchy.

Every error carries the process exit code the command-line front end uses
when it escapes: 2 for bad input data, 3 for unmet preconditions.
"""

from __future__ import annotations


class HeegaardFillError(Exception):
    exit_code = 1


# --- input data (exit code 2) ------------------------------------------------


class InputError(HeegaardFillError):
    exit_code = 2


class MalformedTable(InputError):
    pass


class NonInvolutiveGluing(InputError):
    pass


class SelfGluedFace(InputError):
    pass


class BouquetError(InputError):
    """A filling bouquet failed validation."""


class NonBoundaryWeight(BouquetError):
    def __init__(self, edge: int, weight: int):
        self.edge = edge
        super().__init__(
            f"Edge {edge} is internal, so its weight must be 0, not {weight}"
        )


class MatchingError(BouquetError):
    def __init__(self, face: int):
        self.face = face
        super().__init__(
            "Edge weights fail to satisfy the matching constraints "
            f"in triangle {face}"
        )


class WrongPetalCount(BouquetError):
    def __init__(self, petals: int, genus: int):
        self.petals = petals
        self.genus = genus
        super().__init__(
            f"Bouquet has {petals} filling petals but the boundary has genus {genus}"
        )


class TransversePetals(BouquetError):
    def __init__(self, first: str, second: str):
        self.pair = (first, second)
        super().__init__(
            f"Edges {first} and {second} form a pair of resolved filling "
            "petals that meet transversely"
        )


class Separating(BouquetError):
    def __init__(self, components: int):
        self.components = components
        super().__init__(
            "After cutting along the filling bouquet, the boundary surface "
            f"splits into {components} components"
        )


class UnrootedCurve(BouquetError):
    def __init__(self):
        super().__init__(
            "A normal curve was left over after resolving all filling petals"
        )


# --- preconditions (exit code 3) ---------------------------------------------


class PreconditionError(HeegaardFillError):
    exit_code = 3


class NotBoundary(PreconditionError):
    pass


class SameFace(PreconditionError):
    pass


class InvalidTriangulation(PreconditionError):
    pass


class Disconnected(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class BadOrder(PreconditionError):
    pass


class UnsupportedSpine(PreconditionError):
    pass


class NoReducibleEdge(PreconditionError):
    pass
