"""Triangulations of 3-manifolds filled along rooted filling bouquets."""

from .analysis import CensusRecord, OrderWidthResult, enumerate_census, exact_cutwidth, order_width
from .bouquet import (
    INCOMPATIBLE,
    ArcCoordinates,
    FillingBouquet,
    FlipWeightBreakdown,
    arc_coordinates,
    flip_weight,
    reducible_edges,
    validate,
)
from .errors import BouquetError, HeegaardFillError, InputError, PreconditionError
from .filler import (
    FillResult,
    FillState,
    Strategy,
    ball_filler,
    fill,
    petal_resolver,
    quad_isolator,
    resolution_path,
    wedge_folder,
)
from .fixtures import ehugabdes
from .homology import AbelianGroup
from .moves import (
    ConstructionLog,
    LoggedTriangulation,
    build_minimal_layered_handlebody,
    fold_across,
    layer_over_boundary_edge,
    replay,
)
from .tri_kernel import (
    Triangulation3,
    canonical_signature,
    dual_multigraph,
    format_gluing_table,
    h1,
    parse_gluing_table,
    status,
    vertex_link,
)

__all__ = [name for name in dir() if not name.startswith("_")]
