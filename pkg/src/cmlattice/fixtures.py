"""Built-in cones and order ideals used by the self-check and the tests."""
from __future__ import annotations

import random
import warnings
from typing import Callable

from .cone import NormalityNotVerified, SemigroupCone, build_cone
from .complexes import OrderIdeal, order_ideal_from_generator_sets, order_ideal_from_seeds
from .linalg import QQ, FieldConfig

SQUARE_GENERATORS = [(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 0, 1)]
# lattice pentagon (0,0),(1,0),(2,1),(1,2),(0,1) at height 1, plus its interior point
PENTAGON_GENERATORS = [(0, 0, 1), (1, 0, 1), (2, 1, 1), (1, 2, 1), (0, 1, 1), (1, 1, 1)]


def orthant_generators(d: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(d)) for i in range(d)]


def _build(gens, field: FieldConfig, box: int | None) -> SemigroupCone:
    if box is not None:
        return build_cone(gens, field, normality_box=box)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NormalityNotVerified)
        return build_cone(gens, field)


def orthant(d: int, field: FieldConfig = QQ, box: int | None = 2) -> SemigroupCone:
    return _build(orthant_generators(d), field, box)


def square_cone(field: FieldConfig = QQ, box: int | None = 3) -> SemigroupCone:
    return _build(SQUARE_GENERATORS, field, box)


def pentagon_cone(field: FieldConfig = QQ, box: int | None = 3) -> SemigroupCone:
    return _build(PENTAGON_GENERATORS, field, box)


BUILTIN_CONES: dict[str, Callable[[FieldConfig], SemigroupCone]] = {
    "orthant2": lambda f: orthant(2, f),
    "orthant3": lambda f: orthant(3, f),
    "orthant4": lambda f: orthant(4, f),
    "square": square_cone,
    "pentagon": pentagon_cone,
}


def square_boundary(cone: SemigroupCone) -> OrderIdeal:
    """All proper faces of a 3-dimensional cone: a circle."""
    return order_ideal_from_seeds(cone, cone.faces_of_dim(cone.dim - 1))


def xy_ideal(cone: SemigroupCone) -> OrderIdeal:
    """I = (xy) in K[x, y]: the two rays."""
    return order_ideal_from_generator_sets(cone, [[0], [1]])


def triangle_with_pendant_edge(cone: SemigroupCone) -> OrderIdeal:
    return order_ideal_from_generator_sets(cone, [[0, 1, 2], [0, 3]])


def two_disjoint_edges(cone: SemigroupCone) -> OrderIdeal:
    return order_ideal_from_generator_sets(cone, [[0, 1], [2, 3]])


def edge_plus_vertex(cone: SemigroupCone) -> OrderIdeal:
    return order_ideal_from_generator_sets(cone, [[0, 1], [2]])


def random_order_ideal(cone: SemigroupCone, rng: random.Random) -> OrderIdeal:
    """Down-closure of 0 to 3 random faces."""
    pool = [f.id for f in cone.faces if f.id != cone.bottom]
    k = rng.randint(0, min(3, len(pool)))
    return order_ideal_from_seeds(cone, rng.sample(pool, k))


def random_order_ideals(cone: SemigroupCone, n: int, seed: int = 0) -> list[OrderIdeal]:
    rng = random.Random(seed)
    return [random_order_ideal(cone, rng) for _ in range(n)]
