import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmlattice import fixtures
from cmlattice.complexes import (
    IdealPair,
    OrderIdeal,
    SqModule,
    canonical_module_of_ring,
    delta_value,
    ext_complex,
    ext_modules,
    face_ring,
    full_ideal,
    order_ideal_from_generator_sets,
    order_ideal_from_ideal_generators,
    order_ideal_from_seeds,
    pair_module,
    pure_skeleton,
    regularize,
    sheaf_cochain,
    skeleton,
    zero_module,
)
from cmlattice.errors import (
    ExponentOutsideCone,
    IndexOutOfRange,
    InvalidPair,
    NonCommutingDiamond,
    NotAnOrderIdeal,
    NotRadicalDetected,
    ValidationError,
)
from cmlattice.linalg import ExactMatrix, FieldConfig, cohomology, rank

SQUARE = fixtures.square_cone()
PENTAGON = fixtures.pentagon_cone()
O2, O3, O4 = (fixtures.orthant(d) for d in (2, 3, 4))
ALL = [O2, O3, O4, SQUARE, PENTAGON]


def gsets(delta):
    return sorted(sorted(delta.cone.face(f).generator_set) for f in delta)


def hdims(c):
    return cohomology(c, with_basis=False).as_dict()


class TestOrderIdeals:
    def test_full_seed(self):
        assert order_ideal_from_seeds(SQUARE, [SQUARE.top]) == full_ideal(SQUARE)

    def test_empty_seeds(self):
        d = order_ideal_from_seeds(SQUARE, [])
        assert d.faces == {SQUARE.bottom}
        assert d.dim == -1
        assert face_ring(d).values[SQUARE.bottom] == 1
        assert sum(face_ring(d).values.values()) == 1

    def test_square_boundary(self):
        d = fixtures.square_boundary(SQUARE)
        assert len(d) == 9 and SQUARE.top not in d
        assert d.dim == 1

    def test_not_downward_closed(self):
        with pytest.raises(NotAnOrderIdeal):
            OrderIdeal(SQUARE, frozenset({SQUARE.bottom, SQUARE.top}))
        with pytest.raises(NotAnOrderIdeal):
            OrderIdeal(SQUARE, frozenset(SQUARE.rays))

    def test_saturation_of_generator_sets(self):
        # generators 0 and 2 of the square are opposite corners: they span the full cone
        d = order_ideal_from_generator_sets(SQUARE, [[0, 2]])
        assert d == full_ideal(SQUARE)


class TestIdealGenerators:
    def test_no_exponents(self):
        assert order_ideal_from_ideal_generators(SQUARE, []) == full_ideal(SQUARE)

    def test_xy(self):
        d = order_ideal_from_ideal_generators(O2, [(1, 1)])
        assert gsets(d) == [[], [0], [1]]

    def test_square_interior_exponent(self):
        d = order_ideal_from_ideal_generators(SQUARE, [(1, 1, 2)])
        assert d == fixtures.square_boundary(SQUARE)

    def test_non_radical(self):
        with pytest.raises(NotRadicalDetected):
            order_ideal_from_ideal_generators(O2, [(2, 0)])

    def test_outside(self):
        with pytest.raises(ExponentOutsideCone):
            order_ideal_from_ideal_generators(O2, [(-1, 1)])

    def test_unit_ideal(self):
        with pytest.raises(ValidationError) as e:
            order_ideal_from_ideal_generators(O2, [(0, 0)])
        assert e.value.code == "unit-ideal"

    def test_monomial_primes(self):
        # (x) in K[x,y,z] kills every face containing the first ray
        d = order_ideal_from_ideal_generators(O3, [(1, 0, 0)])
        assert gsets(d) == [[], [1], [1, 2], [2]]


class TestSkeleta:
    def test_top_skeleton_is_identity(self):
        d = fixtures.triangle_with_pendant_edge(O4)
        assert skeleton(d, d.dim) == d
        assert pure_skeleton(fixtures.square_boundary(SQUARE), 1) == fixtures.square_boundary(SQUARE)

    def test_triangle_with_pendant_edge(self):
        d = fixtures.triangle_with_pendant_edge(O4)
        p1 = pure_skeleton(d, 1)
        assert p1 == order_ideal_from_generator_sets(O4, [[0, 1], [0, 2], [1, 2], [0, 3]])
        p2 = pure_skeleton(d, 2)
        assert p2 == order_ideal_from_generator_sets(O4, [[0, 1, 2]])
        assert delta_value(d, O4.face_by_generators([3])) == 1
        assert delta_value(d, O4.face_by_generators([0])) == 2

    def test_out_of_range(self):
        d = fixtures.two_disjoint_edges(O4)
        with pytest.raises(IndexOutOfRange):
            skeleton(d, 2)
        with pytest.raises(IndexOutOfRange):
            pure_skeleton(d, -2)


class TestPairs:
    def test_sigma_must_be_contained(self):
        a = order_ideal_from_generator_sets(O2, [[0]])
        b = order_ideal_from_generator_sets(O2, [[1]])
        with pytest.raises(InvalidPair) as e:
            IdealPair(a, b)
        assert e.value.code == "sigma-not-contained"

    def test_sigma_origin_excluded(self):
        with pytest.raises(InvalidPair):
            IdealPair(full_ideal(O2), order_ideal_from_seeds(O2, []))

    def test_empty_sigma_is_face_ring(self):
        d = fixtures.square_boundary(SQUARE)
        m = pair_module(IdealPair(d))
        assert all(m.value_dim(f) == (1 if f in d else 0) for f in range(len(SQUARE.faces)))

    def test_omega_like(self):
        m = pair_module(IdealPair(full_ideal(SQUARE), fixtures.square_boundary(SQUARE)))
        assert m.support == [SQUARE.top]

    def test_equal_pair_is_zero(self):
        d = fixtures.square_boundary(SQUARE)
        assert pair_module(IdealPair(d, d)).is_zero()


class TestModules:
    def test_non_commuting_diamond(self):
        one = ExactMatrix.identity(O2.field, 1)
        values = {f.id: 1 for f in O2.faces}
        maps = {(lo, hi): one for lo, hi, _ in O2.covers}
        SqModule(O2, values, maps)
        r0, r1 = O2.rays
        maps[(r0, O2.top)] = one.scale(2)
        with pytest.raises(NonCommutingDiamond):
            SqModule(O2, values, maps)

    def test_bad_shape(self):
        with pytest.raises(ValidationError):
            SqModule(O2, {O2.top: 1}, {(O2.rays[0], O2.top): ExactMatrix.identity(O2.field, 2)})


class TestExtComplex:
    def test_residue_field(self):
        m = face_ring(order_ideal_from_seeds(SQUARE, []))
        c = ext_complex(m, SQUARE.bottom)
        assert [c.dim(i) for i in range(4)] == [0, 0, 0, 1]
        assert hdims(c) == {3: 1}

    def test_xy_at_origin(self):
        m = face_ring(fixtures.xy_ideal(O2))
        c = ext_complex(m, O2.bottom)
        assert (c.dim(0), c.dim(1), c.dim(2)) == (0, 2, 1)
        assert rank(c.d(1)) == 1
        h = cohomology(c)
        assert (h.dim(1), h.dim(2)) == (1, 0)

    def test_xy_at_ray(self):
        m = face_ring(fixtures.xy_ideal(O2))
        c = ext_complex(m, O2.rays[0])
        assert [c.dim(i) for i in range(3)] == [0, 1, 0]
        assert hdims(c) == {1: 1}

    @pytest.mark.parametrize("cone", ALL, ids=lambda c: f"d{c.dim}-{len(c.faces)}")
    def test_term_dims_count_faces_of_the_difference(self, cone):
        rng = random.Random(len(cone.faces))
        for delta in fixtures.random_order_ideals(cone, 8, seed=1):
            sub = [f for f in delta if rng.random() < 0.4]
            sigma = order_ideal_from_seeds(cone, sub)
            if sigma.faces == {cone.bottom}:
                sigma = None
            pair = IdealPair(delta, sigma)
            m = pair_module(pair)
            for f in cone.faces:
                c = ext_complex(m, f.id)
                for i in range(cone.dim + 1):
                    expected = sum(1 for g in pair.difference
                                   if cone.contains(g, f.id) and cone.face(g).cone_dim == cone.dim - i)
                    assert c.dim(i) == expected


class TestSheaf:
    def test_two_rays(self):
        c = sheaf_cochain(face_ring(fixtures.xy_ideal(O2)))
        assert [c.dim(i) for i in range(3)] == [2, 0, 0]
        assert hdims(c) == {0: 2}

    def test_circle(self):
        c = sheaf_cochain(face_ring(fixtures.square_boundary(SQUARE)))
        assert (c.dim(0), c.dim(1)) == (4, 4)
        assert hdims(c) == {0: 1, 1: 1}

    def test_zero(self):
        c = sheaf_cochain(zero_module(SQUARE))
        assert hdims(c) == {}


class TestExtModules:
    def test_canonical_module(self):
        for cone in (O3, SQUARE, PENTAGON):
            ext = ext_modules(canonical_module_of_ring(cone))
            n0 = ext[0]
            assert all(n0.value_dim(f.id) == 1 for f in cone.faces)
            assert all(m.is_zero() for j, m in ext.items() if j > 0)
            for lo, hi, _ in cone.covers:
                assert n0.phi(hi, lo) == ExactMatrix.identity(cone.field, 1)

    def test_xy(self):
        ext = ext_modules(face_ring(fixtures.xy_ideal(O2)))
        n1 = ext[1]
        assert n1.support == sorted([O2.bottom, *O2.rays])
        assert ext[2].is_zero() and ext[0].is_zero()

    def test_zero(self):
        assert all(m.is_zero() for m in ext_modules(zero_module(SQUARE)).values())

    @pytest.mark.parametrize("cone", [O4, SQUARE, PENTAGON], ids=["o4", "square", "pentagon"])
    def test_functoriality_on_random_ideals(self, cone):
        # ext_modules validates every diamond of the induced maps
        for delta in fixtures.random_order_ideals(cone, 10, seed=3):
            ext_modules(face_ring(delta), validate=True)


class TestDifferenceOnly:
    @pytest.mark.parametrize("cone", [O3, O4, SQUARE, PENTAGON], ids=["o3", "o4", "square", "pentagon"])
    def test_pairs_with_equal_difference_have_equal_ext(self, cone):
        rng = random.Random(7)
        checked = 0
        for delta in fixtures.random_order_ideals(cone, 15, seed=5):
            sigma = order_ideal_from_seeds(cone, [f for f in delta if rng.random() < 0.5])
            if sigma.faces == {cone.bottom}:
                continue
            pair = IdealPair(delta, sigma)
            diff = pair.difference
            if not diff:
                continue
            closure = order_ideal_from_seeds(cone, diff)
            rest = closure.faces - diff
            if rest == {cone.bottom}:
                continue
            small = IdealPair(closure, order_ideal_from_seeds(cone, rest) if rest else None)
            assert small.difference == diff
            a, b = pair_module(pair), pair_module(small)
            for f in diff:
                assert hdims(ext_complex(a, f)) == hdims(ext_complex(b, f))
            checked += 1
        assert checked > 0


class TestRegularize:
    def test_connected(self):
        m = face_ring(fixtures.square_boundary(SQUARE))
        r = regularize(m)
        assert r.values == m.values

    def test_two_rays(self):
        r = regularize(face_ring(fixtures.xy_ideal(O2)))
        assert r.value_dim(O2.bottom) == 2
        assert all(r.value_dim(x) == 1 for x in O2.rays)

    def test_zero(self):
        assert regularize(zero_module(SQUARE)).is_zero()

    @pytest.mark.parametrize("cone", ALL, ids=lambda c: f"d{c.dim}-{len(c.faces)}")
    def test_idempotent_on_value_dims(self, cone):
        for delta in fixtures.random_order_ideals(cone, 8, seed=11):
            once = regularize(face_ring(delta))
            assert regularize(once).values == once.values


@given(st.integers(0, 10_000), st.sampled_from(["o3", "square", "pentagon"]))
@settings(max_examples=25, deadline=None)
def test_every_generated_complex_squares_to_zero(seed, name):
    cone = {"o3": O3, "square": SQUARE, "pentagon": PENTAGON}[name]
    delta = fixtures.random_order_ideal(cone, random.Random(seed))
    m = face_ring(delta)
    for f in delta:
        c = ext_complex(m, f)  # construction validates d^2 = 0
        assert cohomology(c).euler_characteristic() == c.euler_characteristic()
    c = sheaf_cochain(m)
    assert cohomology(c).euler_characteristic() == c.euler_characteristic()


@pytest.mark.parametrize("p", [2, 3, 32003])
def test_prime_fields_build_the_same_complexes(p):
    fld = FieldConfig("prime", p)
    cone = fixtures.square_cone(fld)
    c = sheaf_cochain(face_ring(fixtures.square_boundary(cone)))
    assert hdims(c) == {0: 1, 1: 1}

