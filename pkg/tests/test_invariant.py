"""Invariant-map dimensions, decay traces, composition checks."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from msrlab.errors import (
    AmbientMismatch,
    BadParams,
    IndexOutOfRange,
    LemmaViolation,
    MixedFields,
    VerificationRequired,
)
from msrlab.field import FieldSpec
from msrlab.invariant import (
    MapConstraint,
    composition_isomorphism_check,
    constraint_equations,
    decay_trace,
    invariant_dim,
    invariant_space,
)
from msrlab.matrix import Matrix
from msrlab.msr_family import MsrSubspaceFamily, construct_tensor_family
from msrlab.subspace import Subspace

GF2 = FieldSpec(2)
GF3 = FieldSpec(3)


def vec_row_major(mat):
    """A square matrix flattened to the row vector the encoding uses."""
    flat = [entry for row in mat.to_lists() for entry in row]
    return Matrix(mat.spec, [flat])


def brute_force_count(constraints, spec, ambient):
    """Count maps satisfying all constraints by trying every single matrix."""
    count = 0
    for entries in itertools.product(range(spec.p), repeat=ambient * ambient):
        rows = [
            list(entries[i * ambient : (i + 1) * ambient]) for i in range(ambient)
        ]
        candidate = Matrix(spec, rows)
        ok = True
        for c in constraints:
            for i in range(c.source.dim):
                if not c.target.contains_vector(c.source.basis.row(i) @ candidate):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def random_subspace(spec, ambient, rng):
    rows = rng.randrange(ambient + 1)
    if rows == 0:
        return Subspace.zero(spec, ambient)
    return Subspace(
        spec, ambient,
        Matrix(spec, [[rng.randrange(spec.p) for _ in range(ambient)] for _ in range(rows)]),
    )


# ---------------------------------------------------------------- dimensions

def test_no_constraints_gives_all_maps():
    assert invariant_dim([], spec=GF3, ambient=4) == 16
    space = invariant_space([], spec=GF3, ambient=4)
    assert space.is_full and space.ambient_dim == 16


def test_full_to_zero_gives_nothing():
    full = Subspace.full(GF3, 2)
    zero = Subspace.zero(GF3, 2)
    assert invariant_dim([MapConstraint(full, zero)], spec=GF3, ambient=2) == 0


def test_fixing_formula():
    # maps preserving one d-dim subspace of F^n form a space of dim
    # n^2 - d(n-d): d*n for the action on the subspace plus (n-d)*n minus
    # the d(n-d) entries forced to zero
    rng = random.Random(7)
    for _ in range(20):
        sub = random_subspace(GF3, 4, rng)
        d = sub.dim
        assert invariant_dim([MapConstraint.fixing(sub)]) == 16 - d * (4 - d)


def test_constraint_validation():
    full3 = Subspace.full(GF3, 2)
    with pytest.raises(BadParams):
        invariant_dim([])  # ambient unknown without spec/ambient kwargs
    with pytest.raises(AmbientMismatch):
        MapConstraint(full3, Subspace.full(GF3, 3))
    with pytest.raises(MixedFields):
        MapConstraint(full3, Subspace.full(FieldSpec(5), 2))


def test_constraint_equations_shape():
    sub = Subspace.span_of(Matrix(GF3, [[1, 0]]))
    eqs = constraint_equations(MapConstraint.fixing(sub))
    assert eqs.cols == 4
    assert eqs.rows == sub.dim * sub.annihilator().dim == 1


def test_identity_is_invariant_when_fixing():
    rng = random.Random(9)
    for _ in range(10):
        constraints = [MapConstraint.fixing(random_subspace(GF3, 3, rng)) for _ in range(3)]
        space = invariant_space(constraints, spec=GF3, ambient=3)
        assert space.contains_vector(vec_row_major(Matrix.identity(GF3, 3)))
        assert space.dim >= 1


def test_monotone_under_more_constraints():
    rng = random.Random(13)
    for _ in range(15):
        constraints = [
            MapConstraint(random_subspace(GF3, 3, rng), random_subspace(GF3, 3, rng))
            for _ in range(3)
        ]
        dims = [
            invariant_dim(constraints[:count], spec=GF3, ambient=3)
            for count in range(4)
        ]
        assert dims == sorted(dims, reverse=True)


def test_dimension_matches_brute_force_count():
    rng = random.Random(17)
    for p in (2, 3):
        spec = FieldSpec(p)
        for _ in range(8):
            constraints = [
                MapConstraint(random_subspace(spec, 2, rng), random_subspace(spec, 2, rng))
                for _ in range(rng.randrange(1, 4))
            ]
            count = brute_force_count(constraints, spec, 2)
            assert count == p ** invariant_dim(constraints, spec=spec, ambient=2)


def test_membership_agrees_with_constraints():
    # vectors of the invariant space are exactly the constraint-satisfying maps
    rng = random.Random(19)
    source = random_subspace(GF2, 2, rng)
    target = random_subspace(GF2, 2, rng)
    constraints = [MapConstraint(source, target)]
    space = invariant_space(constraints, spec=GF2, ambient=2)
    for entries in itertools.product(range(2), repeat=4):
        candidate = Matrix(GF2, [entries[:2], entries[2:]])
        satisfied = all(
            target.contains_vector(source.basis.row(i) @ candidate)
            for i in range(source.dim)
        )
        assert space.contains_vector(vec_row_major(candidate)) == satisfied


# ---------------------------------------------------------------- decay

def test_decay_trace_small_family():
    family = construct_tensor_family(2, 2, GF3, 2)
    trace = decay_trace(family)
    assert trace.order == (0, 1, 2, 3, 4, 5)
    assert trace.dims == (16, 12, 8, 4, 3, 2, 1)
    assert trace.ratios == (
        Fraction(3, 4),
        Fraction(2, 3),
        Fraction(1, 2),
        Fraction(3, 4),
        Fraction(2, 3),
        Fraction(1, 2),
    )
    assert trace.bounds[0] == 16
    assert trace.bounds[1] == 12
    assert all(dim <= bound for dim, bound in zip(trace.dims, trace.bounds))
    rows = trace.csv_rows()
    assert rows[0] == (0, 16, 16, 1, True)
    assert rows[-1] == (6, 1, 729, 256, True)  # 16 * (3/4)**6 = 729/256
    assert all(row[4] for row in rows)


def test_decay_trace_order_independent_endpoints():
    family = construct_tensor_family(2, 2, GF3, 2)
    rng = random.Random(23)
    for _ in range(5):
        order = list(range(family.k))
        rng.shuffle(order)
        trace = decay_trace(family, order)
        assert trace.dims[0] == 16
        assert trace.dims[-1] >= 1


def test_decay_requires_verified_family():
    bad = MsrSubspaceFamily(
        ell=2, r=2, spec=GF3,
        subspaces=(
            Subspace.span_of(Matrix(GF3, [[1, 0]])),
            Subspace.span_of(Matrix(GF3, [[0, 1]])),
        ),
        maps=((Matrix(GF3, [[0, 1], [1, 0]]),), (Matrix(GF3, [[0, 1], [1, 0]]),)),
    )
    with pytest.raises(VerificationRequired):
        decay_trace(bad)


def test_decay_rejects_bad_order():
    family = construct_tensor_family(2, 1, GF3, 2)
    with pytest.raises(BadParams):
        decay_trace(family, [0, 0, 1])
    with pytest.raises(BadParams):
        decay_trace(family, [0, 1])  # wrong length


def test_lemma_violation_payload():
    exc = LemmaViolation("boom", payload={"step": 3, "dims": [4, 4]})
    assert exc.payload == {"step": 3, "dims": [4, 4]}
    assert LemmaViolation("bare").payload == {}


# ---------------------------------------------------------------- composition

def test_composition_isomorphism_full_grid():
    family = construct_tensor_family(2, 1, GF3, 2)
    for t in range(1, family.k + 1):
        for j in range(family.r):
            assert composition_isomorphism_check(family, t, j)


def test_composition_isomorphism_range_errors():
    family = construct_tensor_family(2, 1, GF3, 2)
    with pytest.raises(IndexOutOfRange):
        composition_isomorphism_check(family, 0, 1)
    with pytest.raises(IndexOutOfRange):
        composition_isomorphism_check(family, family.k + 1, 1)
    with pytest.raises(IndexOutOfRange):
        composition_isomorphism_check(family, 1, family.r)
