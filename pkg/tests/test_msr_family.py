"""Families of aligned subspaces: construction, verification, size bound."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from msrlab.errors import (
    BadLambda,
    BadParams,
    FieldTooSmall,
    StructuralError,
)
from msrlab.field import FieldSpec
from msrlab.matrix import Matrix
from msrlab.msr_family import (
    MsrSubspaceFamily,
    compare_to_log_multiple,
    construct_tensor_family,
)
from msrlab.subspace import Subspace

GF3 = FieldSpec(3)
GF5 = FieldSpec(5)

SWAP3 = Matrix(GF3, [[0, 1], [1, 0]])


def line(values):
    return Subspace.span_of(Matrix(GF3, [values]))


def trivial_family():
    # one subspace span{(1,0)} with the swap map: the image span{(0,1)}
    # completes the regeneration sum, and alignment is vacuous at k = 1
    return MsrSubspaceFamily(
        ell=2, r=2, spec=GF3, subspaces=(line([1, 0]),), maps=((SWAP3,),)
    )


def swap_swap_family():
    # classic failure: each member's map moves the other member's line
    return MsrSubspaceFamily(
        ell=2,
        r=2,
        spec=GF3,
        subspaces=(line([1, 0]), line([0, 1])),
        maps=((SWAP3,), (SWAP3,)),
    )


# ---------------------------------------------------------------- structure

def test_trivial_family_verifies():
    family = trivial_family()
    report = family.verify()
    assert report.ok
    assert report.k == 1 and report.ell == 2 and report.r == 2
    assert family.map_matrix(0, 0) == Matrix.identity(GF3, 2)
    assert family.map_matrix(0, 1) == SWAP3


def test_swap_swap_family_fails_alignment():
    report = swap_swap_family().verify()
    assert not report.ok
    assert report.noninvertible == ()
    assert report.direct_sum_failures == ()
    assert report.alignment_failures == ((0, 1, 1), (1, 0, 1))
    assert report.summary_lines()[-1] == "VERIFY FAIL"


def test_verify_pass_summary():
    lines = trivial_family().verify().summary_lines()
    assert lines[-1] == "VERIFY PASS"


def test_structural_validation():
    with pytest.raises(StructuralError):  # wrong subspace dimension
        MsrSubspaceFamily(
            ell=2, r=2, spec=GF3, subspaces=(Subspace.full(GF3, 2),), maps=((SWAP3,),)
        )
    with pytest.raises(StructuralError):  # r does not divide ell
        MsrSubspaceFamily(
            ell=3, r=2, spec=GF3,
            subspaces=(Subspace.span_of(Matrix(GF3, [[1, 0, 0]])),),
            maps=((Matrix.identity(GF3, 3),),),
        )
    with pytest.raises(StructuralError):  # map grid is k x (r-1)
        MsrSubspaceFamily(
            ell=2, r=2, spec=GF3, subspaces=(line([1, 0]),), maps=((SWAP3, SWAP3),)
        )
    with pytest.raises(StructuralError):  # map has wrong shape
        MsrSubspaceFamily(
            ell=2, r=2, spec=GF3, subspaces=(line([1, 0]),),
            maps=((Matrix(GF3, [[1, 0]]),),),
        )


def test_noninvertible_map_reported_not_raised():
    family = MsrSubspaceFamily(
        ell=2, r=2, spec=GF3, subspaces=(line([1, 0]),),
        maps=((Matrix(GF3, [[0, 0], [0, 1]]),),),
    )
    report = family.verify()
    assert not report.ok
    assert report.noninvertible == ((0, 1),)


# ---------------------------------------------------------------- construction

def test_smallest_construction():
    family = construct_tensor_family(2, 1, GF3, 2)
    assert family.ell == 2 and family.r == 2 and family.k == 3
    bases = [s.basis.to_lists() for s in family.subspaces]
    assert bases == [[[1, 0]], [[0, 1]], [[1, 1]]]  # e0, e1, -(e0+e1) lines
    assert family.verify().ok


def test_construction_shape_invariants():
    for r, m, p, lam in ((2, 2, 3, 2), (3, 2, 5, 2), (3, 2, 7, 3)):
        family = construct_tensor_family(r, m, FieldSpec(p), lam)
        assert family.k == (r + 1) * m
        assert family.ell == r**m
        assert all(s.dim == r ** (m - 1) for s in family.subspaces)
        assert family.verify().ok


def test_construction_maps_have_two_eigenvalues():
    # each map acts as the scalar lam on a r^(m-1)-dim piece and as the
    # identity on the rest; check via rank of (M - lam I) and (M - I)
    for r, m, spec, lam in ((2, 2, GF3, 2), (3, 2, GF5, 2)):
        family = construct_tensor_family(r, m, spec, lam)
        ell, piece = family.ell, r ** (m - 1)
        eye = Matrix.identity(spec, ell)
        for i in range(family.k):
            for j in range(1, r):
                mat = family.map_matrix(i, j)
                assert (mat - eye * lam).rank() == ell - piece
                assert (mat - eye).rank() == piece


def test_construction_rejects_bad_params():
    with pytest.raises(BadParams):
        construct_tensor_family(1, 2, GF3, 2)
    with pytest.raises(BadParams):
        construct_tensor_family(2, 0, GF3, 2)
    with pytest.raises(FieldTooSmall):
        construct_tensor_family(2, 2, FieldSpec(2), 1)
    with pytest.raises(BadLambda):
        construct_tensor_family(2, 2, GF3, 0)
    with pytest.raises(BadLambda):
        construct_tensor_family(2, 2, GF3, 1)
    with pytest.raises(BadLambda):
        construct_tensor_family(2, 2, GF3, 4)  # 4 = 1 mod 3
    with pytest.raises(BadLambda):
        construct_tensor_family(2, 2, GF3, GF5.element(2))  # wrong field


def test_json_round_trip():
    family = construct_tensor_family(2, 2, GF3, 2)
    clone = MsrSubspaceFamily.from_json_dict(family.to_json_dict())
    assert clone == family
    assert hash(clone) == hash(family)
    assert clone.verify().ok


# ---------------------------------------------------------------- size bound

def test_bound_check_within():
    family = construct_tensor_family(2, 2, GF3, 2)
    report = family.bound_check()
    assert report.within_bound
    assert report.k == 6
    assert report.bound_approx == pytest.approx(8 * math.log(4))


def test_compare_to_log_multiple_known_signs():
    # 8 ln 4 = 11.0904...: 11 is below, 12 above
    assert compare_to_log_multiple(6, Fraction(8), 4) == -1
    assert compare_to_log_multiple(11, Fraction(8), 4) == -1
    assert compare_to_log_multiple(12, Fraction(8), 4) == 1


def test_compare_to_log_multiple_matches_float_log():
    # floats are fine as an oracle when the comparison is far from a tie
    for coeff in (1, 2, 8, 12):
        for ell in (2, 3, 8, 81, 1000):
            target = coeff * math.log(ell)
            for value in (int(target) - 1, int(target) + 2):
                want = -1 if value < target else 1
                assert compare_to_log_multiple(value, Fraction(coeff), ell) == want


def test_compare_to_log_multiple_near_ties():
    # 12 ln 9 = 26.3667: certified comparison must separate 26 and 27
    assert compare_to_log_multiple(26, Fraction(12), 9) == -1
    assert compare_to_log_multiple(27, Fraction(12), 9) == 1
    # fractions work as values too
    assert compare_to_log_multiple(Fraction(111, 10), Fraction(8), 4) == 1


def test_compare_to_log_multiple_edge_cases():
    assert compare_to_log_multiple(1, Fraction(5), 1) == 1  # ln 1 = 0
    assert compare_to_log_multiple(0, Fraction(5), 1) == 0
    with pytest.raises(BadParams):
        compare_to_log_multiple(1, Fraction(5), 0)
    with pytest.raises(BadParams):
        compare_to_log_multiple(1, Fraction(0), 4)


def test_all_constructed_families_within_bound():
    for r in (2, 3):
        for m in (1, 2, 3):
            family = construct_tensor_family(r, m, GF3 if r == 2 else GF5, 2)
            assert family.bound_check().within_bound
