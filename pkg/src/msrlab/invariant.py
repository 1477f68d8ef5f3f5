"""Dimension counting for spaces of constrained linear maps.

A map psi on F^ell (acting on row vectors from the right) satisfies the
constraint (A, B) when psi sends A into B. The maps satisfying a list of
constraints form a subspace of the ell*ell dimensional space of all maps;
this module computes it exactly.

Encoding: vectorize psi row-major into ell**2 unknowns. For a basis row a
of A and an annihilator row n of B, the condition (a psi) . n = 0 is one
linear equation whose coefficient vector is exactly the Kronecker product
a (x) n, so each constraint contributes dim(A) * (ell - dim(B)) equations
and the constrained maps are the kernel of the stacked system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import (
    AmbientMismatch,
    BadParams,
    IndexOutOfRange,
    LemmaViolation,
    MixedFields,
    VerificationRequired,
)
from .field import FieldSpec
from .matrix import Matrix
from .subspace import Subspace

if TYPE_CHECKING:  # pragma: no cover
    from .msr_family import MsrSubspaceFamily


@dataclass(frozen=True)
class MapConstraint:
    """Require psi(source) to lie inside target."""

    source: Subspace
    target: Subspace

    def __post_init__(self):
        if self.source.spec != self.target.spec:
            raise MixedFields("constraint endpoints over different fields")
        if self.source.ambient_dim != self.target.ambient_dim:
            raise AmbientMismatch(
                f"constraint endpoints in F^{self.source.ambient_dim} "
                f"and F^{self.target.ambient_dim}"
            )

    @classmethod
    def fixing(cls, subspace: Subspace) -> MapConstraint:
        """The one-sided shorthand: the subspace must map into itself."""
        return cls(subspace, subspace)


def _as_constraint(obj) -> MapConstraint:
    if isinstance(obj, MapConstraint):
        return obj
    if isinstance(obj, Subspace):
        return MapConstraint.fixing(obj)
    raise TypeError(f"expected MapConstraint or Subspace, got {type(obj).__name__}")


def constraint_equations(constraint: MapConstraint) -> Matrix:
    """Equation rows on the vectorized map imposed by one constraint."""
    source = constraint.source.basis
    annihilator = constraint.target.annihilator().basis
    ell = constraint.source.ambient_dim
    if source.rows == 0 or annihilator.rows == 0:
        return Matrix.zeros(constraint.source.spec, 0, ell * ell)
    return source.kron(annihilator)


def _resolve(constraints, spec, ambient):
    resolved = [_as_constraint(c) for c in constraints]
    if resolved:
        first = resolved[0]
        spec = first.source.spec if spec is None else spec
        ambient = first.source.ambient_dim if ambient is None else ambient
    if spec is None or ambient is None:
        raise BadParams("empty constraint list needs explicit spec and ambient")
    for c in resolved:
        if c.source.spec != spec:
            raise MixedFields("constraints over different fields")
        if c.source.ambient_dim != ambient:
            raise AmbientMismatch("constraints in different ambient spaces")
    return resolved, spec, ambient


def invariant_space(
    constraints: Iterable, *, spec: FieldSpec | None = None, ambient: int | None = None
) -> Subspace:
    """The subspace of F^(ell**2) of vectorized maps satisfying every
    constraint. Bare subspaces in the list mean "maps into itself"."""
    resolved, spec, ambient = _resolve(constraints, spec, ambient)
    if not resolved:
        return Subspace.full(spec, ambient * ambient)
    system = Matrix.vstack([constraint_equations(c) for c in resolved])
    return Subspace.span_of(system.kernel())


def invariant_dim(
    constraints: Iterable, *, spec: FieldSpec | None = None, ambient: int | None = None
) -> int:
    resolved, spec, ambient = _resolve(constraints, spec, ambient)
    if not resolved:
        return ambient * ambient
    system = Matrix.vstack([constraint_equations(c) for c in resolved])
    return ambient * ambient - system.rank()


@dataclass(frozen=True)
class DecayTrace:
    """Invariant dimensions along a prefix order of a verified family.

    dims[t] is the dimension after constraining the first t members (so
    dims[0] = ell**2), bounds[t] is the exact rational envelope
    ell**2 * ((2r-1)/(2r))**t, and ratios[t-1] = dims[t]/dims[t-1]. A trace
    object only exists if every per-step inequality held and dims[k] >= 1;
    violations raise LemmaViolation instead.
    """

    ell: int
    r: int
    k: int
    order: tuple[int, ...]
    dims: tuple[int, ...]
    bounds: tuple[Fraction, ...]
    ratios: tuple[Fraction, ...]

    def csv_rows(self) -> list[tuple[int, int, int, int, bool]]:
        """Rows (t, I_t, bound_numerator, bound_denominator, pass)."""
        rows = []
        for t in range(self.k + 1):
            bound = self.bounds[t]
            rows.append(
                (t, self.dims[t], bound.numerator, bound.denominator, self.dims[t] <= bound)
            )
        return rows


def _require_verified(family: "MsrSubspaceFamily"):
    report = family.verify()
    if not report.ok:
        raise VerificationRequired(
            "family fails verification: "
            f"noninvertible={list(report.noninvertible)}, "
            f"direct_sum_failures={list(report.direct_sum_failures)}, "
            f"alignment_failures={list(report.alignment_failures)}"
        )


def decay_trace(
    family: "MsrSubspaceFamily", order: Sequence[int] | None = None
) -> DecayTrace:
    """Constrain the family members one by one (in `order`, default the
    family's own order) and record the invariant dimension after each step.

    Every step must drop the dimension by the factor (2r-1)/(2r) at least,
    and the final dimension must stay >= 1; a verified family violating
    either raises LemmaViolation with the offending state attached.
    """
    _require_verified(family)
    k = family.k
    if order is None:
        order = tuple(range(k))
    else:
        order = tuple(int(i) for i in order)
        if sorted(order) != list(range(k)):
            raise BadParams(f"order must be a permutation of range({k})")
    ell, r = family.ell, family.r
    dims = [ell * ell]
    constraints: list[MapConstraint] = []
    for t, member in enumerate(order, start=1):
        constraints.append(MapConstraint.fixing(family.subspaces[member]))
        dim = invariant_dim(constraints, spec=family.spec, ambient=ell)
        # exact integer form of dims[t] <= dims[t-1] * (2r-1)/(2r)
        if 2 * r * dim > (2 * r - 1) * dims[-1]:
            raise LemmaViolation(
                f"decay step {t} failed: {dim} > {dims[-1]} * (2r-1)/2r",
                payload={
                    "family": family.to_json_dict(),
                    "order": list(order),
                    "step": t,
                    "dims": dims + [dim],
                },
            )
        dims.append(dim)
    if dims[k] < 1:
        raise LemmaViolation(
            f"final invariant dimension {dims[k]} < 1",
            payload={"family": family.to_json_dict(), "order": list(order), "dims": dims},
        )
    factor = Fraction(2 * r - 1, 2 * r)
    bounds = tuple(ell * ell * factor**t for t in range(k + 1))
    ratios = tuple(Fraction(dims[t], dims[t - 1]) for t in range(1, k + 1))
    return DecayTrace(
        ell=ell, r=r, k=k, order=order, dims=tuple(dims), bounds=bounds, ratios=ratios
    )


def composition_isomorphism_check(family: "MsrSubspaceFamily", t: int, j: int) -> bool:
    """Check that composing with member t's slot-j map leaves the
    constrained-map dimension unchanged, in both of these forms:

      dim F(H_1..H_{t-1}, H_t)
        == dim F(H_1..H_{t-1}, phi_j(H_t) -> H_t)
        == dim F(H_1..H_{t-1}, phi_j(H_t) -> phi_1(H_t))

    t is the 1-based prefix length (1 <= t <= k); j is a map slot with 0
    meaning the identity. True for every verified family.
    """
    _require_verified(family)
    if not 1 <= t <= family.k:
        raise IndexOutOfRange(f"t={t} outside 1..{family.k}")
    if not 0 <= j <= family.r - 1:
        raise IndexOutOfRange(f"slot j={j} outside 0..{family.r - 1}")
    if family.r < 2:
        raise IndexOutOfRange("check needs r >= 2 (slot 1 must exist)")
    member = t - 1
    prefix = [MapConstraint.fixing(s) for s in family.subspaces[:member]]
    h_t = family.subspaces[member]
    image_j = h_t.apply_map(family.map_matrix(member, j))
    image_1 = h_t.apply_map(family.map_matrix(member, 1))
    spec, ell = family.spec, family.ell
    base = invariant_dim(prefix + [MapConstraint.fixing(h_t)], spec=spec, ambient=ell)
    via_fix = invariant_dim(prefix + [MapConstraint(image_j, h_t)], spec=spec, ambient=ell)
    via_translate = invariant_dim(
        prefix + [MapConstraint(image_j, image_1)], spec=spec, ambient=ell
    )
    return base == via_fix == via_translate
