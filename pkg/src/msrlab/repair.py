"""Systematic vector codes, repair schemes, and bandwidth accounting.

A systematic vector code stores k data blocks of ell field symbols on nodes
0..k-1 and r = n-k parity blocks on nodes k..n-1, with parity unit i holding
sum_j C[i][j] @ data_j for invertible ell x ell blocks C[i][j]. Blocks are
column vectors (ell x 1 matrices).

A repair scheme assigns to every systematic node m and parity unit i a full
row rank (ell/r) x ell matrix S; parity node k+i answers a repair of node m
with S @ (its block), i.e. ell/r symbols. The scheme regenerates node m when
the r row spaces R(S C[i][m]) sum directly to F^ell, and it aligns
interference when for every other systematic node m' the r row spaces
R(S C[i][m']) coincide, so one ell/r symbol message from node m' cancels its
contribution out of every parity answer. Both conditions together are what
check_msr_scheme certifies, and they make repair_node hit the cutset bound
(n-1) ell / (n-k) exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    BadParams,
    IndexOutOfRange,
    MixedFields,
    SchemeInvalid,
    ShapeMismatch,
    StructuralError,
)
from .field import FieldSpec
from .matrix import Matrix
from .msr_family import MsrSubspaceFamily, construct_tensor_family
from .subspace import Subspace, is_direct_sum_full


def as_block(spec: FieldSpec, ell: int, values) -> Matrix:
    """Coerce a length-ell sequence (or ell x 1 matrix) to a column block."""
    if isinstance(values, Matrix):
        if values.spec != spec:
            raise MixedFields(f"block over {values.spec!r}, code over {spec!r}")
        if values.shape != (ell, 1):
            raise ShapeMismatch(f"block shape {values.shape}, expected ({ell}, 1)")
        return values
    block = Matrix.column_vector(spec, values)
    if block.rows != ell:
        raise ShapeMismatch(f"block has {block.rows} symbols, expected {ell}")
    return block


@dataclass(frozen=True, eq=False)
class VectorCodeSystematic:
    """Systematic (n, k) vector code with ell symbols per node."""

    n: int
    k: int
    ell: int
    spec: FieldSpec
    parity: tuple[tuple[Matrix, ...], ...]  # [parity unit i][systematic node j]

    def __post_init__(self):
        object.__setattr__(self, "parity", tuple(tuple(row) for row in self.parity))
        r = self.n - self.k
        if self.k < 1 or r < 1:
            raise StructuralError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if self.ell < 1:
            raise StructuralError(f"need ell >= 1, got {self.ell}")
        if len(self.parity) != r:
            raise StructuralError(f"{len(self.parity)} parity rows, expected {r}")
        for i, row in enumerate(self.parity):
            if len(row) != self.k:
                raise StructuralError(f"parity row {i} has {len(row)} blocks, expected {self.k}")
            for j, block in enumerate(row):
                if block.spec != self.spec:
                    raise StructuralError(f"parity block ({i},{j}) over {block.spec!r}")
                if block.shape != (self.ell, self.ell):
                    raise StructuralError(f"parity block ({i},{j}) has shape {block.shape}")
                if block.rank() != self.ell:
                    raise StructuralError(f"parity block ({i},{j}) is singular")

    @property
    def r(self) -> int:
        return self.n - self.k

    def encode(self, data: Sequence) -> tuple[Matrix, ...]:
        """All n blocks from the k data blocks."""
        if len(data) != self.k:
            raise ShapeMismatch(f"{len(data)} data blocks, expected {self.k}")
        blocks = [as_block(self.spec, self.ell, d) for d in data]
        for row in self.parity:
            acc = Matrix.zeros(self.spec, self.ell, 1)
            for coeff, block in zip(row, blocks):
                acc = acc + coeff @ block
            blocks.append(acc)
        return tuple(blocks)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "ell": self.ell,
            "p": self.spec.p,
            "parity": [[c.to_json_dict() for c in row] for row in self.parity],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> VectorCodeSystematic:
        spec = FieldSpec(int(payload["p"]))
        parity = [
            [Matrix.from_json_dict(d, spec) for d in row] for row in payload["parity"]
        ]
        return cls(int(payload["n"]), int(payload["k"]), int(payload["ell"]), spec, parity)


def _check_repair_matrix(mat: Matrix, ell: int, r: int, spec: FieldSpec, label: str):
    if mat.spec != spec:
        raise SchemeInvalid(f"{label} over {mat.spec!r}")
    if mat.shape != (ell // r, ell):
        raise SchemeInvalid(f"{label} has shape {mat.shape}, expected ({ell // r}, {ell})")
    if mat.rank() != ell // r:
        raise SchemeInvalid(f"{label} is not full row rank")


@dataclass(frozen=True, eq=False)
class ConstantRepairScheme:
    """One repair matrix per systematic node, shared by all parity units."""

    matrices: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if not self.matrices:
            raise SchemeInvalid("scheme with no repair matrices")

    def matrix_for(self, parity_unit: int, node: int) -> Matrix:
        return self.matrices[node]

    def to_json_dict(self) -> dict:
        return {
            "kind": "constant",
            "p": self.matrices[0].spec.p,
            "repair": [m.to_json_dict() for m in self.matrices],
        }


@dataclass(frozen=True, eq=False)
class GeneralRepairScheme:
    """Repair matrices indexed by (parity unit, systematic node)."""

    matrices: tuple[tuple[Matrix, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "matrices", tuple(tuple(row) for row in self.matrices)
        )
        if not self.matrices or not self.matrices[0]:
            raise SchemeInvalid("scheme with no repair matrices")
        width = len(self.matrices[0])
        if any(len(row) != width for row in self.matrices):
            raise SchemeInvalid("ragged repair matrix grid")

    def matrix_for(self, parity_unit: int, node: int) -> Matrix:
        return self.matrices[parity_unit][node]

    def to_json_dict(self) -> dict:
        return {
            "kind": "general",
            "p": self.matrices[0][0].spec.p,
            "repair": [[m.to_json_dict() for m in row] for row in self.matrices],
        }


def scheme_from_json_dict(payload: dict):
    if "p" not in payload or "repair" not in payload:
        raise BadParams("scheme payload needs 'kind', 'p' and 'repair' keys")
    spec = FieldSpec(int(payload["p"]))
    if payload.get("kind") == "constant":
        return ConstantRepairScheme(
            tuple(Matrix.from_json_dict(d, spec) for d in payload["repair"])
        )
    if payload.get("kind") == "general":
        return GeneralRepairScheme(
            tuple(
                tuple(Matrix.from_json_dict(d, spec) for d in row)
                for row in payload["repair"]
            )
        )
    raise BadParams(f"unknown scheme kind {payload.get('kind')!r}")


def _validate_scheme(code: VectorCodeSystematic, scheme):
    r, ell, k = code.r, code.ell, code.k
    if ell % r != 0:
        raise BadParams(f"r = {r} does not divide ell = {ell}")
    if isinstance(scheme, ConstantRepairScheme):
        if len(scheme.matrices) != k:
            raise SchemeInvalid(f"{len(scheme.matrices)} repair matrices for k={k} nodes")
        for m, mat in enumerate(scheme.matrices):
            _check_repair_matrix(mat, ell, r, code.spec, f"repair matrix for node {m}")
    elif isinstance(scheme, GeneralRepairScheme):
        if len(scheme.matrices) != r or len(scheme.matrices[0]) != k:
            raise SchemeInvalid(
                f"repair grid is {len(scheme.matrices)}x{len(scheme.matrices[0])}, "
                f"expected {r}x{k}"
            )
        for i, row in enumerate(scheme.matrices):
            for m, mat in enumerate(row):
                _check_repair_matrix(mat, ell, r, code.spec, f"repair matrix ({i},{m})")
    else:
        raise TypeError(f"unknown scheme type {type(scheme).__name__}")


@dataclass(frozen=True)
class SchemeReport:
    """check_msr_scheme outcome for one systematic node."""

    node: int
    regeneration_ok: bool
    interference_ok: tuple[tuple[int, bool], ...]  # (other node, aligned)

    @property
    def ok(self) -> bool:
        return self.regeneration_ok and all(good for _, good in self.interference_ok)

    def to_json_dict(self) -> dict:
        return {
            "node": self.node,
            "regeneration_ok": self.regeneration_ok,
            "interference_ok": [[m, good] for m, good in self.interference_ok],
            "ok": self.ok,
        }


def check_msr_scheme(code: VectorCodeSystematic, scheme, m: int) -> SchemeReport:
    """Certify the two repair conditions at systematic node m."""
    _validate_scheme(code, scheme)
    if not 0 <= m < code.k:
        raise IndexOutOfRange(f"node {m} outside range({code.k})")
    own = [
        Subspace.span_of(scheme.matrix_for(i, m) @ code.parity[i][m])
        for i in range(code.r)
    ]
    regeneration_ok = is_direct_sum_full(own)
    interference = []
    for other in range(code.k):
        if other == m:
            continue
        spans = [
            Subspace.span_of(scheme.matrix_for(i, m) @ code.parity[i][other])
            for i in range(code.r)
        ]
        interference.append((other, all(s == spans[0] for s in spans[1:])))
    return SchemeReport(
        node=m, regeneration_ok=regeneration_ok, interference_ok=tuple(interference)
    )


def cutset_bound(n: int, k: int, ell: int) -> Fraction:
    """Minimum possible repair bandwidth (n-1) ell / (n-k), in symbols."""
    if not 1 <= k < n:
        raise BadParams(f"need 1 <= k < n, got n={n}, k={k}")
    if ell < 1 or ell % (n - k) != 0:
        raise BadParams(f"need (n-k) | ell, got n-k={n - k}, ell={ell}")
    return Fraction((n - 1) * ell, n - k)


@dataclass(frozen=True)
class BandwidthReport:
    """Symbols downloaded per helper during one repair."""

    per_helper: tuple[tuple[int, int], ...]  # (helper node, symbols), sorted
    total: int
    cutset: Fraction

    @property
    def meets_cutset(self) -> bool:
        return Fraction(self.total) == self.cutset

    def to_json_dict(self) -> dict:
        return {
            "per_helper": [[node, count] for node, count in self.per_helper],
            "total": self.total,
            "cutset_numerator": self.cutset.numerator,
            "cutset_denominator": self.cutset.denominator,
        }


@dataclass(frozen=True)
class RepairResult:
    node: int
    block: Matrix  # recovered ell x 1 column
    transmissions: tuple[tuple[int, Matrix], ...]  # (helper node, sent column)
    bandwidth: BandwidthReport


def repair_node(
    code: VectorCodeSystematic, scheme, m: int, blocks: Sequence
) -> RepairResult:
    """Rebuild systematic node m from ell/r symbols per surviving node.

    blocks is the full codeword (entry m is ignored and may be None). Every
    parity node k+i sends S_{i,m} @ (its block); every other systematic node
    m' sends S_{0,m} @ C[0][m'] @ (its block), which by alignment determines
    the interference of node m' inside every parity answer. Subtracting the
    interference leaves the stacked invertible system for block m.
    """
    report = check_msr_scheme(code, scheme, m)
    if not report.ok:
        raise SchemeInvalid(
            f"scheme fails at node {m}: regeneration_ok={report.regeneration_ok}, "
            f"interference_ok={list(report.interference_ok)}"
        )
    k, r, ell, spec = code.k, code.r, code.ell, code.spec
    if len(blocks) != code.n:
        raise ShapeMismatch(f"{len(blocks)} blocks, expected {code.n}")
    stored = {
        node: as_block(spec, ell, blocks[node]) for node in range(code.n) if node != m
    }

    sent: dict[int, Matrix] = {}
    for i in range(r):
        sent[k + i] = scheme.matrix_for(i, m) @ stored[k + i]
    representative = {}
    for other in range(k):
        if other == m:
            continue
        representative[other] = scheme.matrix_for(0, m) @ code.parity[0][other]
        sent[other] = representative[other] @ stored[other]

    cleaned = []
    for i in range(r):
        answer = sent[k + i]
        for other in range(k):
            if other == m:
                continue
            contribution = scheme.matrix_for(i, m) @ code.parity[i][other]
            # contribution rows lie in the row space of the representative
            factor = representative[other].solve_left(contribution)
            answer = answer - factor @ sent[other]
        cleaned.append(answer)

    stacked = Matrix.vstack(
        [scheme.matrix_for(i, m) @ code.parity[i][m] for i in range(r)]
    )
    block = stacked.invert() @ Matrix.vstack(cleaned)

    per_helper = tuple(sorted((node, vec.rows) for node, vec in sent.items()))
    total = sum(count for _, count in per_helper)
    bandwidth = BandwidthReport(
        per_helper=per_helper, total=total, cutset=cutset_bound(code.n, k, ell)
    )
    transmissions = tuple(sorted(sent.items()))
    return RepairResult(node=m, block=block, transmissions=transmissions, bandwidth=bandwidth)


def extract_family(
    code: VectorCodeSystematic, scheme: ConstantRepairScheme, *, check_scheme: bool = True
) -> MsrSubspaceFamily:
    """Read the subspace family off a constant repair scheme.

    Member m is the row space of S_m; its slot-j map is right multiplication
    by C[j][m] @ C[0][m]^-1. With check_scheme (the default) the scheme must
    pass check_msr_scheme at every node first; pass check_scheme=False to
    build the family structurally and let verify() be the gatekeeper.
    """
    if not isinstance(scheme, ConstantRepairScheme):
        raise SchemeInvalid("extraction needs a constant repair scheme")
    _validate_scheme(code, scheme)
    if check_scheme:
        for m in range(code.k):
            report = check_msr_scheme(code, scheme, m)
            if not report.ok:
                raise SchemeInvalid(
                    f"constant scheme fails at node {m}: "
                    f"regeneration_ok={report.regeneration_ok}, "
                    f"interference_ok={list(report.interference_ok)}"
                )
    subspaces = [Subspace.span_of(mat) for mat in scheme.matrices]
    maps = []
    for m in range(code.k):
        base_inverse = code.parity[0][m].invert()
        maps.append([code.parity[j][m] @ base_inverse for j in range(1, code.r)])
    return MsrSubspaceFamily(code.ell, code.r, code.spec, subspaces, maps)


# ----------------------------------------------------------------------
# EVENODD fixture: the classic (4, 2) binary array code with ell = 2.
# Data nodes hold (a1, a2) and (b1, b2); parity node 2 holds
# (a1+b1, a2+b2) and parity node 3 holds (a2+b1, a1+a2+b2).

_GF2 = FieldSpec(2)


def evenodd_code() -> VectorCodeSystematic:
    identity = Matrix.identity(_GF2, 2)
    mixer = Matrix(_GF2, [[0, 1], [1, 1]])  # (a1,a2) -> (a2, a1+a2)
    return VectorCodeSystematic(
        n=4, k=2, ell=2, spec=_GF2, parity=((identity, identity), (mixer, identity))
    )


def evenodd_scheme() -> GeneralRepairScheme:
    """The published repair rows. Node 0 uses the same row on both parity
    units; node 1 cannot (both its parity coefficients are the identity), so
    the scheme is general, not constant."""
    top = Matrix(_GF2, [[1, 0]])
    bottom = Matrix(_GF2, [[0, 1]])
    return GeneralRepairScheme(((top, bottom), (top, top)))


# Hardcoded parity repairs: helper -> selector row, then recovered block =
# combination @ stacked received symbols (helpers in ascending node order).
_EVENODD_PARITY_PLANS = {
    2: (((0, (1, 0)), (1, (1, 0)), (3, (0, 1))), ((1, 1, 0), (1, 0, 1))),
    3: (((0, (0, 1)), (1, (1, 0)), (2, (1, 1))), ((1, 1, 0), (0, 1, 1))),
}


def evenodd_repair(blocks: Sequence, node: int) -> RepairResult:
    """Repair any of the four EVENODD nodes with one symbol per helper."""
    code = evenodd_code()
    if node in (0, 1):
        return repair_node(code, evenodd_scheme(), node, blocks)
    if node not in (2, 3):
        raise IndexOutOfRange(f"node {node} outside range(4)")
    stored = {i: as_block(_GF2, 2, blocks[i]) for i in range(4) if i != node}
    selectors, combination = _EVENODD_PARITY_PLANS[node]
    sent = {
        helper: Matrix(_GF2, [list(row)]) @ stored[helper] for helper, row in selectors
    }
    received = Matrix.vstack([sent[helper] for helper, _ in selectors])
    block = Matrix(_GF2, combination) @ received
    per_helper = tuple(sorted((helper, vec.rows) for helper, vec in sent.items()))
    bandwidth = BandwidthReport(
        per_helper=per_helper,
        total=sum(count for _, count in per_helper),
        cutset=cutset_bound(4, 2, 2),
    )
    return RepairResult(
        node=node,
        block=block,
        transmissions=tuple(sorted(sent.items())),
        bandwidth=bandwidth,
    )


def evenodd_constant_instance() -> tuple[VectorCodeSystematic, ConstantRepairScheme]:
    """The constant-repair instance EVENODD actually induces.

    Node 1's parity coefficients are both the identity, so no constant row
    can regenerate it; shortening the code there (pin that block to zero and
    drop the node) leaves a (3, 1) code whose node-0 repair row [1 0] is
    EVENODD's own, and it is constant across both parity units.
    """
    identity = Matrix.identity(_GF2, 2)
    mixer = Matrix(_GF2, [[0, 1], [1, 1]])
    code = VectorCodeSystematic(n=3, k=1, ell=2, spec=_GF2, parity=((identity,), (mixer,)))
    scheme = ConstantRepairScheme((Matrix(_GF2, [[1, 0]]),))
    return code, scheme


# ----------------------------------------------------------------------
# generation of valid constant-repair instances and the MDS diagnostic

def _random_invertible(spec: FieldSpec, size: int, rng) -> Matrix:
    while True:
        candidate = Matrix(
            spec, [[rng.randrange(spec.p) for _ in range(size)] for _ in range(size)]
        )
        if candidate.rank() == size:
            return candidate


def random_constant_instance(
    n: int, k: int, ell: int, rng, spec: FieldSpec | None = None
) -> tuple[VectorCodeSystematic, ConstantRepairScheme]:
    """A random (n, k) code with a constant repair scheme that provably
    passes check_msr_scheme at every systematic node.

    Blind sampling of parity blocks almost never aligns interference, so the
    instance is built from a verified tensor family instead: pick k of its
    members, conjugate everything by a random change of basis, choose random
    full-rank representatives S_m of the member row spaces, draw C[0][m]
    invertible at random, and let C[j][m] = phi_j @ C[0][m]. The scheme is
    checked before being returned.
    """
    spec = FieldSpec(3) if spec is None else spec
    r = n - k
    if r < 2:
        raise BadParams(f"need r = n - k >= 2, got {r}")
    m_power = round(math.log(ell, r)) if ell > 1 else 0
    if r**m_power != ell or m_power < 1:
        raise BadParams(f"ell = {ell} is not a positive power of r = {r}")
    base = construct_tensor_family(r, m_power, spec)
    if base.k < k:
        raise BadParams(f"tensor family only provides {base.k} members, need {k}")
    chosen = sorted(rng.sample(range(base.k), k))

    conjugator = _random_invertible(spec, ell, rng)
    conjugator_inverse = conjugator.invert()
    subspaces = [base.subspaces[c].apply_map(conjugator) for c in chosen]
    maps = [
        [conjugator_inverse @ phi @ conjugator for phi in base.maps[c]] for c in chosen
    ]

    repair_rows = []
    parity_columns = []
    for m, sub in enumerate(subspaces):
        mixer = _random_invertible(spec, ell // r, rng)
        repair_rows.append(mixer @ sub.basis)
        first = _random_invertible(spec, ell, rng)
        parity_columns.append([first] + [phi @ first for phi in maps[m]])
    parity = tuple(
        tuple(parity_columns[m][i] for m in range(k)) for i in range(r)
    )
    code = VectorCodeSystematic(n=n, k=k, ell=ell, spec=spec, parity=parity)
    scheme = ConstantRepairScheme(tuple(repair_rows))
    for node in range(k):
        report = check_msr_scheme(code, scheme, node)
        if not report.ok:  # pragma: no cover - construction guarantees this
            raise AssertionError(f"generated instance fails its own check at node {node}")
    return code, scheme


def is_mds(code: VectorCodeSystematic) -> bool:
    """Exhaustive MDS diagnostic: every k-subset of nodes determines the
    data. Cost grows as C(n, k); meant for tiny codes only."""
    k, ell, spec = code.k, code.ell, code.spec
    node_rows = []
    for j in range(k):
        blocks = [
            Matrix.identity(spec, ell) if j == col else Matrix.zeros(spec, ell, ell)
            for col in range(k)
        ]
        node_rows.append(Matrix.hstack(blocks))
    for row in code.parity:
        node_rows.append(Matrix.hstack(list(row)))
    for subset in itertools.combinations(range(code.n), k):
        stacked = Matrix.vstack([node_rows[node] for node in subset])
        if stacked.rank() != k * ell:
            return False
    return True
