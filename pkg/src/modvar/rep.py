"""Points of module varieties: representations, one-parameter families,
direct sums, conjugation, sampling and Monte-Carlo isomorphism testing.

A :class:`Rep` stores its quiver plus one matrix per arrow, of shape
d_tgt x d_src, over an exact field.  Operations that depend on relations or
the truncation bound take the algebra as an argument.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, SpecializationError
from .exactla import Field
from .quiver import Path, Quiver
from .ratfunc import RatFunc, parse
from .rng import derive_rng

if TYPE_CHECKING:
    from .algebra import FDAlgebra

DEFAULT_ISO_TRIALS = 8


@dataclass(frozen=True, eq=False)
class Rep:
    field: Field
    quiver: Quiver
    dim_vector: tuple[int, ...]
    mats: dict  # arrow name -> matrix of shape d_tgt x d_src

    def __post_init__(self):
        if len(self.dim_vector) != self.quiver.n_vertices:
            raise InputError("dimension vector length does not match the quiver")
        for a in self.quiver.arrows:
            if a.name not in self.mats:
                raise InputError(f"missing matrix for arrow {a.name!r}")
            want = (self.dim_vector[a.tgt], self.dim_vector[a.src])
            if self.mats[a.name].shape != want:
                raise InputError(
                    f"matrix for arrow {a.name!r} has shape "
                    f"{self.mats[a.name].shape}, expected {want}")

    @property
    def total_dim(self) -> int:
        return int(sum(self.dim_vector))

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def content_key(self) -> tuple:
        parts = []
        for name in sorted(self.mats):
            m = self.mats[name]
            parts.append((name, m.tobytes() if m.dtype != object else str(m.tolist())))
        return (self.dim_vector, tuple(parts))


def zero_rep(field: Field, quiver: Quiver) -> Rep:
    dims = (0,) * quiver.n_vertices
    return Rep(field, quiver, dims, {a.name: field.zeros(0, 0) for a in quiver.arrows})


def rep_equal(M: Rep, N: Rep) -> bool:
    if M.dim_vector != N.dim_vector or set(M.mats) != set(N.mats):
        return False
    return all(M.field.eq(M.mats[a], N.mats[a]) for a in M.mats)


def path_matrix(M: Rep, path: Path) -> np.ndarray:
    """Action of a path on vertex blocks, first arrow applied first."""
    out = M.field.eye(M.dim_vector[path.src])
    for name in path.names:
        out = M.field.matmul(M.mats[name], out)
    return out


def total_offsets(M: Rep) -> list[int]:
    off = [0]
    for d in M.dim_vector:
        off.append(off[-1] + d)
    return off


def total_path_matrix(M: Rep, path: Path) -> np.ndarray:
    """Action of a path on the total space, as a d x d block matrix."""
    d = M.total_dim
    off = total_offsets(M)
    out = M.field.zeros(d, d)
    out[off[path.tgt]:off[path.tgt + 1], off[path.src]:off[path.src + 1]] = \
        path_matrix(M, path)
    return out


def relation_matrix(M: Rep, relation) -> np.ndarray:
    terms = list(relation)
    s, t = terms[0][1].src, terms[0][1].tgt
    out = M.field.zeros(M.dim_vector[t], M.dim_vector[s])
    for c, p in terms:
        out = M.field.add(out, M.field.scale(c, path_matrix(M, p)))
    return out


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    failed_relations: tuple[int, ...]
    jl_nilpotent: bool


def check_relations(A: "FDAlgebra", M: Rep) -> RelationReport:
    """Membership test for the module variety of A.

    Checks every relation term-by-term and that J^L acts as zero; the
    latter walks the chain of radical-power subspaces instead of
    enumerating length-L paths.
    """
    if M.quiver != A.spec.quiver:
        raise InputError("representation is over a different quiver")
    f = M.field
    failed = tuple(i for i, rel in enumerate(A.spec.relations)
                   if not f.is_zero(relation_matrix(M, rel)))
    spaces = [f.eye(d) for d in M.dim_vector]
    nilpotent = False
    for _ in range(A.spec.trunc):
        nxt = []
        for t in range(A.n_vertices):
            pieces = [f.matmul(M.mats[a.name], spaces[a.src])
                      for a in A.spec.quiver.arrows
                      if a.tgt == t and spaces[a.src].shape[1] > 0]
            if pieces:
                nxt.append(f.column_space(np.hstack(pieces)))
            else:
                nxt.append(f.zeros(M.dim_vector[t], 0))
        spaces = nxt
        if all(s.shape[1] == 0 for s in spaces):
            nilpotent = True
            break
    return RelationReport(ok=(not failed) and nilpotent,
                          failed_relations=failed, jl_nilpotent=nilpotent)


# -- constructions ---------------------------------------------------------


def direct_sum(M: Rep, N: Rep) -> Rep:
    if M.quiver != N.quiver:
        raise InputError("direct sum of representations over different quivers")
    f = M.field
    dims = tuple(a + b for a, b in zip(M.dim_vector, N.dim_vector))
    mats = {}
    for name in M.mats:
        m, n = M.mats[name], N.mats[name]
        out = f.zeros(m.shape[0] + n.shape[0], m.shape[1] + n.shape[1])
        out[: m.shape[0], : m.shape[1]] = m
        out[m.shape[0]:, m.shape[1]:] = n
        mats[name] = out
    return Rep(f, M.quiver, dims, mats)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Vertex-blocked base change: one invertible matrix per vertex."""

    blocks: tuple[np.ndarray, ...]


def random_group_element(field: Field, dims: Sequence[int],
                         rng: np.random.Generator) -> GroupElement:
    return GroupElement(tuple(field.rand_invertible(rng, d) for d in dims))


def conjugate(g: GroupElement, M: Rep) -> Rep:
    """Arrow a maps to g_tgt^{-1} M(a) g_src; an isomorphic module."""
    f = M.field
    inv = []
    for b in g.blocks:
        gi = f.inv(b)
        if gi is None:
            raise InputError("group element block is not invertible")
        inv.append(gi)
    mats = {a.name: f.mm(inv[a.tgt], M.mats[a.name], g.blocks[a.src])
            for a in M.quiver.arrows}
    return Rep(f, M.quiver, M.dim_vector, mats)


def random_rep(A: "FDAlgebra", dims: Sequence[int], rng_or_seed) -> Rep:
    """Uniform point of the representation space of a hereditary algebra."""
    if A.spec.relations:
        raise InputError(
            "uniform sampling is only dense for algebras without relations; "
            "use a ModuleFamily or the brute-force enumerator instead")
    quiver = A.spec.quiver
    if quiver.has_oriented_cycle() or quiver.longest_path_length() >= A.spec.trunc:
        raise InputError(
            "uniform sampling needs the full path algebra of an acyclic quiver; "
            "raise the truncation bound above the longest path length")
    rng = rng_or_seed if isinstance(rng_or_seed, np.random.Generator) \
        else derive_rng(int(rng_or_seed), "random_rep")
    dims = tuple(int(d) for d in dims)
    mats = {a.name: A.field.rand_matrix(rng, dims[a.tgt], dims[a.src])
            for a in A.spec.quiver.arrows}
    return Rep(A.field, A.spec.quiver, dims, mats)


def subrep_from_bases(M: Rep, vertex_bases: Sequence[np.ndarray]
                      ) -> tuple[Rep, tuple[np.ndarray, ...]]:
    """Restrict M to arrow-invariant vertex subspaces.

    ``vertex_bases[v]`` has the subspace basis as columns.  Returns the
    subrepresentation expressed in those bases plus the inclusion matrices.
    """
    f = M.field
    dims = tuple(int(b.shape[1]) for b in vertex_bases)
    mats = {}
    for a in M.quiver.arrows:
        image = f.matmul(M.mats[a.name], vertex_bases[a.src])
        coords = f.solve_matrix(vertex_bases[a.tgt], image)
        if coords is None:
            raise InputError("subspaces are not arrow-invariant")
        mats[a.name] = coords
    return Rep(f, M.quiver, dims, mats), tuple(vertex_bases)


# -- homomorphism solution space -------------------------------------------


def intertwiner_kernel(M: Rep, N: Rep) -> np.ndarray:
    """Kernel matrix of the intertwiner system f_tgt M(a) = N(a) f_src.

    Columns are flattened solutions (row-major f_v blocks concatenated over
    vertices); the column count is hom(M, N).
    """
    if M.quiver != N.quiver:
        raise InputError("representations are over different quivers")
    f = M.field
    nv = len(M.dim_vector)
    offs = [0]
    for v in range(nv):
        offs.append(offs[-1] + N.dim_vector[v] * M.dim_vector[v])
    unknowns = offs[-1]
    rows = []
    for a in M.quiver.arrows:
        dMs, dMt = M.dim_vector[a.src], M.dim_vector[a.tgt]
        dNs, dNt = N.dim_vector[a.src], N.dim_vector[a.tgt]
        if dNt * dMs == 0:
            continue
        block = f.zeros(dNt * dMs, unknowns)
        if dNt * dMt:
            block[:, offs[a.tgt]:offs[a.tgt + 1]] = f.kron(f.eye(dNt), M.mats[a.name].T)
        if dNs * dMs:
            block[:, offs[a.src]:offs[a.src + 1]] = f.sub(
                block[:, offs[a.src]:offs[a.src + 1]], f.kron(N.mats[a.name], f.eye(dMs)))
        rows.append(block)
    system = np.vstack(rows) if rows else f.zeros(0, unknowns)
    return f.kernel_basis(system)


def unflatten_hom(M: Rep, N: Rep, column: np.ndarray) -> tuple[np.ndarray, ...]:
    out = []
    pos = 0
    for v in range(len(M.dim_vector)):
        r, c = N.dim_vector[v], M.dim_vector[v]
        out.append(column[pos:pos + r * c].reshape(r, c).copy())
        pos += r * c
    return tuple(out)


class IsoResult(enum.Enum):
    ISO = "iso"
    NOT_ISO = "not_iso"
    INCONCLUSIVE = "inconclusive"


def iso_test(M: Rep, N: Rep, trials: int = DEFAULT_ISO_TRIALS, seed: int = 0) -> IsoResult:
    """Monte-Carlo isomorphism test.

    ``not_iso`` answers are certificates: mismatched dimension vectors, a
    vanishing Hom space, or Hom/End dimension comparisons that any
    isomorphism would force to coincide.  ``iso`` is certified by an
    explicit invertible intertwiner found among ``trials`` random elements
    of Hom(M, N).  Only ``inconclusive`` can be wrong, and over a large
    field only with negligible probability.
    """
    if M.dim_vector != N.dim_vector:
        return IsoResult.NOT_ISO
    if M.is_zero():
        return IsoResult.ISO
    f = M.field
    hom = intertwiner_kernel(M, N)
    if hom.shape[1] == 0:
        return IsoResult.NOT_ISO
    end_m = intertwiner_kernel(M, M).shape[1]
    end_n = intertwiner_kernel(N, N).shape[1]
    if not hom.shape[1] == end_m == end_n:
        return IsoResult.NOT_ISO
    rng = derive_rng(seed, "iso_test")
    for _ in range(max(1, trials)):
        coeffs = f.rand_matrix(rng, hom.shape[1], 1)
        candidate = f.matmul(hom, coeffs)[:, 0]
        blocks = unflatten_hom(M, N, candidate)
        if all(d == 0 or f.rank(b) == d for d, b in zip(M.dim_vector, blocks)):
            return IsoResult.ISO
    return IsoResult.INCONCLUSIVE


# -- one-parameter families -------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModuleFamily:
    """A representation whose entries are rational functions of one parameter.

    ``excluded`` lists integer parameter values that must not be used for
    specialization (declared degenerations on top of outright poles).
    """

    quiver: Quiver
    dim_vector: tuple[int, ...]
    entries: dict  # arrow name -> tuple of tuples of RatFunc
    excluded: frozenset = frozenset()

    def specialize(self, field: Field, lam) -> Rep:
        if self.is_excluded(field, lam):
            raise SpecializationError(f"parameter value {lam} is excluded for this family")
        mats = {}
        for a in self.quiver.arrows:
            rows = self.entries[a.name]
            vals = [x for row in rows for x in
                    (rf.evaluate(field, lam) for rf in row)]
            shape = (self.dim_vector[a.tgt], self.dim_vector[a.src])
            mats[a.name] = field.asarray(vals, shape=shape)
        return Rep(field, self.quiver, self.dim_vector, mats)

    def is_excluded(self, field: Field, lam) -> bool:
        if field.mode == "prime":
            return any(int(lam) % field.p == int(e) % field.p for e in self.excluded)
        return any(lam == e for e in self.excluded)

    def relation_residues(self, spec) -> list:
        """Symbolic value of every relation; identically zero for a valid family."""
        out = []
        for rel in spec.relations:
            s, t = rel[0][1].src, rel[0][1].tgt
            acc = _sym_zeros(self.dim_vector[t], self.dim_vector[s])
            for coeff, p in rel:
                acc = _sym_add(acc, _sym_scale(RatFunc.const(coeff), _sym_path(self, p)))
            out.append(acc)
        return out

    def relations_vanish(self, spec) -> bool:
        return all(rf.is_zero() for residue in self.relation_residues(spec)
                   for row in residue for rf in row)

    @staticmethod
    def constant(quiver: Quiver, dim_vector: Sequence[int], int_mats: dict,
                 excluded: Iterable[int] = ()) -> "ModuleFamily":
        entries = {name: tuple(tuple(RatFunc.const(int(x)) for x in row) for row in rows)
                   for name, rows in int_mats.items()}
        return ModuleFamily(quiver, tuple(int(d) for d in dim_vector), entries,
                            frozenset(int(x) for x in excluded))

    # JSON: {"dim_vector": [...], "matrices": {"a": [["L", ...], ...]},
    #        "excluded": [0]}  with entries in the ratfunc grammar
    @staticmethod
    def from_json(quiver: Quiver, data: dict) -> "ModuleFamily":
        try:
            dims = tuple(int(d) for d in data["dim_vector"])
            entries = {}
            for name, rows in data["matrices"].items():
                entries[name] = tuple(
                    tuple(parse(x) if isinstance(x, str) else RatFunc.const(int(x))
                          for x in row)
                    for row in rows)
            fam = ModuleFamily(quiver, dims, entries,
                               frozenset(int(x) for x in data.get("excluded", [])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed family file: {exc}") from exc
        _validate_family_shapes(quiver, fam)
        return fam

    def to_json(self) -> dict:
        return {
            "dim_vector": list(self.dim_vector),
            "matrices": {name: [[str(rf) for rf in row] for row in rows]
                         for name, rows in self.entries.items()},
            "excluded": sorted(self.excluded),
        }

    @staticmethod
    def load(quiver: Quiver, path: str) -> "ModuleFamily":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: invalid JSON ({exc})") from exc
        return ModuleFamily.from_json(quiver, data)


def specialize(F: ModuleFamily, field: Field, lam) -> Rep:
    return F.specialize(field, lam)


def _validate_family_shapes(quiver: Quiver, fam: ModuleFamily) -> None:
    if len(fam.dim_vector) != quiver.n_vertices:
        raise InputError("family dimension vector does not match the quiver")
    for a in quiver.arrows:
        rows = fam.entries.get(a.name)
        if rows is None:
            raise InputError(f"family is missing arrow {a.name!r}")
        want_r, want_c = fam.dim_vector[a.tgt], fam.dim_vector[a.src]
        if len(rows) != want_r or any(len(r) != want_c for r in rows):
            raise InputError(f"family entry for arrow {a.name!r} has the wrong shape")


def _sym_zeros(r: int, c: int):
    return [[RatFunc.const(0) for _ in range(c)] for _ in range(r)]


def _sym_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _sym_scale(c: RatFunc, a):
    return [[c * x for x in row] for row in a]


def _sym_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = _sym_zeros(rows, cols)
    for i in range(rows):
        for k in range(inner):
            if a[i][k].is_zero():
                continue
            for j in range(cols):
                out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def _sym_eye(n: int):
    out = _sym_zeros(n, n)
    for i in range(n):
        out[i][i] = RatFunc.const(1)
    return out


def _sym_path(fam: ModuleFamily, path: Path):
    out = _sym_eye(fam.dim_vector[path.src])
    for name in path.names:
        out = _sym_mul([list(r) for r in fam.entries[name]], out)
    return out


# -- JSON IO for plain modules ----------------------------------------------


def rep_from_json(field: Field, quiver: Quiver, data: dict) -> Rep:
    try:
        dims = tuple(int(d) for d in data["dim_vector"])
        raw = data["matrices"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed module file: {exc}") from exc
    if len(dims) != quiver.n_vertices:
        raise InputError("module dimension vector does not match the quiver")
    mats = {}
    for a in quiver.arrows:
        shape = (dims[a.tgt], dims[a.src])
        rows = raw.get(a.name)
        if rows is None:
            raise InputError(f"module file missing arrow {a.name!r}")
        flat = [int(x) for row in rows for x in row]
        if len(flat) != shape[0] * shape[1] or (shape[0] and shape[1] and len(rows) != shape[0]):
            raise InputError(f"matrix for arrow {a.name!r} has the wrong shape")
        mats[a.name] = field.asarray(flat, shape=shape)
    return Rep(field, quiver, dims, mats)


def rep_to_json(M: Rep) -> dict:
    def cell(x):
        return int(x) if M.field.mode == "prime" else str(x)
    return {
        "dim_vector": list(M.dim_vector),
        "matrices": {name: [[cell(x) for x in row] for row in m]
                     for name, m in M.mats.items()},
    }


def load_module(field: Field, quiver: Quiver, path: str) -> Rep:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return rep_from_json(field, quiver, data)
