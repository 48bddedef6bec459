"""Finite-dimensional basic algebras presented by quiver, relations and a
truncation bound.

The algebra built here is KQ / (<R> + J^L): the path algebra modulo the
two-sided ideal spanned by the relations together with all paths of length
at least L.  When ``check_truncation_stable`` holds this coincides with
KQ/<R> for an admissible ideal <R>.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .exactla import Field
from .quiver import Arrow, Path, Quiver, concat, path_from_names, trivial_path
from .rep import Rep, direct_sum


class TruncationWarning(UserWarning):
    """The computed basis may depend on the truncation bound L."""


Relation = tuple[tuple[int, Path], ...]


@dataclass(frozen=True)
class AlgebraSpec:
    quiver: Quiver
    relations: tuple[Relation, ...]
    trunc: int

    def __post_init__(self):
        if self.trunc < 2:
            raise InputError("truncation bound must be at least 2")
        for rel in self.relations:
            if not rel:
                raise InputError("empty relation")
            s, t = rel[0][1].src, rel[0][1].tgt
            for coeff, p in rel:
                if len(p) < 2:
                    raise InputError("relation paths must have length >= 2 (admissibility)")
                if (p.src, p.tgt) != (s, t):
                    raise InputError("all terms of a relation must be parallel")
                if coeff == 0:
                    raise InputError("zero coefficient in relation")

    # JSON schema: {"vertices": n, "arrows": [{"name","src","tgt"}],
    #   "relations": [[{"coeff": int, "path": [names...]}]], "trunc": L}
    @staticmethod
    def from_json(data: dict) -> "AlgebraSpec":
        try:
            quiver = Quiver(int(data["vertices"]),
                            tuple(Arrow(a["name"], int(a["src"]), int(a["tgt"]))
                                  for a in data["arrows"]))
            rels = []
            for rel in data.get("relations", []):
                rels.append(tuple((int(t["coeff"]), path_from_names(quiver, t["path"]))
                                  for t in rel))
            return AlgebraSpec(quiver, tuple(rels), int(data["trunc"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed algebra spec: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "vertices": self.quiver.n_vertices,
            "arrows": [{"name": a.name, "src": a.src, "tgt": a.tgt}
                       for a in self.quiver.arrows],
            "relations": [[{"coeff": c, "path": list(p.names)} for c, p in rel]
                          for rel in self.relations],
            "trunc": self.trunc,
        }

    @staticmethod
    def load(path: str) -> "AlgebraSpec":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: invalid JSON ({exc})") from exc
        return AlgebraSpec.from_json(data)


def _enumerate_paths(quiver: Quiver, maxlen: int) -> list[Path]:
    """All paths of length < maxlen, ascending by (length, names, src)."""
    out = [trivial_path(v) for v in range(quiver.n_vertices)]
    frontier = list(out)
    for _ in range(maxlen - 1):
        nxt = []
        for p in frontier:
            for a in quiver.arrows:
                if a.src == p.tgt:
                    nxt.append(Path(p.src, p.names + (a.name,), a.tgt))
        out.extend(nxt)
        frontier = nxt
    out.sort(key=lambda p: p.key)
    return out


class _SpanRref:
    """Incremental RREF of the relation span over the descending path order."""

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        f = self.field
        for row, pc in zip(self.rows, self.pivots):
            if v[pc] != 0:
                v = f.submul(v, v[pc], row)
        return v

    def insert(self, v: np.ndarray) -> Optional[np.ndarray]:
        """Reduce and insert; returns the normalized new row or None."""
        f = self.field
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return None
        pc = int(nz[0])
        v = f.scale(f.inv_scalar(v[pc]), v)
        for i, row in enumerate(self.rows):
            if row[pc] != 0:
                self.rows[i] = f.submul(row, row[pc], v)
        k = 0
        while k < len(self.pivots) and self.pivots[k] < pc:
            k += 1
        self.rows.insert(k, v)
        self.pivots.insert(k, pc)
        return v


@dataclass(frozen=True, eq=False)
class FDAlgebra:
    """Basic algebra with a monomial basis of reduced paths."""

    spec: AlgebraSpec
    field: Field
    basis: tuple[Path, ...]
    dim: int
    e_pos: tuple[int, ...]          # basis index of each trivial path
    struct: np.ndarray              # struct[i, j, k]: coeff of basis k in basis_i * basis_j
    radical: tuple[int, ...]        # basis indices of paths of length >= 1
    by_grade: dict                  # (src, tgt) -> tuple of basis indices

    @property
    def n_vertices(self) -> int:
        return self.spec.quiver.n_vertices

    def basis_index(self, p: Path) -> Optional[int]:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {(q.src, q.names): i for i, q in enumerate(self.basis)}
            self.__dict__["_index_cache"] = idx
        return idx.get((p.src, p.names))

    def arrow_basis_index(self, name: str) -> int:
        a = self.spec.quiver.arrow(name)
        i = self.basis_index(Path(a.src, (name,), a.tgt))
        assert i is not None, "arrows are always basis elements of an admissible quotient"
        return i

    def grade(self, src: int, tgt: int) -> tuple[int, ...]:
        return self.by_grade.get((src, tgt), ())

    def mul_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two coefficient vectors over the basis."""
        f = self.field
        out = f.zeros(1, self.dim)
        for i in np.nonzero(x)[0]:
            contrib = f.matmul(y.reshape(1, -1), self.struct[int(i)])
            out = f.add(out, f.scale(x[int(i)], contrib))
        return out.reshape(-1)


def build_algebra(spec: AlgebraSpec, field: Optional[Field] = None) -> FDAlgebra:
    """Construct the monomial basis and structure constants of KQ/(<R>+J^L).

    Starting from the relation rows inside the path space of length < L,
    the span is closed under left and right multiplication by arrows
    (products of length >= L are discarded), then the basis is the
    complement of the pivot paths.  Pivots are the largest paths in the
    (length, arrow-name sequence) order, which makes the basis canonical.
    """
    field = field or Field.prime()
    quiver, L = spec.quiver, spec.trunc
    paths = _enumerate_paths(quiver, L)
    ncols = len(paths)
    desc = list(reversed(paths))
    col_of = {(p.src, p.names): i for i, p in enumerate(desc)}
    dtype = np.int64 if field.mode == "prime" else object

    def vec_of(terms) -> np.ndarray:
        v = np.zeros(ncols, dtype=dtype)
        for coeff, p in terms:
            if len(p) >= L:
                continue
            v[col_of[(p.src, p.names)]] += coeff
        return field.reduce(v)

    span = _SpanRref(field, ncols)
    work: list[np.ndarray] = []
    for rel in spec.relations:
        inserted = span.insert(vec_of(rel))
        if inserted is not None:
            work.append(inserted)

    def mult_by_arrow(v: np.ndarray, a: Arrow, left: bool) -> np.ndarray:
        out = np.zeros(ncols, dtype=v.dtype)
        apath = Path(a.src, (a.name,), a.tgt)
        for i in np.nonzero(v)[0]:
            p = desc[int(i)]
            q = concat(p, apath) if left else concat(apath, p)
            if q is None or len(q) >= L:
                continue
            out[col_of[(q.src, q.names)]] += v[int(i)]
        return field.reduce(out)

    while work:
        v = work.pop()
        for a in quiver.arrows:
            for left in (True, False):
                prod = mult_by_arrow(v, a, left)
                if prod.any():
                    inserted = span.insert(prod)
                    if inserted is not None:
                        work.append(inserted)

    pivot_cols = set(span.pivots)
    basis = sorted((p for i, p in enumerate(desc) if i not in pivot_cols),
                   key=lambda p: p.key)
    dim = len(basis)
    basis_col = {col_of[(p.src, p.names)]: k for k, p in enumerate(basis)}

    def normal_form(p: Path) -> np.ndarray:
        out = np.zeros(dim, dtype=dtype)
        if len(p) >= L:
            return out
        v = np.zeros(ncols, dtype=dtype)
        v[col_of[(p.src, p.names)]] = 1
        v = span.reduce(v)
        for i in np.nonzero(v)[0]:
            out[basis_col[int(i)]] = v[int(i)]
        return out

    struct = np.zeros((dim, dim, dim), dtype=dtype)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            prod = concat(y, x)  # x*y applies y first
            if prod is not None:
                struct[i, j] = normal_form(prod)

    e_pos = tuple(next(i for i, p in enumerate(basis) if len(p) == 0 and p.src == v)
                  for v in range(quiver.n_vertices))
    radical = tuple(i for i, p in enumerate(basis) if len(p) >= 1)
    by_grade: dict = {}
    for i, p in enumerate(basis):
        by_grade.setdefault((p.src, p.tgt), []).append(i)
    by_grade = {k: tuple(v) for k, v in by_grade.items()}

    if quiver.has_oriented_cycle() and any(len(p) == L - 1 for p in basis):
        warnings.warn(
            "basis contains unreduced paths of length L-1; the result may depend "
            "on the truncation bound (see check_truncation_stable)",
            TruncationWarning, stacklevel=2)

    return FDAlgebra(spec=spec, field=field, basis=tuple(basis), dim=dim,
                     e_pos=e_pos, struct=struct, radical=radical,
                     by_grade=by_grade)


def check_truncation_stable(spec: AlgebraSpec, field: Optional[Field] = None) -> bool:
    """True iff raising the truncation bound by one leaves the dimension fixed."""
    field = field or Field.prime()
    bumped = AlgebraSpec(spec.quiver, spec.relations, spec.trunc + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return build_algebra(spec, field).dim == build_algebra(bumped, field).dim


# -- distinguished modules ------------------------------------------------


def projective_module(A: FDAlgebra, i: int) -> Rep:
    """P(i) = A.e_i with arrow action by left multiplication."""
    _check_vertex(A, i)
    quiver = A.spec.quiver
    grades = {v: A.grade(i, v) for v in range(A.n_vertices)}
    dims = tuple(len(grades[v]) for v in range(A.n_vertices))
    mats = {}
    for a in quiver.arrows:
        src_idx, tgt_idx = grades[a.src], grades[a.tgt]
        m = A.field.zeros(len(tgt_idx), len(src_idx))
        ab = A.arrow_basis_index(a.name)
        for col, x in enumerate(src_idx):
            coeffs = A.struct[ab, x]
            for row, z in enumerate(tgt_idx):
                m[row, col] = coeffs[z]
        mats[a.name] = m
    return Rep(A.field, quiver, dims, mats)


def simple_module(A: FDAlgebra, i: int) -> Rep:
    _check_vertex(A, i)
    dims = tuple(1 if v == i else 0 for v in range(A.n_vertices))
    mats = {a.name: A.field.zeros(dims[a.tgt], dims[a.src]) for a in A.spec.quiver.arrows}
    return Rep(A.field, A.spec.quiver, dims, mats)


def injective_module(A: FDAlgebra, i: int) -> Rep:
    """I(i) = D(e_i.A): dual basis of paths into i, transposed right action."""
    _check_vertex(A, i)
    quiver = A.spec.quiver
    grades = {v: A.grade(v, i) for v in range(A.n_vertices)}
    dims = tuple(len(grades[v]) for v in range(A.n_vertices))
    mats = {}
    for a in quiver.arrows:
        s_idx, t_idx = grades[a.src], grades[a.tgt]
        ab = A.arrow_basis_index(a.name)
        # right multiplication by a: paths (tgt(a) -> i) to paths (src(a) -> i)
        r = A.field.zeros(len(s_idx), len(t_idx))
        for col, h in enumerate(t_idx):
            coeffs = A.struct[h, ab]
            for row, z in enumerate(s_idx):
                r[row, col] = coeffs[z]
        mats[a.name] = r.T.copy()
    return Rep(A.field, quiver, dims, mats)


def regular_module(A: FDAlgebra) -> Rep:
    """The algebra as a left module over itself, P(0) + ... + P(n-1)."""
    out = projective_module(A, 0)
    for v in range(1, A.n_vertices):
        out = direct_sum(out, projective_module(A, v))
    return out


def _check_vertex(A: FDAlgebra, i: int) -> None:
    if not 0 <= i < A.n_vertices:
        raise InputError(f"vertex {i} out of range")
