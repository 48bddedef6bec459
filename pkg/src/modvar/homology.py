"""Hom spaces, minimal projective resolutions, syzygies, and Ext groups by
two independent routes.

Route one (the workhorse) builds a minimal projective resolution with
explicit projective covers and takes homology of the induced Hom complex.
Route two builds the differentials of the standard free bimodule
resolution contracted with the module, reduces A-linear maps out of free
modules to their values on free generators, and combines kernel dimensions
k_i with the constants c_i.  Agreement of the two routes is the strongest
correctness check in the test suite.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ResourceLimitError
from .exactla import Field
from .quiver import Path
from .rep import (Rep, intertwiner_kernel, path_matrix, subrep_from_bases,
                  total_path_matrix, unflatten_hom, zero_rep)

DEFAULT_CELL_LIMIT = 20_000_000


# -- hom spaces --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HomSpace:
    source: Rep
    target: Rep
    basis: tuple  # tuple of per-vertex matrix tuples
    dim: int


def hom_basis(A, M: Rep, N: Rep) -> HomSpace:
    """Basis of the intertwiner solution space; dim is hom_A(M, N)."""
    K = intertwiner_kernel(M, N)
    basis = tuple(unflatten_hom(M, N, K[:, j]) for j in range(K.shape[1]))
    return HomSpace(M, N, basis, K.shape[1])


def hom_dim(A, M: Rep, N: Rep) -> int:
    return intertwiner_kernel(M, N).shape[1]


# -- projective sums and covers ----------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjSum:
    """Direct sum of indecomposable projectives with explicit path bases.

    ``layout[v]`` lists, in column order of the vertex-v space, the pairs
    (summand index, algebra basis index of the path spanning that column).
    ``gen_pos[k]`` locates the free generator of summand k: the column of
    its trivial path at its vertex.
    """

    vertices: tuple[int, ...]
    rep: Rep
    layout: tuple
    gen_pos: tuple

    @property
    def n_summands(self) -> int:
        return len(self.vertices)

    def multiplicities(self, n_vertices: int) -> np.ndarray:
        counts = Counter(self.vertices)
        return np.array([counts.get(v, 0) for v in range(n_vertices)], dtype=np.int64)


def build_proj_sum(A, verts: tuple[int, ...]) -> ProjSum:
    f = A.field
    quiver = A.spec.quiver
    nv = A.n_vertices
    layout = []
    for v in range(nv):
        cols = [(k, pidx) for k, u in enumerate(verts) for pidx in A.grade(u, v)]
        layout.append(tuple(cols))
    dims = tuple(len(layout[v]) for v in range(nv))
    mats = {}
    for a in quiver.arrows:
        src_cols, tgt_cols = layout[a.src], layout[a.tgt]
        m = f.zeros(len(tgt_cols), len(src_cols))
        ab = A.arrow_basis_index(a.name)
        tgt_pos = {(k, p): r for r, (k, p) in enumerate(tgt_cols)}
        for c, (k, pidx) in enumerate(src_cols):
            coeffs = A.struct[ab, pidx]
            for z in np.nonzero(coeffs)[0]:
                r = tgt_pos.get((k, int(z)))
                if r is not None:
                    m[r, c] = coeffs[int(z)]
        mats[a.name] = m
    rep = Rep(f, quiver, dims, mats)
    gen_pos = []
    for k, u in enumerate(verts):
        col = next(c for c, (kk, pidx) in enumerate(layout[u])
                   if kk == k and pidx == A.e_pos[u])
        gen_pos.append((u, col))
    return ProjSum(tuple(verts), rep, tuple(layout), tuple(gen_pos))


def _path_mats(A, T: Rep) -> list[np.ndarray]:
    return [path_matrix(T, p) for p in A.basis]


def cover_map(A, P: ProjSum, T: Rep, gens: list[np.ndarray]) -> tuple[np.ndarray, ...]:
    """The module map P -> T sending the k-th free generator to gens[k]."""
    f = A.field
    pm = _path_mats(A, T)
    out = []
    for v in range(A.n_vertices):
        m = f.zeros(T.dim_vector[v], len(P.layout[v]))
        for c, (k, pidx) in enumerate(P.layout[v]):
            m[:, c] = f.matmul(pm[pidx], gens[k].reshape(-1, 1))[:, 0]
        out.append(m)
    return tuple(out)


def hom_basis_from_proj(A, P: ProjSum, N: Rep) -> list[tuple[np.ndarray, ...]]:
    """Canonical basis of Hom(P, N): summand k against each basis vector of
    N at the summand's vertex, using Hom(P(u), N) = N_u on free generators."""
    f = A.field
    pm = _path_mats(A, N)
    out = []
    for k, u in enumerate(P.vertices):
        for b in range(N.dim_vector[u]):
            fmats = [f.zeros(N.dim_vector[v], len(P.layout[v]))
                     for v in range(A.n_vertices)]
            for v in range(A.n_vertices):
                for c, (kk, pidx) in enumerate(P.layout[v]):
                    if kk == k:
                        fmats[v][:, c] = pm[pidx][:, b]
            out.append(tuple(fmats))
    return out


def top_multiplicities(A, M: Rep) -> np.ndarray:
    """Dimensions of M / rad(M) at each vertex."""
    return np.array([len([1 for v, _ in _top_generators(A, M) if v == u])
                     for u in range(A.n_vertices)], dtype=np.int64)


def _top_generators(A, M: Rep) -> list[tuple[int, np.ndarray]]:
    """Standard basis vectors lifting a basis of the top, per vertex."""
    f = M.field
    gens = []
    for v in range(A.n_vertices):
        d = M.dim_vector[v]
        if d == 0:
            continue
        pieces = [M.mats[a.name] for a in A.spec.quiver.arrows
                  if a.tgt == v and M.dim_vector[a.src] > 0]
        B = f.column_space(np.hstack(pieces)) if pieces else f.zeros(d, 0)
        r = B.shape[1]
        for j in range(d):
            e = f.zeros(d, 1)
            e[j, 0] = 1
            if f.rank(np.hstack([B, e])) > r:
                B = np.hstack([B, e])
                r += 1
                gens.append((v, e[:, 0].copy()))
    return gens


# -- minimal projective resolutions ------------------------------------------


class Resolution:
    """Lazily extended minimal projective resolution of a fixed module.

    Stage j holds the projective P_j, the differential p_j (p_0 maps onto
    the module itself) and the syzygy Omega^{j+1} = Ker(p_j) as an explicit
    representation with its inclusion into P_j.  Extension is guarded by a
    lock so concurrent queries never duplicate differentials.
    """

    def __init__(self, A, M: Rep):
        self.A = A
        self.M = M
        self._lock = threading.RLock()
        self.proj: list[ProjSum] = []
        self.diffs: list[tuple[np.ndarray, ...]] = []
        self.omegas: list[Rep] = [M]
        self.incls: list = [None]
        self._rank_cache: dict = {}

    def ensure(self, j: int) -> None:
        with self._lock:
            while len(self.proj) <= j:
                self._extend()

    def _extend(self) -> None:
        A, f = self.A, self.A.field
        t = len(self.proj)
        target = self.omegas[t]
        gens = _top_generators(A, target)
        P = build_proj_sum(A, tuple(v for v, _ in gens))
        q = cover_map(A, P, target, [vec for _, vec in gens])
        if t == 0:
            diff = q
        else:
            incl = self.incls[t]
            diff = tuple(f.matmul(incl[v], q[v]) for v in range(A.n_vertices))
        kernels = tuple(f.kernel_basis(q[v]) for v in range(A.n_vertices))
        omega, incl_mats = subrep_from_bases(P.rep, kernels)
        self.proj.append(P)
        self.diffs.append(diff)
        self.omegas.append(omega)
        self.incls.append(incl_mats)

    # -- derived data -----------------------------------------------------

    def multiplicities(self, j: int) -> np.ndarray:
        self.ensure(j)
        return self.proj[j].multiplicities(self.A.n_vertices)

    def hom_dim_proj(self, j: int, N: Rep) -> int:
        self.ensure(j)
        return int(sum(N.dim_vector[u] for u in self.proj[j].vertices))

    def hom_diff_rank(self, j: int, N: Rep) -> int:
        """Rank of Hom(p_j, N): Hom(P_{j-1}, N) -> Hom(P_j, N), j >= 1."""
        key = (j, N.content_key())
        with self._lock:
            if key in self._rank_cache:
                return self._rank_cache[key]
        self.ensure(j)
        f = self.A.field
        basis = hom_basis_from_proj(self.A, self.proj[j - 1], N)
        rows = int(sum(N.dim_vector[v] * len(self.proj[j].layout[v])
                       for v in range(self.A.n_vertices)))
        R = f.zeros(rows, len(basis))
        for c, fmats in enumerate(basis):
            pos = 0
            for v in range(self.A.n_vertices):
                comp = f.matmul(fmats[v], self.diffs[j][v])
                n = comp.shape[0] * comp.shape[1]
                R[pos:pos + n, c] = comp.reshape(-1)
                pos += n
        rank = f.rank(R)
        with self._lock:
            self._rank_cache[key] = rank
        return rank

    # -- invariant checks (used by the test suite) -------------------------

    def verify_exactness(self, j: int) -> bool:
        """im(p_{j+1}) equals ker(p_j) at stage j, checked per vertex."""
        self.ensure(j + 1)
        f = self.A.field
        for v in range(self.A.n_vertices):
            comp = f.matmul(self.diffs[j][v], self.diffs[j + 1][v])
            if not f.is_zero(comp):
                return False
            dim_pj = self.proj[j].rep.dim_vector[v]
            if f.rank(self.diffs[j + 1][v]) != dim_pj - f.rank(self.diffs[j][v]):
                return False
        return True

    def verify_minimality(self, j: int) -> bool:
        """im(p_j) is contained in rad(P_{j-1}), j >= 1."""
        self.ensure(j)
        prev = self.proj[j - 1]
        for u, col in prev.gen_pos:
            row = self.diffs[j][u][col, :]
            if not self.A.field.is_zero(row):
                return False
        return True


_CACHE_LOCK = threading.Lock()
_RES_CACHE: dict = {}
_RES_CACHE_CAP = 4096


def _algebra_key(A) -> str:
    key = A.__dict__.get("_content_key")
    if key is None:
        key = repr(A.spec.to_json()) + f"|{A.field.mode}:{A.field.p}"
        A.__dict__["_content_key"] = key
    return key


def get_resolution(A, M: Rep) -> Resolution:
    """Process-wide resolution cache with insert-if-absent semantics."""
    key = (_algebra_key(A), M.content_key())
    with _CACHE_LOCK:
        res = _RES_CACHE.get(key)
        if res is None:
            if len(_RES_CACHE) >= _RES_CACHE_CAP:
                _RES_CACHE.clear()
            res = Resolution(A, M)
            _RES_CACHE[key] = res
    return res


def minimal_presentation(A, M: Rep):
    """(P_1, p_1, P_0, p_0) of the minimal projective presentation."""
    res = get_resolution(A, M)
    res.ensure(1)
    return res.proj[1], res.diffs[1], res.proj[0], res.diffs[0]


def syzygy(A, M: Rep, j: int) -> Rep:
    """Omega^j(M) as an explicit representation (Omega^0 is M itself)."""
    if j == 0:
        return M
    res = get_resolution(A, M)
    res.ensure(j - 1)
    return res.omegas[j]


def proj_mult_in_resolution(A, M: Rep, j: int) -> np.ndarray:
    """[P_j : P(i)] for each vertex i, read off the minimal resolution."""
    return get_resolution(A, M).multiplicities(j)


def ext_dim(A, M: Rep, N: Rep, i: int) -> int:
    """dim Ext^i(M, N) as homology of Hom(P_*, N) over the minimal resolution."""
    if i < 0:
        raise ValueError("negative cohomological degree")
    if i == 0:
        return hom_dim(A, M, N)
    res = get_resolution(A, M)
    res.ensure(i + 1)
    return (res.hom_dim_proj(i, N)
            - res.hom_diff_rank(i + 1, N)
            - res.hom_diff_rank(i, N))


def euler_truncated(A, M: Rep, N: Rep, t: int) -> int:
    """Alternating sum of ext dimensions up to degree t."""
    return sum((-1) ** i * ext_dim(A, M, N, i) for i in range(t + 1))


def hom_omega(A, M: Rep, N: Rep, j: int) -> int:
    """hom(Omega^j(M), N)."""
    return hom_dim(A, syzygy(A, M, j), N)


# -- bar resolution route -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class BarSlice:
    """Differential d_i of the contracted standard complex plus the derived
    numbers for a fixed target: d_i maps A^{(i+1) tensor factors} (x) M to
    A^{i factors} (x) M."""

    index: int
    d_matrix: np.ndarray
    k: int
    c: int


class BarContext:
    """Shared scratch space for the bar-route Ext computation of one pair."""

    def __init__(self, A, M: Rep, N: Rep, cell_limit: int = DEFAULT_CELL_LIMIT):
        self.A, self.M, self.N = A, M, N
        self.cell_limit = int(cell_limit)
        f = A.field
        self.f = f
        self.dA, self.dM, self.dN = A.dim, M.total_dim, N.total_dim
        self._act_M = [total_path_matrix(M, p) for p in A.basis]
        self._act_N = [total_path_matrix(N, p) for p in A.basis]
        # struct_mat[c, b*dA + b'] is the coefficient of basis c in b*b'
        self._SM = np.ascontiguousarray(A.struct.transpose(2, 0, 1).reshape(A.dim, A.dim * A.dim))
        self._act_row = np.hstack(self._act_M) if self.dM else f.zeros(0, 0)
        self._k: dict[int, int] = {}

    def c(self, i: int) -> int:
        """dim Hom_A(A^{(i) factors} (x) M, N); zero by convention at i=0."""
        if i == 0:
            return 0
        return self.dA ** (i - 1) * self.dM * self.dN

    def _check_cells(self, j: int) -> None:
        cells = self.c(j + 1) * max(self.c(j), 1)
        if cells > self.cell_limit:
            raise ResourceLimitError(
                f"bar matrix for k_{j} needs a {self.c(j + 1)} x {self.c(j)} "
                f"matrix ({cells} cells), over the cell limit {self.cell_limit}")

    def hom_diff_matrix(self, j: int) -> np.ndarray:
        """Matrix of Hom_A(d_j, N) on free-generator coordinates, j >= 1.

        An A-linear map out of A^{(j) factors} (x) M is its restriction to
        1 (x) A^{(j-1) factors} (x) M; in those coordinates the induced map
        is c_{j+1} x c_j.  Coordinates are tensor-lexicographic on the
        source side, with the target factor of the Hom space minor.
        """
        self._check_cells(j)
        f, dA, dM, dN = self.f, self.dA, self.dM, self.dN
        dimV = dA ** (j - 1) * dM
        cj, cj1 = dimV * dN, dA ** j * dM * dN
        out = f.zeros(cj1, cj)
        idx = np.arange(dimV)
        for b in range(dA):
            view = out[b * cj:(b + 1) * cj].reshape(dimV, dN, dimV, dN)
            view[idx, :, idx, :] = self._act_N[b]
        for k in range(1, j):
            mult = f.kron(f.kron(f.eye(dA ** (k - 1)), self._SM),
                          f.eye(dA ** (j - 1 - k) * dM))
            term = f.kron(mult.T, f.eye(dN))
            out = f.add(out, term) if k % 2 == 0 else f.sub(out, term)
        act = f.kron(f.eye(dA ** (j - 1)), self._act_row)
        term = f.kron(act.T, f.eye(dN))
        out = f.add(out, term) if j % 2 == 0 else f.sub(out, term)
        return out

    def k(self, j: int) -> int:
        """dim Ker Hom_A(d_j, N); k_0 is zero by convention."""
        if j == 0:
            return 0
        if j not in self._k:
            mat = self.hom_diff_matrix(j)
            self._k[j] = self.c(j) - self.f.rank(mat)
        return self._k[j]

    def ext(self, i: int) -> int:
        return self.k(i + 1) + self.k(i) - self.c(i)

    def euler_truncated(self, t: int) -> int:
        """(-1)^t k_{t+1} plus the constant depending only on dimensions."""
        const = sum((-1) ** (i + 1) * self.c(i) for i in range(t + 1))
        return (-1) ** t * self.k(t + 1) + const

    def d_matrix(self, i: int) -> np.ndarray:
        """Module-side differential d_i, of shape (dA^i dM) x (dA^{i+1} dM)."""
        f, dA, dM = self.f, self.dA, self.dM
        rows = dA ** i * dM
        if rows * dA ** (i + 1) * dM > self.cell_limit:
            raise ResourceLimitError(f"module-side d_{i} exceeds the cell limit")
        out = f.zeros(rows, dA ** (i + 1) * dM)
        for k in range(i):
            term = f.kron(f.kron(f.eye(dA ** k), self._SM),
                          f.eye(dA ** (i - 1 - k) * dM))
            out = f.add(out, term) if k % 2 == 0 else f.sub(out, term)
        act = f.kron(f.eye(dA ** i), self._act_row)
        out = f.add(out, act) if i % 2 == 0 else f.sub(out, act)
        return out

    def slice(self, i: int) -> BarSlice:
        return BarSlice(index=i, d_matrix=self.d_matrix(i), k=self.k(i), c=self.c(i))


def ext_dim_bar(A, M: Rep, N: Rep, i: int,
                cell_limit: int = DEFAULT_CELL_LIMIT) -> int:
    """dim Ext^i(M, N) via the contracted standard complex; equals ext_dim."""
    if i < 0:
        raise ValueError("negative cohomological degree")
    return BarContext(A, M, N, cell_limit).ext(i)


def euler_truncated_bar(A, M: Rep, N: Rep, t: int,
                        cell_limit: int = DEFAULT_CELL_LIMIT) -> int:
    return BarContext(A, M, N, cell_limit).euler_truncated(t)


# -- debug dump ---------------------------------------------------------------


def dump_debug(A, M: Rep, N: Optional[Rep] = None, stages: int = 2,
               bar_max: int = 2, cell_limit: int = DEFAULT_CELL_LIMIT) -> dict:
    """Resolution stages and bar slices as JSON-ready data (row-major,
    canonical integer entries)."""
    res = get_resolution(A, M)
    res.ensure(stages)
    def dump_mat(m):
        return [[int(x) if A.field.mode == "prime" else str(x) for x in row] for row in m]
    out: dict = {
        "module": {"dim_vector": list(M.dim_vector)},
        "resolution": [
            {
                "stage": j,
                "summand_vertices": list(res.proj[j].vertices),
                "multiplicities": [int(x) for x in res.multiplicities(j)],
                "differential": [dump_mat(res.diffs[j][v]) for v in range(A.n_vertices)],
                "syzygy_dim_vector": list(res.omegas[j + 1].dim_vector),
            }
            for j in range(stages + 1)
        ],
    }
    if N is not None:
        ctx = BarContext(A, M, N, cell_limit)
        out["bar"] = [
            {"index": i, "c": ctx.c(i), "k": ctx.k(i), "d_matrix": dump_mat(ctx.d_matrix(i))}
            for i in range(1, bar_max + 1)
        ]
    return out
