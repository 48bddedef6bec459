"""Semicontinuity and genericity experiments on parametrized module families.

Generic values of upper semicontinuous invariants are estimated as the
minimum over independently sampled parameter values (maximum for the lower
semicontinuous truncated Euler maps of odd degree); samples that disagree
are flagged, never averaged or retried.  An exhaustive small-field
enumerator provides an independent oracle for the sampled estimates.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraSpec, FDAlgebra, build_algebra
from .ar import E_invariant, g_vector
from .errors import InputError, ResourceLimitError, SpecializationError
from .exactla import Field
from .homology import ext_dim, euler_truncated, hom_dim, hom_omega
from .rep import (IsoResult, ModuleFamily, Rep, check_relations, iso_test,
                  random_rep)
from .rng import derive_rng

DEFAULT_SAMPLES = 5
DEFAULT_BRUTE_BUDGET = 10_000_000
_MAX_REJECTS = 1000

KINDS = ("hom", "end", "ext", "eta", "g", "E", "hom_omega")
_INDEX_KEY = {"ext": "i", "g": "i", "eta": "t", "hom_omega": "j"}


@dataclass(frozen=True)
class InvariantMap:
    """A semicontinuous invariant together with its arity.

    Direction rule: everything here is upper semicontinuous except the
    truncated Euler maps of odd degree, which are lower semicontinuous.
    """

    kind: str
    index: Optional[int] = None
    arity: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown invariant kind {self.kind!r}")
        if self.kind in _INDEX_KEY and self.index is None:
            raise InputError(f"invariant {self.kind!r} needs an index")
        if self.kind in ("end", "g") and self.arity != 1:
            raise InputError(f"{self.kind!r} is a one-module invariant")
        if self.kind == "hom" and self.arity != 2:
            raise InputError("pairwise hom has arity 2; the tied version is 'end'")
        if self.arity not in (1, 2):
            raise InputError("arity must be 1 or 2")

    @property
    def direction(self) -> str:
        if self.kind == "eta" and self.index % 2 == 1:
            return "lsc"
        return "usc"

    def evaluate(self, A: FDAlgebra, M: Rep, N: Optional[Rep] = None) -> int:
        second = N if (self.arity == 2 and N is not None) else M
        if self.kind == "hom":
            return hom_dim(A, M, second)
        if self.kind == "end":
            return hom_dim(A, M, M)
        if self.kind == "ext":
            return ext_dim(A, M, second, self.index)
        if self.kind == "eta":
            return euler_truncated(A, M, second, self.index)
        if self.kind == "g":
            return int(g_vector(A, M)[self.index])
        if self.kind == "E":
            return E_invariant(A, M, second)
        if self.kind == "hom_omega":
            return hom_omega(A, M, second, self.index)
        raise AssertionError(self.kind)

    def label(self) -> str:
        base = self.kind if self.index is None else f"{self.kind}_{self.index}"
        return base + ("(-)" if self.arity == 1 else "(-,?)")

    @staticmethod
    def from_json(data: dict, arity: int) -> "InvariantMap":
        kind = data.get("kind")
        if kind is None:
            raise InputError("map entry needs a 'kind'")
        idx = data.get(_INDEX_KEY.get(kind, ""), data.get("index"))
        if kind in ("end", "g"):
            arity = 1
        if kind == "hom":
            arity = 2
        return InvariantMap(kind, None if idx is None else int(idx), arity)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "arity": self.arity}
        if self.index is not None:
            out[_INDEX_KEY.get(self.kind, "index")] = self.index
        return out


# -- samplers ----------------------------------------------------------------


class FamilySampler:
    """Draws specializations of a one-parameter family at random parameters."""

    def __init__(self, A: FDAlgebra, family: ModuleFamily):
        self.A = A
        self.family = family

    def draw(self, rng: np.random.Generator) -> tuple[str, Rep]:
        f = self.A.field
        for _ in range(_MAX_REJECTS):
            lam = int(rng.integers(0, f.p)) if f.mode == "prime" \
                else int(rng.integers(1, 1 << 20))
            if self.family.is_excluded(f, lam):
                continue
            try:
                return str(lam), self.family.specialize(f, lam)
            except SpecializationError:
                continue
        raise InputError("all sampled parameters were excluded or poles")


class HereditarySampler:
    """Uniform points of the representation space of a relation-free algebra."""

    def __init__(self, A: FDAlgebra, dims: Sequence[int]):
        if A.spec.relations:
            raise InputError("uniform sampling needs an algebra without relations")
        self.A = A
        self.dims = tuple(int(d) for d in dims)

    def draw(self, rng: np.random.Generator) -> tuple[str, Rep]:
        return "", random_rep(self.A, self.dims, rng)


class ConstantSampler:
    def __init__(self, A: FDAlgebra, rep: Rep):
        self.A = A
        self.rep = rep

    def draw(self, rng: np.random.Generator) -> tuple[str, Rep]:
        return "const", self.rep


class CoupledJordanSampler:
    """Constructed sampler for two nilpotent loops coupled by two bridges.

    Both loops act as conjugates of a single regular nilpotent Jordan
    block; the bridge matrices are random solutions of the linear
    intertwining constraint loop0 * B = B * loop1.  Whether the image is
    dense in the relevant component is not established; results obtained
    from this sampler are reported as informational.
    """

    def __init__(self, A: FDAlgebra, n: int, loop0: str = "a", loop1: str = "c",
                 bridges: tuple[str, str] = ("b1", "b2")):
        self.A = A
        self.n = int(n)
        self.loop0, self.loop1, self.bridges = loop0, loop1, bridges

    def draw(self, rng: np.random.Generator) -> tuple[str, Rep]:
        f = self.A.field
        n = self.n
        shift = f.zeros(n, n)
        for i in range(1, n):
            shift[i, i - 1] = 1
        g1, g2 = f.rand_invertible(rng, n), f.rand_invertible(rng, n)
        a0 = f.mm(g1, shift, f.inv(g1))
        c0 = f.mm(g2, shift, f.inv(g2))
        system = f.sub(f.kron(a0, f.eye(n)), f.kron(f.eye(n), c0.T))
        K = f.kernel_basis(system)
        mats = {self.loop0: a0, self.loop1: c0}
        for name in self.bridges:
            coeff = f.rand_matrix(rng, K.shape[1], 1)
            mats[name] = f.matmul(K, coeff).reshape(n, n)
        rep = Rep(f, self.A.spec.quiver, (n, n), mats)
        return "", rep


# -- generic values ------------------------------------------------------------


@dataclass(frozen=True)
class GenericEstimate:
    map: InvariantMap
    value: int
    samples: tuple  # ((label, value), ...)
    disagreement: bool

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "value": self.value,
            "samples": [{"label": lab, "value": val} for lab, val in self.samples],
            "disagreement": self.disagreement,
        }


def _final_label(ordinal: int, lab: str) -> str:
    return lab if lab else f"s{ordinal}"


def generic_value(imap: InvariantMap, sampler, sampler2=None, *,
                  seed: int, samples: int = DEFAULT_SAMPLES,
                  stream: str = "generic") -> GenericEstimate:
    """Estimate the generic value of ``imap`` on the sampled family.

    One-module invariants are evaluated at single draws; two-module
    invariants at independent pairs.  Upper semicontinuous kinds take the
    minimum over draws, lower semicontinuous ones the maximum.  Sampling is
    sequential from labeled streams, so a larger sample count extends the
    smaller one's draws (the estimate is monotone in ``samples``).
    """
    if samples < 2:
        raise InputError("generic_value needs at least 2 samples")
    A = sampler.A
    rng_l = derive_rng(seed, stream, "L")
    rng_r = derive_rng(seed, stream, "R")
    out = []
    for k in range(samples):
        lab_m, M = sampler.draw(rng_l)
        if imap.arity == 1:
            out.append((_final_label(k, lab_m), int(imap.evaluate(A, M))))
        else:
            s2 = sampler2 if sampler2 is not None else sampler
            lab_n, N = s2.draw(rng_r)
            label = f"{_final_label(k, lab_m)},{_final_label(k, lab_n)}"
            out.append((label, int(imap.evaluate(A, M, N))))
    values = [v for _, v in out]
    value = min(values) if imap.direction == "usc" else max(values)
    return GenericEstimate(imap, value, tuple(out), len(set(values)) > 1)


# -- semicontinuity check --------------------------------------------------------


@dataclass(frozen=True)
class SemicontReport:
    map: InvariantMap
    direction: str
    generic_value: int
    special_value: int
    special_lambda: int
    samples: tuple
    disagreement: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "direction": self.direction,
            "generic_value": self.generic_value,
            "special_value": self.special_value,
            "special_lambda": self.special_lambda,
            "samples": [{"label": lab, "value": val} for lab, val in self.samples],
            "disagreement": self.disagreement,
            "verdict": "pass" if self.passed else "fail",
        }

    def render(self) -> str:
        lines = [
            ("map", self.map.label()),
            ("direction", self.direction),
            ("generic", str(self.generic_value)),
            (f"special(l={self.special_lambda})", str(self.special_value)),
            ("samples", "  ".join(f"{lab}->{val}" for lab, val in self.samples)),
            ("disagreement", "yes" if self.disagreement else "no"),
            ("verdict", "PASS" if self.passed else "FAIL"),
        ]
        width = max(len(k) for k, _ in lines)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in lines)


def semicontinuity_check(A: FDAlgebra, imap: InvariantMap, family: ModuleFamily,
                         second: Optional[ModuleFamily] = None, *,
                         special_lambda: int, seed: int,
                         samples: int = DEFAULT_SAMPLES,
                         direction_override: Optional[str] = None) -> SemicontReport:
    """Compare the sampled generic value against the value at a special point.

    The verdict applies the direction rule: at a degeneration the invariant
    may only go up for usc kinds and only go down for lsc kinds.
    """
    sampler = FamilySampler(A, family)
    sampler2 = FamilySampler(A, second) if second is not None else None
    est = generic_value(imap, sampler, sampler2, seed=seed, samples=samples)
    f = A.field
    M0 = family.specialize(f, special_lambda)
    if imap.arity == 1:
        special = int(imap.evaluate(A, M0))
    else:
        N0 = (second or family).specialize(f, special_lambda)
        special = int(imap.evaluate(A, M0, N0))
    direction = direction_override or imap.direction
    if direction not in ("usc", "lsc"):
        raise InputError(f"bad direction {direction!r}")
    passed = special >= est.value if direction == "usc" else special <= est.value
    return SemicontReport(imap, direction, est.value, special, int(special_lambda),
                          est.samples, est.disagreement, passed)


# -- theorem-style experiments -----------------------------------------------------


@dataclass(frozen=True)
class Theorem15Report:
    hom_zz: int
    end_z: int
    ext1_zz: int
    ext1_z: int
    e_zz: int
    e_z: int
    strict: tuple[bool, bool, bool]
    consistent: bool
    no_dense_orbit_expected: Optional[bool]
    disagreement: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "hom(Z,Z)": self.hom_zz, "end(Z)": self.end_z,
            "ext1(Z,Z)": self.ext1_zz, "ext1(Z)": self.ext1_z,
            "E(Z,Z)": self.e_zz, "E(Z)": self.e_z,
            "strict": list(self.strict), "consistent": self.consistent,
            "no_dense_orbit_expected": self.no_dense_orbit_expected,
            "disagreement": self.disagreement,
            "verdict": "pass" if self.passed else "fail",
        }


def theorem_1_5_check(sampler, *, seed: int,
                      samples: int = DEFAULT_SAMPLES) -> Theorem15Report:
    """Estimate the three generic inequalities and assert they are all-or-none.

    When two independent draws are provably non-isomorphic the family is
    flagged as having no dense orbit, in which case all three inequalities
    must be strict.
    """
    ests = {}
    for key, imap in (
        ("hom_zz", InvariantMap("hom", arity=2)),
        ("end_z", InvariantMap("end", arity=1)),
        ("ext1_zz", InvariantMap("ext", 1, arity=2)),
        ("ext1_z", InvariantMap("ext", 1, arity=1)),
        ("e_zz", InvariantMap("E", arity=2)),
        ("e_z", InvariantMap("E", arity=1)),
    ):
        ests[key] = generic_value(imap, sampler, seed=seed, samples=samples,
                                  stream=f"thm15/{key}")
    vals = {k: e.value for k, e in ests.items()}
    strict = (vals["hom_zz"] < vals["end_z"],
              vals["ext1_zz"] < vals["ext1_z"],
              vals["e_zz"] < vals["e_z"])
    consistent = all(strict) or not any(strict)
    _, m1 = sampler.draw(derive_rng(seed, "thm15/isoprobe", "L"))
    _, m2 = sampler.draw(derive_rng(seed, "thm15/isoprobe", "R"))
    probe = iso_test(m1, m2, seed=seed)
    no_dense = {IsoResult.NOT_ISO: True, IsoResult.ISO: False,
                IsoResult.INCONCLUSIVE: None}[probe]
    passed = consistent
    if no_dense is True:
        passed = passed and all(strict)
    elif no_dense is False:
        passed = passed and not any(strict)
    return Theorem15Report(
        vals["hom_zz"], vals["end_z"], vals["ext1_zz"], vals["ext1_z"],
        vals["e_zz"], vals["e_z"], strict, consistent, no_dense,
        any(e.disagreement for e in ests.values()), passed)


@dataclass(frozen=True)
class BrickReport:
    end_z: int
    hom_zz: Optional[int]
    applicable: bool
    no_dense_orbit_expected: Optional[bool]
    passed: bool

    def to_json(self) -> dict:
        return {"end(Z)": self.end_z, "hom(Z,Z)": self.hom_zz,
                "applicable": self.applicable,
                "no_dense_orbit_expected": self.no_dense_orbit_expected,
                "verdict": "pass" if self.passed else "fail"}


def brick_no_dense_orbit_check(sampler, *, seed: int,
                               samples: int = DEFAULT_SAMPLES) -> BrickReport:
    """On a brick family without dense orbit, independent samples must not map
    to each other at all."""
    end_est = generic_value(InvariantMap("end", arity=1), sampler,
                            seed=seed, samples=samples, stream="brick/end")
    _, m1 = sampler.draw(derive_rng(seed, "brick/isoprobe", "L"))
    _, m2 = sampler.draw(derive_rng(seed, "brick/isoprobe", "R"))
    probe = iso_test(m1, m2, seed=seed)
    no_dense = {IsoResult.NOT_ISO: True, IsoResult.ISO: False,
                IsoResult.INCONCLUSIVE: None}[probe]
    applicable = end_est.value == 1 and no_dense is True
    if not applicable:
        return BrickReport(end_est.value, None, False, no_dense, True)
    hom_est = generic_value(InvariantMap("hom", arity=2), sampler,
                            seed=seed, samples=samples, stream="brick/hom")
    return BrickReport(end_est.value, hom_est.value, True, no_dense,
                       hom_est.value == 0)


@dataclass(frozen=True)
class DecompReport:
    ext1: tuple
    e_matrix: tuple
    ext1_condition: bool
    e_condition: bool
    implication_violations: tuple

    def to_json(self) -> dict:
        return {"ext1_offdiag": [list(r) for r in self.ext1],
                "E_offdiag": [list(r) for r in self.e_matrix],
                "ext1_condition": self.ext1_condition,
                "E_condition": self.e_condition,
                "implication_violations": [list(v) for v in self.implication_violations]}


def decomp_conditions(A: FDAlgebra, mods: Sequence[Rep]) -> DecompReport:
    """Pairwise ext^1 and E matrices off the diagonal, with the vanishing
    flags that control direct-sum genericity; E-vanishing must imply
    ext^1-vanishing pointwise."""
    if len(mods) < 2:
        raise InputError("decomposition conditions need at least 2 modules")
    t = len(mods)
    ext1 = [[0] * t for _ in range(t)]
    emat = [[0] * t for _ in range(t)]
    for i in range(t):
        for j in range(t):
            if i == j:
                continue
            ext1[i][j] = ext_dim(A, mods[i], mods[j], 1)
            emat[i][j] = E_invariant(A, mods[i], mods[j])
    off = [(i, j) for i in range(t) for j in range(t) if i != j]
    ext1_ok = all(ext1[i][j] == 0 for i, j in off)
    e_ok = all(emat[i][j] == 0 for i, j in off)
    violations = tuple((i, j) for i, j in off if emat[i][j] == 0 and ext1[i][j] != 0)
    return DecompReport(tuple(tuple(r) for r in ext1), tuple(tuple(r) for r in emat),
                        ext1_ok, e_ok, violations)


# -- exhaustive small-field oracle ---------------------------------------------------


@dataclass(frozen=True)
class BruteTable:
    q: int
    dims: tuple[int, ...]
    n_points: int
    results: dict  # map label -> {"min": int, "max": int, "histogram": {value: count}}

    def to_json(self) -> dict:
        return {"q": self.q, "dims": list(self.dims), "n_points": self.n_points,
                "results": {k: {"min": v["min"], "max": v["max"],
                                "histogram": {str(kk): vv for kk, vv in
                                              sorted(v["histogram"].items())}}
                            for k, v in sorted(self.results.items())}}


def brute_force_generic(A: FDAlgebra, dims: Sequence[int], q: int,
                        maps: Sequence[InvariantMap],
                        budget: int = DEFAULT_BRUTE_BUDGET) -> BruteTable:
    """Enumerate every matrix tuple over F_q, filter by the relations, and
    tabulate each requested invariant over all points (ordered pairs for
    two-module invariants).  The minimum column is the exhaustive generic
    value for usc kinds."""
    dims = tuple(int(d) for d in dims)
    fq = Field.prime(q)
    Aq = build_algebra(A.spec, fq)
    quiver = A.spec.quiver
    shapes = [(a.name, dims[a.tgt], dims[a.src]) for a in quiver.arrows]
    n_entries = sum(r * c for _, r, c in shapes)
    n_tuples = q ** n_entries
    if n_tuples > budget:
        raise ResourceLimitError(
            f"enumeration needs {n_tuples} points over F_{q}, over the budget {budget}")
    points: list[Rep] = []
    for combo in itertools.product(range(q), repeat=n_entries):
        mats = {}
        pos = 0
        for name, r, c in shapes:
            mats[name] = fq.asarray(list(combo[pos:pos + r * c]), shape=(r, c))
            pos += r * c
        rep = Rep(fq, quiver, dims, mats)
        if check_relations(Aq, rep).ok:
            points.append(rep)
    results = {}
    for imap in maps:
        hist: Counter = Counter()
        if imap.arity == 1:
            for M in points:
                hist[int(imap.evaluate(Aq, M))] += 1
        else:
            for M in points:
                for N in points:
                    hist[int(imap.evaluate(Aq, M, N))] += 1
        results[imap.label()] = {"min": min(hist), "max": max(hist),
                                 "histogram": dict(hist)}
    return BruteTable(q, dims, len(points), results)


# -- scenario files -------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """One degeneration experiment loaded from a JSON file.

    Schema: {"algebra": path, "family": path-or-inline,
    "second_family": optional path-or-inline, "map": {"kind", index...},
    "special_lambda": int, "samples": int, "seed": int,
    "direction": optional "usc"/"lsc" override for self-tests}.
    """

    name: str
    spec: AlgebraSpec
    family_data: dict
    second_family_data: Optional[dict]
    map_data: dict
    special_lambda: int
    samples: int
    seed: int
    direction_override: Optional[str]


def load_scenario(path: str) -> Scenario:
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc

    def resolve(entry):
        if isinstance(entry, str):
            with open(os.path.join(base, entry)) as fh:
                return json.load(fh)
        if isinstance(entry, dict):
            return entry
        raise InputError(f"{path}: family entries must be file names or inline objects")

    try:
        spec = AlgebraSpec.from_json(resolve(data["algebra"]))
        family = resolve(data["family"])
        second = resolve(data["second_family"]) if "second_family" in data else None
        return Scenario(
            name=os.path.splitext(os.path.basename(path))[0],
            spec=spec,
            family_data=family,
            second_family_data=second,
            map_data=data["map"],
            special_lambda=int(data["special_lambda"]),
            samples=int(data.get("samples", DEFAULT_SAMPLES)),
            seed=int(data.get("seed", 0)),
            direction_override=data.get("direction"),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed scenario ({exc})") from exc


def run_scenario(sc: Scenario, field: Optional[Field] = None) -> SemicontReport:
    field = field or Field.prime()
    A = build_algebra(sc.spec, field)
    family = ModuleFamily.from_json(sc.spec.quiver, sc.family_data)
    second = (ModuleFamily.from_json(sc.spec.quiver, sc.second_family_data)
              if sc.second_family_data is not None else None)
    imap = InvariantMap.from_json(sc.map_data, arity=2 if (second is not None or
                                                           sc.map_data.get("kind") == "hom")
                                  else 1)
    if not family.relations_vanish(sc.spec):
        raise InputError(f"scenario {sc.name}: family violates the relations identically")
    return semicontinuity_check(A, imap, family, second,
                                special_lambda=sc.special_lambda, seed=sc.seed,
                                samples=sc.samples,
                                direction_override=sc.direction_override)
