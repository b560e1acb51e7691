"""Built-in groups and modules, and the JSON descriptors for user-supplied ones.

Group documents look like ``{"name": "S3", "degree": 3, "generators":
[[[1, 2]], [[1, 2, 3]]]}`` (1-based cycles) or ``{"builtin": "S4"}``.
Module documents are ``"trivial"``, ``"sign"``, ``"twisted"`` (the corpus
module for that group and prime) or ``{"prime": p, "dim": d, "action":
[matrix per generator]}``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import InvalidModule
from .modules import GModule
from .perm import (
    PermGroup,
    cycles_of,
    direct_product,
    group_from_generators,
    wreath_product_cp,
)


def _perm_sign(perm) -> int:
    return sum(len(c) - 1 for c in cycles_of(perm)) % 2


def _sl23() -> PermGroup:
    vecs = [v for v in itertools.product(range(3), repeat=2) if any(v)]
    pos = {v: i for i, v in enumerate(vecs)}

    def perm(m):
        return tuple(pos[((m[0][0] * a + m[0][1] * b) % 3, (m[1][0] * a + m[1][1] * b) % 3)] for a, b in vecs)

    return PermGroup(8, [perm(SL23_GENS[0]), perm(SL23_GENS[1])])


SL23_GENS = (((1, 1), (0, 1)), ((0, 2), (1, 0)))

_CYCLES = {
    "C2": (2, [[[1, 2]]]),
    "C3": (3, [[[1, 2, 3]]]),
    "C4": (4, [[[1, 2, 3, 4]]]),
    "C9": (9, [[[1, 2, 3, 4, 5, 6, 7, 8, 9]]]),
    "V4": (4, [[[1, 2], [3, 4]], [[1, 3], [2, 4]]]),
    "S3": (3, [[[1, 2]], [[1, 2, 3]]]),
    "S4": (4, [[[1, 2]], [[1, 2, 3, 4]]]),
    "A4": (4, [[[1, 2, 3]], [[1, 2], [3, 4]]]),
    "D8": (4, [[[1, 2, 3, 4]], [[1, 3]]]),
    "Q8": (8, [[[1, 2, 4, 7], [3, 6, 8, 5]], [[1, 3, 4, 8], [2, 5, 7, 6]]]),
    "S5": (5, [[[1, 2]], [[1, 2, 3, 4, 5]]]),
    "A5": (5, [[[1, 2, 3]], [[1, 2, 3, 4, 5]]]),
    "F20": (5, [[[1, 2, 3, 4, 5]], [[2, 3, 5, 4]]]),
    "F21": (7, [[[1, 2, 3, 4, 5, 6, 7]], [[2, 3, 5], [4, 7, 6]]]),
}


@lru_cache(maxsize=None)
def builtin_group(name: str) -> PermGroup:
    if name == "SL23":
        return _sl23()
    if name == "AGL19":
        return _agl19()
    if name == "S3wrC3":
        return builtin_wreath("S3", 3).group
    if name == "S4wrC2":
        return builtin_wreath("S4", 2).group
    if name in ("S4xS3", "S3xS3", "S4xS4", "S4xC2", "S3xC3"):
        a, b = name.split("x")
        return direct_product(builtin_group(a), builtin_group(b))[0]
    if name not in _CYCLES:
        raise KeyError(f"unknown builtin group {name!r}")
    degree, gens = _CYCLES[name]
    return group_from_generators(degree, gens)


@lru_cache(maxsize=None)
def builtin_wreath(base: str, p: int):
    return wreath_product_cp(builtin_group(base), p)


@lru_cache(maxsize=None)
def builtin_product(a: str, b: str):
    return direct_product(builtin_group(a), builtin_group(b))


def _agl19() -> PermGroup:
    # affine maps of F_9 = F_3[i]/(i^2+1): translations and multiplication by 1+i
    elems = [(a, b) for a in range(3) for b in range(3)]
    pos = {e: k for k, e in enumerate(elems)}

    def mul(x, y):
        return ((x[0] * y[0] - x[1] * y[1]) % 3, (x[0] * y[1] + x[1] * y[0]) % 3)

    shift = tuple(pos[((a + 1) % 3, b)] for a, b in elems)
    shift2 = tuple(pos[(a, (b + 1) % 3)] for a, b in elems)
    rot = tuple(pos[mul((1, 1), e)] for e in elems)
    return PermGroup(9, [shift, shift2, rot])


# -- modules --------------------------------------------------------------


def sign_module(G: PermGroup, p: int) -> GModule:
    return GModule.from_function(
        p, G.full, lambda g: np.array([[1 if _perm_sign(G.elements[g]) == 0 else p - 1]], dtype=np.int64))


def _sum_zero_matrix(pi) -> np.ndarray:
    """Action of a permutation of 3 points on the sum-zero part of F_2^3 (basis e1+e3, e2+e3)."""
    basis = [np.array([1, 0, 1]), np.array([0, 1, 1])]
    cols = []
    for v in basis:
        w = np.zeros(3, dtype=np.int64)
        for i in range(3):
            w[pi[i]] = v[i]
        # coordinates in the basis: w = a (e1+e3) + b (e2+e3)
        cols.append([w[0] % 2, w[1] % 2])
    return np.array(cols, dtype=np.int64).T


_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def _s4_to_s3(perm) -> tuple:
    """Action of S_4 on the three pairings of four points."""
    out = []
    for pr in _PAIRINGS:
        img = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in pr))
        out.append(_PAIRINGS.index(img))
    return tuple(out)


def gl22_module(G: PermGroup) -> GModule:
    """2-dim F_2 module of S_3, or of S_4 and A_4 through their action on pairings."""
    if G.degree == 3:
        return GModule.from_function(2, G.full, lambda g: _sum_zero_matrix(G.elements[g]))
    return GModule.from_function(2, G.full, lambda g: _sum_zero_matrix(_s4_to_s3(G.elements[g])))


def swap_module(G: PermGroup) -> GModule:
    """D_8 acting on F_2^2 through D_8 / C_4 by swapping coordinates."""
    rot = G.index[tuple([1, 2, 3, 0])]
    C4 = {0, rot, G.mul(rot, rot), G.mul(rot, G.mul(rot, rot))}
    swap = np.array([[0, 1], [1, 0]], dtype=np.int64)
    return GModule.from_function(2, G.full, lambda g: np.eye(2, dtype=np.int64) if g in C4 else swap)


def sl23_natural(G: PermGroup) -> GModule:
    pairs = []
    for gen, m in zip(G.generators, SL23_GENS):
        pairs.append((G.index[gen], np.array(m, dtype=np.int64)))
    return GModule.from_generators(3, G.full, pairs, dim=2)


def twisted_module(name: str, p: int) -> GModule:
    G = builtin_group(name)
    if name in ("S3", "S4", "A4") and p == 2:
        return gl22_module(G)
    if name == "D8" and p == 2:
        return swap_module(G)
    if name == "SL23" and p == 3:
        return sl23_natural(G)
    if p > 2:
        return sign_module(G, p)
    raise KeyError(f"no twisted module for {name} at p={p}")


# -- the acceptance corpus ------------------------------------------------


@dataclass(frozen=True)
class Instance:
    group: str
    p: int

    @property
    def name(self) -> str:
        return f"{self.group}@{self.p}"

    @property
    def G(self) -> PermGroup:
        return builtin_group(self.group)

    def module(self, kind: str = "trivial") -> GModule:
        if kind == "trivial":
            return GModule.trivial(self.p, self.G.full)
        if kind == "sign":
            return sign_module(self.G, self.p)
        if kind == "twisted":
            return twisted_module(self.group, self.p)
        raise KeyError(kind)


CORPUS = (
    Instance("S3", 2),
    Instance("S3", 3),
    Instance("S4", 2),
    Instance("A4", 2),
    Instance("D8", 2),
    Instance("S3wrC3", 3),
    Instance("SL23", 3),
)


def instance(name: str) -> Instance:
    group, p = name.split("@")
    return Instance(group, int(p))


# -- JSON descriptors -----------------------------------------------------


def load_json(source):
    if isinstance(source, (dict, list, str)) and not (isinstance(source, str) and source.endswith(".json")):
        return source
    return json.loads(Path(source).read_text())


def group_from_doc(doc) -> tuple[str, PermGroup]:
    doc = load_json(doc)
    if isinstance(doc, str):
        return doc, builtin_group(doc)
    if "builtin" in doc:
        return doc["builtin"], builtin_group(doc["builtin"])
    G = group_from_generators(int(doc["degree"]), doc["generators"])
    return doc.get("name", f"G{G.order}"), G


def module_from_doc(doc, name: str, G: PermGroup, p: int) -> GModule:
    doc = load_json(doc) if doc is not None else "trivial"
    if isinstance(doc, str):
        if doc == "trivial":
            return GModule.trivial(p, G.full)
        if doc == "sign":
            return sign_module(G, p)
        if doc == "twisted":
            return twisted_module(name, p)
        raise InvalidModule(f"unknown module kind {doc!r}")
    if doc.get("trivial"):
        return GModule.trivial(int(doc.get("prime", p)), G.full, int(doc.get("dim", 1)))
    q = int(doc["prime"])
    if q != p:
        raise InvalidModule(f"module prime {q} differs from {p}")
    dim = int(doc["dim"])
    action = doc["action"]
    if len(action) != len(G.generators):
        raise InvalidModule("one matrix per group generator is required")
    pairs = [(G.index[g], np.array(m, dtype=np.int64).reshape(dim, dim)) for g, m in zip(G.generators, action)]
    return GModule.from_generators(p, G.full, pairs, dim=dim)
