"""Cached corpus objects shared by the property and acceptance suites."""

from functools import lru_cache

import numpy as np

from fusionlab import linalg
from fusionlab.cohom import CohomologyEngine
from fusionlab.corpus import CORPUS, builtin_group, instance
from fusionlab.fusion import build_fusion
from fusionlab.modules import check_pilocal_compatibility
from fusionlab.nerve import NerveComplex, build_linking, build_transporter

SMALL = ("S3@2", "S3@3", "S4@2", "A4@2", "D8@2")
ALL = tuple(i.name for i in CORPUS)


@lru_cache(maxsize=None)
def fusion(name):
    inst = instance(name)
    return build_fusion(inst.G.full, inst.p)


@lru_cache(maxsize=None)
def module(name, kind):
    return instance(name).module(kind)


@lru_cache(maxsize=None)
def engine(name, kind, n_max=3):
    return CohomologyEngine(module(name, kind), n_max)


@lru_cache(maxsize=None)
def compatible(name, kind):
    F = fusion(name)
    return check_pilocal_compatibility(module(name, kind), F.G, F.centric_subgroups)[0]


@lru_cache(maxsize=None)
def nerve(name, kind, category="transporter", collection="centric", n_max=2):
    inst = instance(name)
    build = build_linking if category == "linking" else build_transporter
    C = build(inst.G.full, inst.p, collection, fusion(name))
    return NerveComplex(C, module(name, kind), n_max)


def random_combination(basis, p, seed):
    """A random vector in the row span of ``basis``."""
    rng = np.random.default_rng(seed)
    c = rng.integers(0, p, size=basis.shape[0])
    return np.mod(c @ basis, p)


def same_span(A, B, p):
    ra = linalg.rref(A, p)[0] if A.size else A.reshape(0, A.shape[-1])
    rb = linalg.rref(B, p)[0] if B.size else B.reshape(0, B.shape[-1])
    return ra.shape == rb.shape and np.array_equal(ra, rb)
