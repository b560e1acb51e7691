"""Fusion systems of finite groups, twisted cohomology, stable elements and
transporter-category nerves over F_p."""

from .cohom import CohomologyEngine, bar_cohomology, group_cohomology, kappa_map, restriction_map
from .fusion import build_fusion, essential_subgroups, model_of, opprime_fusion
from .modules import GModule, check_pilocal_compatibility, coinduce, induce
from .nerve import build_linking, build_transporter, chain_census, delta_S_comparison, nerve_cohomology
from .perm import PermGroup, group_from_generators, sylow_subgroup
from .stable import family_equality, opprime_stable_and_fixed, stable_subspace

__version__ = "0.1.0"
