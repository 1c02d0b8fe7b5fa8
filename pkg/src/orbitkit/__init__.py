"""Experimental tools for 3x+k maps: cycles, inverse orbits, residue
invariants, rationality verdicts and exact generating functions."""

from orbitkit.mapkernel import (
    MapParam,
    Trajectory,
    conjugacy_negation_check,
    inverse_step,
    iterate,
    t_apply,
)
from orbitkit.cycles import (
    ClassifyOutcome,
    Cycle,
    CycleSearch,
    canonical_cycle,
    classify,
    classify_range,
    find_cycles,
)
from orbitkit.inverse import (
    DisjointnessVerdict,
    OrbitSample,
    Relation,
    enumerate_backward,
    fabry_case_check,
    partition_refine,
    trichotomy,
)
from orbitkit.residues import (
    ComponentPartition,
    ResidueSet,
    closure_check,
    commutator_check,
    component_partition,
    divisor_conjugacy_check,
    divisor_set,
    residue_component,
)
from orbitkit.verdicts import (
    ExceptionalSetReport,
    MembershipWindow,
    RationalityVerdict,
    SMLMatch,
    exceptional_set,
    natural_boundary_certificate,
    rationality_check,
    sml_pattern,
)
from orbitkit.genfun import (
    AffineClassTable,
    RationalSeries,
    affine_class_table,
    backward_gf_window,
    forward_gf,
    iterate_gf,
    verify_pole_structure,
)
from orbitkit.census import CensusTable, RunConfig, cache_load, cache_store, census

__version__ = "0.1.0"
