"""
farstab: frame potentials for SICs and MUBs in finite Heisenberg groups.

Modules
-------
algebra     Heisenberg groups, displacement operators, parity, Zauner unitaries
mubs        petals, flowers and stabilizer MUBs
potentials  f_SIC, f_MUS, the inequality between them and closed-form values
states      SIC fiducials, Alltop vectors, MUB-balanced states
explore     sampling, Monte Carlo averages, multi-start optimizer, datasets
analysis    real Zauner map, orthogonality graphs, d=4 classification, Table 1
cli         command-line front end (``farstab`` / ``python -m farstab``)
"""

from .algebra import HeisenbergGroup, build_group, displacement
from .errors import (
    ConstructionFailure,
    DegenerateProjector,
    DimensionMismatch,
    IncompleteSet,
    IndexOutOfRange,
    NoFeasiblePoint,
    SearchFailure,
    SubspaceConstructionFailure,
    UnclassifiableBasis,
    UnknownAnchorState,
    UnsupportedDimension,
)
from .explore import OptimizationProblem, OptimizationResult, optimize
from .mubs import enumerate_flowers, enumerate_petals, stabilizer_mubs, stabilizer_states
from .potentials import PotentialReport, f_mus, f_sic, inequality_report

__version__ = "0.1.0"
