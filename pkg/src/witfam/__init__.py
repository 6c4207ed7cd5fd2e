"""Adaptive entanglement detection for two-qubit states with witness families.

Submodules
----------
qcore        linear algebra, partial transpose, fidelities, concurrence
states       reference state classes and random entangled ensembles
witness      witness families, the criterion S and custom families
measurement  Born-rule sampling, datasets and their text format
estimation   ML, MLME and the maximum-likelihood-set check
separable    maximum likelihood over separable states
schemes      detection runs A, B, C, B', C' and the tomography fallback
diagnostics  local Pauli measurements and nonlinear witness bounds
waveplates   QWP-HWP-QWP settings for the family unitaries
harness      Monte Carlo sweeps and histogram reports
"""

from .estimation import ml_estimate, ml_set_check, mlme_estimate, ppt_separable
from .measurement import Dataset, FamilyRecord, measure
from .schemes import SchemeId, run_detection, select_next_family, tomography_fallback
from .separable import ml_separable
from .states import StateClass, sample_entangled
from .witness import WitnessFamily, criterion_s, family_from_ket, family_unitary

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FamilyRecord",
    "SchemeId",
    "StateClass",
    "WitnessFamily",
    "criterion_s",
    "family_from_ket",
    "family_unitary",
    "measure",
    "ml_estimate",
    "ml_separable",
    "ml_set_check",
    "mlme_estimate",
    "ppt_separable",
    "run_detection",
    "sample_entangled",
    "select_next_family",
    "tomography_fallback",
]
