"""Coherent-state qubit gates with squeezed single photons as cat resources.

Truncated Fock-space simulation of cat-state teleportation, the rotated
Hadamard gate and the displacement fringe experiment, with exact cats or
squeezed single photons as the odd-cat resource and lossy photon counters.
"""

from .detection import (
    DetectorModel,
    Outcome,
    OutcomeClass,
    classify,
    event_weights,
    lossy_povm,
    measure_event,
    measure_modes,
)
from .fock import (
    BeamsplitterSpec,
    Conditioned,
    CutoffError,
    FockVector,
    HeadroomError,
    MixedState,
    TruncationLeakError,
    apply_beamsplitter,
    apply_displacement,
    apply_phase_rotation,
    coherent_state,
    condition_on_outcome,
    cutoff_for,
    fidelity,
    fock_state,
    squeezed_photon,
    squeezed_vacuum,
    tensor,
)
from .hadamard import (
    FringePoint,
    HadamardChannel,
    HadamardConfig,
    HadamardGrid,
    computational_readout,
    count_prob_closed,
    fringe_sweep,
    hadamard_target,
    rotated_hadamard,
    visibility,
)
from .states import (
    CatSpec,
    DegenerateStateError,
    QubitSpec,
    ResourceKind,
    cat_fidelity_closed,
    cat_state,
    optimal_r_numeric,
    optimal_r_closed_form,
    qubit_state,
    squeezed_cutoff,
    stationary_residual,
)
from .teleport import (
    BELL_CORRECTIONS,
    Correction,
    TeleportGrid,
    TeleportReport,
    bell_resource,
    concatenation_check,
    min_p_succ,
    p_fail_closed,
    p_succ_closed,
    teleport,
    teleport_state,
)

__version__ = "0.1.0"
