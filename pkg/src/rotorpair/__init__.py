"""Two coupled quantum kicked rotors on the quantized torus.

Generates entanglement between two particles prepared in a Gaussian
product state, tracks the purity of the reduced one-particle density
matrix, and confronts the observed decay with classical quantities
(Lyapunov exponents, interaction correlators) computed from the
corresponding coupled standard maps.
"""

from rotorpair.hilbert import (
    GridSpec,
    HilbertError,
    QuantumState,
    WavepacketSpec,
    make_grid,
    make_wavepacket,
    tensor_product,
)
from rotorpair.qdynamics import (
    InteractionTable,
    ModelParams,
    WeakCouplingWarning,
    build_interaction,
    evolve,
    floquet_step,
)
from rotorpair.reduction import (
    DensityMatrix,
    linear_entropy,
    offdiag_profile,
    partial_trace,
    purity,
    purity_direct,
)
from rotorpair.classical import (
    CorrelatorEstimate,
    LyapunovEstimate,
    PhasePoint,
    classical_step,
    correlator_gamma_big,
    correlator_gamma_small,
    ehrenfest_time,
    lyapunov,
)
from rotorpair.analysis import (
    DecayFit,
    PuritySeries,
    RegimePrediction,
    RegimeReport,
    fit_exponential,
    fit_power_law,
    make_prediction,
    random_state_purity_mc,
    saturation_estimate,
    select_regime,
)

__version__ = "0.1.0"
