"""Environment-mediated erasure of a qubit toward the blank state ``|0>``.

A qubit coupled dissipatively to a squeezed thermal bath relaxes toward a fixed
point that is pure only at zero temperature and zero squeezing.  This package
provides the closed-form Bloch dynamics of that channel, its fidelity laws and
Kraus forms, a pure-dephasing (QND) contrast channel, and an RK4 Lindblad
integrator used to verify the closed forms.
"""

__version__ = "0.1.0"

from qdeleter.bath import BathParams, EnvConstants, derive_constants, planck_occupation
from qdeleter.dissipative import (
    AsymptoticState,
    KrausSet,
    apply_kraus,
    asymptotic_state,
    evolve_bloch,
    fidelity_law,
    fidelity_lower_bound,
    gad_kraus,
    initial_contraction_rate,
)
from qdeleter.errors import InvalidArgument, NumericalFailure, UnsupportedRegime
from qdeleter.oracle import (
    LindbladGenerator,
    Trajectory,
    compare_closed_form,
    integrate,
    integrate_many,
    lindblad_rhs,
    validate_cptp,
)
from qdeleter.qnd import (
    DephasingKernel,
    builtin_kernels,
    qnd_evolve_bloch,
    qnd_evolve_general,
    qnd_evolve_qubit,
    qubit_levels,
)
from qdeleter.state import (
    BlochVector,
    InitialAngles,
    bloch_length,
    bloch_to_density,
    density_to_bloch,
    fidelity_to_blank,
    pure_state_from_angles,
    purity,
    trace_distance,
)
