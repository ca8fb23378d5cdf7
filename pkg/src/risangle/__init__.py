"""Angle-dependent phase-shifter model for varactor RIS unit cells.

Equivalent-circuit reflection coefficients, phase-gradient deflection design,
reverse-incidence (angle-reciprocity) analysis and a far-field oracle.
"""
from risangle.array import (
    ColumnProfile,
    RisGeometry,
    array_response_in,
    array_response_out,
    reflect,
    wrap_phase,
)
from risangle.circuit import (
    CalibrationTable,
    CircuitParams,
    UnitCellModel,
    VaractorModel,
    capacitance_from_voltage,
    default_calibration,
    default_model,
    impedance,
    interpolate_params,
    reflection_coefficient,
    resonance_frequency,
)
from risangle.kernels import BACKEND
from risangle.pattern import FarFieldCut, far_field_cut, far_field_power, peak_angle
from risangle.reciprocity import (
    ReciprocityReport,
    first_order_reverse_angle,
    profile_phase_difference,
    reciprocity_scan,
    reverse_angle,
)
from risangle.steering import (
    DeflectionDesign,
    design_deflection,
    phase_to_capacitance,
    realize_profile,
    select_operating_frequency,
    tunable_phase_range,
)

__version__ = "0.1.0"
