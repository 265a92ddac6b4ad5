"""Sample geometry, density, optical depth and beam overlap."""

from mottlight.cloud.sample import (
    AtomCloud,
    BeamProfile,
    Polarization,
    atom_number,
    column_density,
    geometric_overlap,
    optical_depth_map,
    peak_intensity_from_power,
    peak_optical_depth,
    transverse_cells,
)

__all__ = [
    "AtomCloud",
    "BeamProfile",
    "Polarization",
    "atom_number",
    "column_density",
    "geometric_overlap",
    "optical_depth_map",
    "peak_intensity_from_power",
    "peak_optical_depth",
    "transverse_cells",
]
