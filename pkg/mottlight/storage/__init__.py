"""Maxwell-Bloch light storage: propagation, storage, retrieval and decay."""

from mottlight.storage.maxwell_bloch import (
    FieldGrid,
    Integrator,
    MaxwellBlochSolver,
    StorageResult,
    propagate,
)
from mottlight.storage.sequence import (
    DEFAULT_SPIN_DECAY,
    RamseySeries,
    StorageScan,
    efficiency,
    scan_storage_times,
    simulate_ramsey,
    store_and_retrieve,
    to_normalized_time,
    to_seconds,
    with_overlap,
)
from mottlight.storage.waveforms import (
    ControlSegment,
    ControlWaveform,
    ProbeWaveform,
    SegmentKind,
)

__all__ = [
    "FieldGrid",
    "Integrator",
    "MaxwellBlochSolver",
    "StorageResult",
    "propagate",
    "DEFAULT_SPIN_DECAY",
    "RamseySeries",
    "StorageScan",
    "efficiency",
    "scan_storage_times",
    "simulate_ramsey",
    "store_and_retrieve",
    "to_normalized_time",
    "to_seconds",
    "with_overlap",
    "ControlSegment",
    "ControlWaveform",
    "ProbeWaveform",
    "SegmentKind",
]
