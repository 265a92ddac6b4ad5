"""Control and probe waveforms of the storage sequence.

All times are absolute, in seconds; Rabi frequencies in rad/s.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from mottlight.core.exceptions import ParameterError

# Longest control transition still treated as a switch
MAX_SWITCH_TIME = 50e-9  # s


class SegmentKind(str, Enum):
    CONSTANT = "constant"
    RAMP = "ramp"
    SWITCH = "switch"


@dataclass(frozen=True)
class ControlSegment:
    """One piece of the coupling Rabi frequency Omega_c(t).

    Attributes:
        kind: constant, ramp or switch
        duration: segment length (s); switches may have zero duration
        start_value: Omega_c at the segment start (rad/s)
        end_value: Omega_c at the segment end (rad/s)
    """

    kind: SegmentKind
    duration: float
    start_value: float
    end_value: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SegmentKind(self.kind))
        if self.end_value is None:
            object.__setattr__(self, "end_value", self.start_value)
        if self.duration < 0 or not math.isfinite(self.duration):
            raise ParameterError(f"segment duration must be >= 0, got {self.duration}")
        if self.start_value < 0 or self.end_value < 0:
            raise ParameterError("control Rabi frequency must be >= 0")
        if self.kind is SegmentKind.CONSTANT and self.end_value != self.start_value:
            raise ParameterError("constant segment must keep its value")
        if self.kind is SegmentKind.SWITCH and self.duration > MAX_SWITCH_TIME:
            raise ParameterError(
                f"switch lasts {self.duration:.3g} s, limit is {MAX_SWITCH_TIME:.0e} s"
            )
        if self.kind is not SegmentKind.SWITCH and self.duration == 0:
            raise ParameterError(f"{self.kind.value} segment needs a positive duration")

    def value_at(self, elapsed: float) -> float:
        """Linear interpolation inside the segment (extrapolates at the edges)."""
        if self.duration == 0:
            return self.end_value
        fraction = elapsed / self.duration
        return self.start_value + fraction * (self.end_value - self.start_value)


@dataclass(frozen=True)
class ControlWaveform:
    """Piecewise-linear coupling Rabi frequency.

    Attributes:
        segments: consecutive segments
        t0: start time of the first segment (s)
    """

    segments: Tuple[ControlSegment, ...]
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ParameterError("control waveform needs at least one segment")

    @classmethod
    def constant(cls, omega_c: float, t0: float, t1: float) -> "ControlWaveform":
        return cls((ControlSegment(SegmentKind.CONSTANT, t1 - t0, omega_c),), t0)

    @classmethod
    def storage_sequence(
        cls,
        omega_c: float,
        t0: float,
        switch_off: float,
        dark_time: float,
        read_duration: float,
    ) -> "ControlWaveform":
        """Write with Omega_c, switch off instantly, wait, switch back on and read."""
        segments = [
            ControlSegment(SegmentKind.CONSTANT, switch_off - t0, omega_c),
            ControlSegment(SegmentKind.SWITCH, 0.0, omega_c, 0.0),
        ]
        if dark_time > 0:
            segments.append(ControlSegment(SegmentKind.CONSTANT, dark_time, 0.0))
        segments.append(ControlSegment(SegmentKind.SWITCH, 0.0, 0.0, omega_c))
        segments.append(ControlSegment(SegmentKind.CONSTANT, read_duration, omega_c))
        return cls(tuple(segments), t0)

    @property
    def t_end(self) -> float:
        return self.t0 + sum(s.duration for s in self.segments)

    def boundaries(self) -> List[Tuple[float, float, ControlSegment]]:
        """(start, end, segment) for every segment."""
        spans = []
        start = self.t0
        for segment in self.segments:
            spans.append((start, start + segment.duration, segment))
            start += segment.duration
        return spans

    def value(self, t: float) -> float:
        """Omega_c(t), right-continuous at segment boundaries."""
        if t < self.t0:
            return self.segments[0].start_value
        for start, end, segment in self.boundaries():
            if start <= t < end:
                return segment.value_at(t - start)
        return self.segments[-1].end_value

    def peak(self) -> float:
        return max(max(s.start_value, s.end_value) for s in self.segments)

    def switch_off_time(self) -> Optional[float]:
        """First time the control drops to zero after being on, if any."""
        was_on = False
        for start, end, segment in self.boundaries():
            if segment.start_value > 0:
                was_on = True
            if was_on and segment.end_value == 0:
                return end
        return None


@dataclass(frozen=True)
class ProbeWaveform:
    """Gaussian probe envelope, optionally cut off.

    The amplitude is exp(-2 ln2 (t - t_p)^2 / FWHM^2), so the intensity has
    the given FWHM.

    Attributes:
        peak_rabi: peak probe Rabi frequency (rad/s); scales energies only
        fwhm: intensity full width at half maximum (s)
        peak_time: time of the envelope maximum (s)
        truncation_time: probe switched off here; None keeps the full pulse
        lead: start of the envelope, in FWHMs before the peak
    """

    peak_rabi: float = 1.0
    fwhm: float = 2.8e-6
    peak_time: float = 0.0
    truncation_time: Optional[float] = 0.0
    lead: float = 2.5

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ParameterError(f"probe FWHM must be > 0, got {self.fwhm}")
        if self.peak_rabi < 0:
            raise ParameterError("probe Rabi frequency must be >= 0")
        if not self.lead > 0:
            raise ParameterError("probe lead must be > 0")
        if self.truncation_time is not None and self.truncation_time < self.start_time:
            raise ParameterError("probe truncated before it starts")

    @property
    def start_time(self) -> float:
        return self.peak_time - self.lead * self.fwhm

    @property
    def end_time(self) -> float:
        if self.truncation_time is not None:
            return self.truncation_time
        return self.peak_time + self.lead * self.fwhm

    def envelope(self, t):
        """Untruncated relative amplitude (1 at the peak)."""
        return math.exp(-2.0 * math.log(2.0) * ((t - self.peak_time) / self.fwhm) ** 2)

    def amplitude(self, t: float) -> float:
        """Relative amplitude, zero outside [start_time, end_time)."""
        if t < self.start_time or t >= self.end_time:
            return 0.0
        return self.envelope(t)
