"""Single-photon state vectors over labeled interferometer modes.

A state lives in one of two pictures.  In the *branch* picture the photon
is split over Alice's and Bob's paths, one amplitude per internal mode and
side (labels ``A1..Am`` and ``B1..Bm``).  After the recombining beam
splitter it is in the *port* picture, with one amplitude per output port
and mode (``E1..Em`` for the symmetric "equal" port, ``N1..Nm`` for the
antisymmetric "not equal" port).

Amplitudes are stored densely as a read-only ``(2, m)`` complex array.
States are immutable values; every operation returns a new state, so they
are safe to share across parallel Monte Carlo workers.  The picture is an
explicit tag and every operation checks it, so misuse fails loudly rather
than silently producing the wrong statistics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NormalizationError, StageMismatchError

NORM_TOL = 1e-12
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class Stage(enum.Enum):
    """Which picture a state lives in."""

    BRANCH = "branch"
    PORT = "port"


SIDES = {Stage.BRANCH: ("A", "B"), Stage.PORT: ("E", "N")}


class ModeLabel(NamedTuple):
    """One basis mode: picture, side within it, and 1-based mode index."""

    stage: Stage
    side: str
    index: int


class PortProbabilities(NamedTuple):
    """Measurement statistics in the port basis."""

    p_equal: float
    p_not_equal: float
    per_mode: tuple[tuple[ModeLabel, float], ...]


@dataclass(frozen=True, eq=False)
class ModeState:
    """Normalized single-particle amplitude vector over 2m labeled modes.

    ``amps[0]`` holds the first side of the stage (A or E), ``amps[1]``
    the second (B or N); column ``i`` is mode index ``i + 1``.  Compare
    states through their ``amps`` arrays; identity equality is deliberate
    (element-wise comparison of ndarray fields has no single truth value).
    """

    stage: Stage
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[0] != 2 or amps.shape[1] < 1:
            raise DimensionError(
                f"amplitudes must have shape (2, m) with m >= 1, "
                f"got {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise NormalizationError(
                f"state norm^2 = {norm_sq!r} is not 1 within {NORM_TOL}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def m(self) -> int:
        """Number of internal modes per side."""
        return self.amps.shape[1]

    def amplitude(self, side: str, index: int) -> complex:
        """Amplitude of the labeled mode (index is 1-based)."""
        row = _side_row(self.stage, side)
        if not 1 <= index <= self.m:
            raise DimensionError(
                f"mode index {index} outside 1..{self.m}"
            )
        return complex(self.amps[row, index - 1])

    def labels(self) -> list[ModeLabel]:
        """All 2m labels in storage order (first side, then second)."""
        first, second = SIDES[self.stage]
        return [ModeLabel(self.stage, s, i + 1)
                for s in (first, second) for i in range(self.m)]

    def as_dict(self) -> dict[ModeLabel, complex]:
        """Amplitudes keyed by label."""
        flat = self.amps.ravel()
        return {lab: complex(flat[i]) for i, lab in enumerate(self.labels())}

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def _side_row(stage: Stage, side: str) -> int:
    sides = SIDES[stage]
    if side not in sides:
        raise StageMismatchError(
            f"side {side!r} does not exist at stage {stage.value!r}; "
            f"expected one of {sides}"
        )
    return sides.index(side)


def _require_stage(state: ModeState, stage: Stage, op: str) -> None:
    if state.stage is not stage:
        raise StageMismatchError(
            f"{op} requires a {stage.value}-stage state, "
            f"got {state.stage.value}"
        )


def prepare_split(m: int) -> ModeState:
    """Photon split evenly over both branches and all m internal modes.

    Every branch amplitude is 1/sqrt(2m): the half/half beam split times a
    uniform superposition over the m modes of the pulse train.
    """
    if m < 1:
        raise DimensionError(f"mode count must be >= 1, got {m}")
    amps = np.full((2, m), 1.0 / np.sqrt(2.0 * m), dtype=np.complex128)
    return ModeState(Stage.BRANCH, amps)


def apply_phases(state: ModeState, side: str,
                 phases: Sequence[float]) -> ModeState:
    """Phase-modulate one branch: amplitude of mode i gains e^(i*phases[i]).

    The other branch is untouched and the norm is preserved exactly, so
    Alice's and Bob's encodings commute.
    """
    _require_stage(state, Stage.BRANCH, "apply_phases")
    row = _side_row(Stage.BRANCH, side)
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (state.m,):
        raise DimensionError(
            f"need exactly {state.m} phases, got shape {phases.shape}"
        )
    amps = state.amps.copy()
    amps[row] = amps[row] * np.exp(1j * phases)
    return ModeState(Stage.BRANCH, amps)


def recombine(state: ModeState) -> ModeState:
    """50/50 beam splitter taking the branch picture to the port picture.

    Mode by mode: E_i = (A_i + B_i)/sqrt(2), N_i = (A_i - B_i)/sqrt(2).
    The map is unitary, so the norm is preserved; equal branch amplitudes
    cancel exactly on the N side (bitwise-equal complex values subtract to
    exactly zero), which is what makes the equal-input case error-free.
    """
    _require_stage(state, Stage.BRANCH, "recombine")
    a, b = state.amps[0], state.amps[1]
    amps = np.empty_like(state.amps)
    amps[0] = (a + b) * _INV_SQRT2
    amps[1] = (a - b) * _INV_SQRT2
    return ModeState(Stage.PORT, amps)


def inverse_recombine(state: ModeState) -> ModeState:
    """Undo :func:`recombine`; the beam-splitter matrix is its own inverse."""
    _require_stage(state, Stage.PORT, "inverse_recombine")
    e, n = state.amps[0], state.amps[1]
    amps = np.empty_like(state.amps)
    amps[0] = (e + n) * _INV_SQRT2
    amps[1] = (e - n) * _INV_SQRT2
    return ModeState(Stage.BRANCH, amps)


def port_probabilities(state: ModeState) -> PortProbabilities:
    """Detection statistics in the port basis.

    Returns total probabilities for the E and N ports plus the per-mode
    breakdown in storage order (E1..Em, N1..Nm).
    """
    _require_stage(state, Stage.PORT, "port_probabilities")
    probs = np.abs(state.amps) ** 2
    per_mode = tuple(zip(state.labels(), (float(p) for p in probs.ravel())))
    return PortProbabilities(float(probs[0].sum()), float(probs[1].sum()),
                             per_mode)


def dump_amplitudes_csv(state: ModeState, dest) -> None:
    """Write amplitudes as CSV rows ``stage,side,index,re,im`` (debug aid).

    ``dest`` may be a path or an open text file.
    """
    own = isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__")
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        fh.write("stage,side,index,re,im\n")
        for (stage, side, index), amp in state.as_dict().items():
            fh.write(f"{stage.value},{side},{index},"
                     f"{amp.real!r},{amp.imag!r}\n")
    finally:
        if own:
            fh.close()


def load_amplitudes_csv(src) -> ModeState:
    """Read a state back from :func:`dump_amplitudes_csv` output."""
    own = isinstance(src, (str, bytes)) or hasattr(src, "__fspath__")
    fh = open(src, "r", encoding="utf-8") if own else src
    try:
        lines = [ln.strip() for ln in fh if ln.strip()]
    finally:
        if own:
            fh.close()
    if not lines or lines[0] != "stage,side,index,re,im":
        raise DimensionError("not an amplitude dump (bad header)")
    entries = []
    for ln in lines[1:]:
        stage_s, side, index_s, re_s, im_s = ln.split(",")
        entries.append((Stage(stage_s), side, int(index_s),
                        complex(float(re_s), float(im_s))))
    stage = entries[0][0]
    m = max(e[2] for e in entries)
    amps = np.zeros((2, m), dtype=np.complex128)
    for st, side, index, amp in entries:
        if st is not stage:
            raise DimensionError("dump mixes branch and port labels")
        amps[_side_row(stage, side), index - 1] = amp
    return ModeState(stage, amps)
