"""Exact two-level polarization algebra for prepare-and-measure schemes.

Everything in this module is closed-form quantum mechanics on pure linear
polarization states: no sampling, no iteration, no approximation beyond
double precision.  Orientations are polarizer angles in degrees, defined
modulo 180; conversion to radians happens only inside the trigonometric
evaluations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

# Pure double-precision arithmetic throughout, so identities hold to
# round-off and nothing looser is ever needed.
PROBABILITY_ATOL = 1e-12


def canonical_degrees(value: float) -> float:
    """Map an orientation in degrees to its representative in [0, 180).

    Idempotent, and invariant under adding any multiple of 180.
    """
    rem = float(value) % 180.0
    # x % 180.0 can round up to exactly 180.0 for tiny negative x.
    return 0.0 if rem >= 180.0 else rem


@dataclass(frozen=True)
class Angle:
    """Polarizer orientation in degrees, stored canonically in [0, 180)."""

    degrees: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.degrees):
            raise ValueError(f"orientation must be finite, got {self.degrees!r}")
        object.__setattr__(self, "degrees", canonical_degrees(self.degrees))

    @property
    def radians(self) -> float:
        return math.radians(self.degrees)


class Outcome(IntEnum):
    """Eigenvalue of a dichotomic polarization property."""

    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class PropertySetting:
    """Dichotomic observable whose +1 eigenstate lies along ``orientation``.

    The -1 eigenstate lies along the orthogonal direction, 90 degrees away.
    """

    orientation: Angle

    @classmethod
    def at(cls, degrees: float) -> "PropertySetting":
        return cls(Angle(degrees))


@dataclass(frozen=True)
class PureState:
    """Normalized polarization state ``amp_h |H> + amp_v |V>``.

    Amplitudes may be complex, although every state built by
    :func:`eigenstate` is real (linear polarization only).
    """

    amp_h: complex
    amp_v: complex

    def __post_init__(self) -> None:
        norm = abs(self.amp_h) ** 2 + abs(self.amp_v) ** 2
        if abs(norm - 1.0) > PROBABILITY_ATOL:
            raise ValueError(f"state must be normalized, got |amp|^2 = {norm!r}")


#: Horizontal and vertical basis states.
H = PureState(1.0, 0.0)
V = PureState(0.0, 1.0)

#: A projective filter event: which property, and which of its two outcomes.
Projection = tuple[PropertySetting, Outcome]


def eigenstate(prop: PropertySetting, outcome: Outcome) -> PureState:
    """Eigenstate of a linear-polarization property for the given outcome.

    For orientation theta the +1 eigenstate is (cos theta, sin theta) and
    the -1 eigenstate is (sin theta, -cos theta); the two are orthogonal.
    """
    theta = prop.orientation.radians
    if outcome is Outcome.PLUS:
        return PureState(math.cos(theta), math.sin(theta))
    return PureState(math.sin(theta), -math.cos(theta))


def transition_probability(s1: PureState, s2: PureState) -> float:
    """Born probability |<s1|s2>|^2, symmetric in its arguments."""
    overlap = (
        complex(s1.amp_h).conjugate() * complex(s2.amp_h)
        + complex(s1.amp_v).conjugate() * complex(s2.amp_v)
    )
    return overlap.real**2 + overlap.imag**2


def conditional_probability(meas: Projection, prep: Projection) -> float:
    """Probability of the measurement outcome given the prepared eigenstate.

    For measuring minus at theta_m on a plus preparation at theta_p this
    equals sin^2(theta_m - theta_p).
    """
    return transition_probability(eigenstate(*meas), eigenstate(*prep))


def marginal_probability(initial: PureState, prep: Projection) -> float:
    """Probability that ``initial`` passes the preparation projector.

    The conventional choice of input state is :data:`H`, for which a plus
    preparation at theta_p passes with probability cos^2(theta_p).
    """
    return transition_probability(eigenstate(*prep), initial)


def joint_probability(initial: PureState, first: Projection, second: Projection) -> float:
    """Probability of preparing ``first`` and then measuring ``second``.

    Chain rule for the two sequential projections: marginal of the
    preparation times the conditional of the measurement given it.  The
    stage order matters; swapping ``first`` and ``second`` generally
    changes the value.
    """
    return marginal_probability(initial, first) * conditional_probability(second, first)
