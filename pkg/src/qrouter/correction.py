"""Noisy-channel and error-correction building blocks, plus their closed-form
success analytics.

The channel couples a system qubit to a fresh environment qubit through the
tunable two-qubit unitary ``UG(gamma)`` and post-selects the environment on
|0>; the survivor is (alpha|0> + beta*sqrt(1-gamma)|1>)/N1 with branch
probability p1 = N1^2 = |alpha|^2 + |beta|^2 (1-gamma).

Correction rotates a fresh ancilla by H_theta, entangles it with the system
via CX, and post-selects the ancilla on |0>; choosing
theta = arctan(1/sqrt(1-gamma_guess)) undoes the damping exactly when the
guess matches the true gamma. Only the guess ever reaches the correction
path: ``correction_subcircuit`` takes theta alone, so the true gamma cannot
leak into it by construction.
"""

from dataclasses import dataclass
from math import atan, cos, pi, sin, sqrt

import numpy as np

from .circuit import Gate, PostSelect
from .constants import ATOL_EXACT
from .errors import BuildError, DegenerateParameterError
from .gates import GateKind


@dataclass(frozen=True)
class ChannelParams:
    gamma: float
    gamma_guess: float = 0.5

    def __post_init__(self):
        for name in ("gamma", "gamma_guess"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class QubitSpec:
    """Amplitudes of a transmitted qubit alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1.0) >= ATOL_EXACT:
            raise ValueError("|alpha|^2 + |beta|^2 must equal 1")

    def vector(self):
        return np.array([self.alpha, self.beta], dtype=complex)


@dataclass(frozen=True)
class CorrectionAngle:
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta <= pi / 2:
            raise ValueError(f"theta must lie in (0, pi/2], got {self.theta}")


def choose_theta(gamma_guess):
    """theta = arctan(1/sqrt(1 - gamma_guess)); undefined at gamma_guess = 1."""
    if not 0.0 <= gamma_guess <= 1.0:
        raise ValueError(f"gamma_guess must lie in [0, 1], got {gamma_guess}")
    if gamma_guess == 1.0:
        raise DegenerateParameterError(
            "gamma_guess = 1 drives theta to pi/2, which zeroes the |0> amplitude"
        )
    return CorrectionAngle(atan(1.0 / sqrt(1.0 - gamma_guess)))


def channel_subcircuit(gamma, system, environment):
    """Ops realizing the post-selected noisy channel on (system, environment)."""
    if system == environment:
        raise BuildError("system and environment must be distinct qubits")
    return (
        Gate(GateKind.UG, (system, environment), (gamma,)),
        PostSelect(environment, 0),
    )


def correction_subcircuit(theta, system, ancilla):
    """Ops realizing the post-selected correction on (system, ancilla)."""
    if system == ancilla:
        raise BuildError("system and ancilla must be distinct qubits")
    th = theta.theta if isinstance(theta, CorrectionAngle) else float(theta)
    return (
        Gate(GateKind.H_THETA, (ancilla,), (th,)),
        Gate(GateKind.CX, (system, ancilla)),
        PostSelect(ancilla, 0),
    )


def analytic_p1(q, gamma):
    """Channel survival probability |alpha|^2 + |beta|^2 (1-gamma)."""
    return abs(q.alpha) ** 2 + abs(q.beta) ** 2 * (1.0 - gamma)


def analytic_p2(q, gamma, theta):
    """Correction survival probability, conditioned on channel survival."""
    th = theta.theta if isinstance(theta, CorrectionAngle) else float(theta)
    p1 = analytic_p1(q, gamma)
    if p1 <= 0.0:
        raise DegenerateParameterError("channel survival probability is zero")
    num = abs(q.alpha * cos(th)) ** 2 + abs(q.beta * sin(th)) ** 2 * (1.0 - gamma)
    return num / p1


def corrected_state(q, gamma, theta):
    """Normalized system state after channel + correction (closed form)."""
    th = theta.theta if isinstance(theta, CorrectionAngle) else float(theta)
    v = np.array(
        [q.alpha * cos(th), q.beta * sqrt(1.0 - gamma) * sin(th)], dtype=complex
    )
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise DegenerateParameterError("corrected state has vanishing norm")
    return v / norm


def overall_success(q_control, q_signal, gamma, gamma_guess):
    """Probability that every correction post-selection succeeds.

    Product of per-qubit p2 values; equals p2^2 for the equal-magnitude
    inputs used throughout, and the channel stage's own survival (p1 per
    noisy qubit) is accounted separately.
    """
    theta = choose_theta(gamma_guess)
    return analytic_p2(q_control, gamma, theta) * analytic_p2(q_signal, gamma, theta)
