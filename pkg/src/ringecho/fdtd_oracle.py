"""Brute-force ring-cavity simulator used as an independent oracle.

The loop is discretized into M cells of length dz = L/M and advanced with the
unit-CFL shift (v dt = dz), so free propagation is exact on the lattice and
the only approximations left are transient truncation and the intra-step
placement of the loss factor. The junction update per step is the 2x2 unitary

    b        = tau * c_L - rho * a_in
    c_first  = rho * c_L + tau * a_in

followed by the one-cell shift and a uniform amplitude factor
``exp(-Gamma * dt)`` modeling a distributed absorber.

Nothing here shares code with the analytic kernels; that is the point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core_response import JunctionCoupling, RingGeometry
from .echo_kernels import IncommensurateGrid, SampledSignal


@dataclass
class RingState:
    """Mutable state of the discretized loop (single-owner, step sequentially).

    ``cells[i]`` holds the field between z = i dz and (i+1) dz; index M-1 is
    the cell about to hit the junction. Energy counters are in per-sample
    units (|amplitude|^2 summed, no dt factor).
    """

    cells: np.ndarray
    coupling: JunctionCoupling
    loss_per_step: float = 1.0
    absorbed_energy: float = 0.0
    input_energy: float = 0.0
    output_energy: float = 0.0

    def __post_init__(self) -> None:
        c = np.asarray(self.cells, dtype=np.complex128)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("cells must be a 1-D array with at least 2 cells")
        if not 0.0 < self.loss_per_step <= 1.0:
            raise ValueError(
                f"loss_per_step must lie in (0, 1], got {self.loss_per_step}"
            )
        self.cells = c

    @classmethod
    def empty(
        cls, M: int, coupling: JunctionCoupling, loss_per_step: float = 1.0
    ) -> "RingState":
        return cls(np.zeros(M, dtype=np.complex128), coupling, loss_per_step)

    @property
    def stored_energy(self) -> float:
        return float(np.sum(np.abs(self.cells) ** 2))

    def step(self, a_in: complex) -> tuple[complex, complex]:
        """Advance one sample: returns (b_out, cavity field just past the junction).

        The output sample is exact on the lattice. The returned cavity probe
        is the state of the freshly injected cell at the end of the step,
        i.e. after the loss factor for this step has acted on it, so with
        loss it approximates the continuous field to first order in dt.
        """
        rho, tau = self.coupling.rho, self.coupling.tau
        c_last = self.cells[-1]
        b = tau * c_last - rho * a_in
        c_first = rho * c_last + tau * a_in
        self.cells[1:] = self.cells[:-1]
        self.cells[0] = c_first
        if self.loss_per_step != 1.0:
            self.absorbed_energy += (
                1.0 - self.loss_per_step**2
            ) * self.stored_energy
            self.cells *= self.loss_per_step
        self.input_energy += abs(a_in) ** 2
        self.output_energy += abs(b) ** 2
        return b, self.cells[0]


def run(
    signal: SampledSignal,
    j: JunctionCoupling,
    geometry: RingGeometry,
    M: int,
    Gamma: float = 0.0,
) -> tuple[SampledSignal, SampledSignal]:
    """Drive the discretized cavity with a sampled input.

    The input spacing must equal T/M (the caller resamples if needed).

    Returns
    -------
    (output, cavity_probe) : pair of SampledSignal
        The output channel and the intracavity field recorded just past the
        junction, both on the input grid.
    """
    T = geometry.round_trip
    dt = T / M
    if abs(signal.dt - dt) > 1e-9 * dt:
        raise IncommensurateGrid(
            f"input spacing {signal.dt} must equal T/M = {dt}"
        )
    if Gamma < 0.0:
        raise ValueError(f"Gamma must be non-negative, got {Gamma}")
    state = RingState.empty(M, j, float(np.exp(-Gamma * dt)))
    b_vals = np.empty(len(signal), dtype=np.complex128)
    c_vals = np.empty(len(signal), dtype=np.complex128)
    for i, a in enumerate(signal.values):
        b_vals[i], c_vals[i] = state.step(a)
    return (
        SampledSignal(signal.t0, dt, b_vals),
        SampledSignal(signal.t0, dt, c_vals),
    )


def dump_output_csv(path, signal: SampledSignal) -> None:
    """Debug helper: write (t, Re b, Im b) rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "re", "im"])
        for t, v in zip(signal.times, signal.values):
            writer.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
