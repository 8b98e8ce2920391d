"""Joint spectral amplitudes of cascade-emitted photon pairs.

All frequencies, rates, and shifts are expressed in units of the natural
linewidth gamma; pulse durations in units of 1/gamma.  A single conversion
constant (gamma / 2 pi = 6 MHz) is provided for translating results to
laboratory units at the I/O boundary; nothing inside this package depends
on it.

The single-pair amplitude is a Gaussian ridge along the energy-conservation
axis omega_s + omega_i, set by the drive pulses, multiplied by a Lorentzian
in the idler detuning with half-width gamma3n / 2 set by the collectively
broadened decay.  Multiplexed spectra are weighted sums of frequency-shifted
copies of that amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnderResolvedGrid

# gamma / (2 pi) in MHz; used only when converting outputs to lab units.
GAMMA_2PI_MHZ = 6.0


def angular_to_mhz(x):
    """Convert angular frequencies in units of gamma to ordinary MHz."""
    return np.asarray(x, dtype=float) * GAMMA_2PI_MHZ


def mhz_to_angular(x):
    return np.asarray(x, dtype=float) / GAMMA_2PI_MHZ


@dataclass(frozen=True)
class PhysicalParams:
    """Source constants defining the pair amplitude.

    gamma          natural linewidth (the frequency unit; keep at 1.0)
    gamma3n        collectively broadened decay rate of the idler transition
    tau            drive pulse duration (1/e half-width of the field envelope)
    delta1         single-photon detuning of the first drive
    delta2         two-photon detuning of the second drive
    omega_a_tilde  pulse area of drive a (dimensionless)
    omega_b_tilde  pulse area of drive b (dimensionless)
    coupling_prefactor  combined emission couplings and collective phase
                   sum, folded into one complex overall scale (default 1;
                   it cancels in every contrast metric)
    """

    gamma: float = 1.0
    gamma3n: float = 5.0
    tau: float = 0.5
    delta1: float = 50.0
    delta2: float = 50.0
    omega_a_tilde: float = 1.0
    omega_b_tilde: float = 1.0
    coupling_prefactor: complex = 1.0

    def __post_init__(self):
        if self.gamma <= 0 or self.gamma3n <= 0 or self.tau <= 0:
            raise ValueError("gamma, gamma3n, tau must all be positive")

    @property
    def half_linewidth(self) -> float:
        """Lorentzian half-width gamma3n / 2."""
        return 0.5 * self.gamma3n


@dataclass(frozen=True)
class PairShift:
    """One multiplexed component: complex weight and its frequency shifts.

    delta_p shifts the idler resonance; delta_q shifts the joint
    (sum-frequency) Gaussian ridge.  The component peaks at
    domega_i = delta_p on the line domega_s + domega_i = -delta_q.
    """

    weight: complex = 1.0
    delta_p: float = 0.0
    delta_q: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.weight) and np.isfinite(self.delta_p)
                and np.isfinite(self.delta_q)):
            raise ValueError("pair shift fields must be finite")

    @property
    def signal_center(self) -> float:
        """Signal detuning at which |f_n| peaks."""
        return -(self.delta_p + self.delta_q)


@dataclass(frozen=True)
class MultiplexedSpectrum:
    params: PhysicalParams
    pairs: tuple = ()

    def __post_init__(self):
        if len(self.pairs) < 1:
            raise ValueError("need at least one pair")
        object.__setattr__(self, "pairs", tuple(self.pairs))

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @staticmethod
    def comb(n_pairs, delta, params, weights=None, delta_q=0.0):
        """Pairs evenly spread along the energy-conservation axis.

        Idler shifts are (n - (n_pairs+1)/2) * delta, so four pairs sit at
        (-1.5, -0.5, 0.5, 1.5) * delta; all share the joint shift delta_q
        (default 0, i.e. centered on the uncoded ridge).
        """
        if weights is None:
            weights = np.ones(n_pairs, dtype=complex)
        if len(weights) != n_pairs:
            raise ValueError("weights length must equal n_pairs")
        centers = (np.arange(1, n_pairs + 1) - 0.5 * (n_pairs + 1)) * delta
        pairs = tuple(PairShift(weight=complex(w), delta_p=float(dp), delta_q=float(delta_q))
                      for w, dp in zip(weights, centers))
        return MultiplexedSpectrum(params=params, pairs=pairs)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid omega in [min, max] with the given number of points."""

    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("grid needs at least two points")
        if not self.min < self.max:
            raise ValueError("grid min must be below max")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.points - 1)

    @property
    def omegas(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.points, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def covers(self, lo: float, hi: float) -> bool:
        return self.min <= lo and self.max >= hi

    @staticmethod
    def centered(half_width: float, points: int, center: float = 0.0):
        return FrequencyGrid(center - half_width, center + half_width, points)


def gaussian_envelope(params: PhysicalParams, sum_detuning, delta_q=0.0):
    """Joint Gaussian ridge exp(-(domega_s + domega_i + delta_q)^2 tau^2 / 8).

    Depends on the two detunings only through their sum.
    """
    s = np.asarray(sum_detuning, dtype=complex) + delta_q
    return np.exp(-(s * params.tau) ** 2 / 8.0)


def lorentzian_factor(params: PhysicalParams, domega_i, delta_p=0.0):
    """Idler resonance 1 / (gamma3n/2 - i(domega_i - delta_p))."""
    u = np.asarray(domega_i, dtype=float) - delta_p
    return 1.0 / (params.half_linewidth - 1j * u)


def jsa_single(params: PhysicalParams, domega_s, domega_i):
    """Single-pair joint spectral amplitude.

    coupling_prefactor * exp(-(ds+di)^2 tau^2/8) / (gamma3n/2 - i di).
    At gamma3n = 5, tau = 0.5 the on-resonance value is 0.4 (real).
    """
    ds = np.asarray(domega_s, dtype=float)
    di = np.asarray(domega_i, dtype=float)
    out = gaussian_envelope(params, ds + di) * lorentzian_factor(params, di)
    return params.coupling_prefactor * out


def jsa_multiplexed(spec: MultiplexedSpectrum, domega_s, domega_i):
    """Weighted sum of shifted single-pair amplitudes.

    sum_n H_n exp(-(ds+di+delta_qn)^2 tau^2/8) / (gamma3n/2 - i(di - delta_pn)).
    Reduces to jsa_single for one unshifted unit-weight pair.
    """
    p = spec.params
    ds = np.asarray(domega_s, dtype=float)
    di = np.asarray(domega_i, dtype=float)
    out = np.zeros(np.broadcast(ds, di).shape, dtype=complex)
    for pair in spec.pairs:
        out += pair.weight * gaussian_envelope(p, ds + di, pair.delta_q) \
            * lorentzian_factor(p, di, pair.delta_p)
    return p.coupling_prefactor * out


def _require_resolution(grid: FrequencyGrid, params: PhysicalParams):
    # Eight samples per 1/tau keeps Gaussian quadrature error far below
    # the documented mode-norm tolerances.
    limit = (1.0 / params.tau) / 8.0
    if grid.spacing > limit:
        raise UnderResolvedGrid(
            f"grid spacing {grid.spacing:.4g} exceeds (1/tau)/8 = {limit:.4g}")


def marginal_signal_mode(pair: PairShift, params: PhysicalParams,
                         grid: FrequencyGrid):
    """Gaussian signal profile of one pair, unit-normalized on the grid.

    The unnormalized profile is -exp(-(ds + delta_p + delta_q
    + i*gamma3n/2)^2 tau^2 / 8): a Gaussian centered at the pair's signal
    frequency carrying a linear chirp and an overall amplitude boost
    exp((gamma3n tau)^2 / 16) from the complex shift.  Returns (samples,
    n_s) with n_s the quadrature L2 norm that was divided out.
    """
    _require_resolution(grid, params)
    shift = pair.delta_p + pair.delta_q + 1j * params.half_linewidth
    raw = -np.exp(-((grid.omegas + shift) * params.tau) ** 2 / 8.0)
    n_s = np.sqrt(np.sum(grid.weights * np.abs(raw) ** 2))
    return raw / n_s, float(n_s)


def marginal_idler_mode(pair: PairShift, params: PhysicalParams,
                        grid: FrequencyGrid):
    """Lorentzian idler profile of one pair, unit-normalized on the grid.

    Requires the grid to span at least +-20 gamma3n around delta_p; the
    slowly decaying tails otherwise bias the norm at the percent level.
    """
    _require_resolution(grid, params)
    span = 20.0 * params.gamma3n
    if not grid.covers(pair.delta_p - span, pair.delta_p + span):
        raise UnderResolvedGrid(
            "idler grid must span +-20*gamma3n around delta_p "
            f"(need [{pair.delta_p - span:.4g}, {pair.delta_p + span:.4g}], "
            f"have [{grid.min:.4g}, {grid.max:.4g}])")
    raw = lorentzian_factor(params, grid.omegas, pair.delta_p)
    n_i = np.sqrt(np.sum(grid.weights * np.abs(raw) ** 2))
    return raw / n_i, float(n_i)
