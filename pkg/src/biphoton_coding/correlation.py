"""Second-order correlation g2(0) for coded multiplexed pair spectra.

Two computation paths are provided.  The ideal path evaluates the
closed-form expression valid for well-separated pairs: g2 is proportional
to |sum_n H^d_n H^e_n|^2, so the whole encode/decode matrix is a Gram
matrix of the codebook.  The numeric path models the coding operations as
they act in frequency space: encode and decode weights are painted onto
hard frequency bins of width delta (signal axis for encoding, idler axis
for decoding; everything outside the bin union is discarded by the
demultiplexer), the masked mode pairs are convolved onto the
sum-frequency axis, and |F(omega)|^2 is integrated under a Gaussian
acceptance gate a few pump bandwidths wide around each channel's
energy-conservation line.  Neighboring-pair overlap and finite-bin
leakage enter only through the numeric path; the two paths agree when
bins are wide compared with both the Gaussian mode width and the
Lorentzian linewidth.

The numeric path fixes its overall scale against the all-ones-weights
reference cell of the same spectrum and bins, so the uncoded value
matches the closed form 2 sqrt(pi) N / (N_s^2 N_i^2 tau) and both paths
share units.  All contrast metrics are insensitive to this calibration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codes import CodeMatrix, gram
from .errors import (BinOverlap, ChannelShapeMismatch, DegenerateMatrix,
                     UnderResolvedGrid)
from .spectra import (FrequencyGrid, MultiplexedSpectrum, PhysicalParams,
                      lorentzian_factor, marginal_idler_mode,
                      marginal_signal_mode)


def matched_decode(codeword) -> np.ndarray:
    """Decode vector matched to a codeword: entrywise complex conjugate.

    This is the single place fixing the matched-decoding convention; with
    it the matched inner sum is sum |c|^2, real and maximal.
    """
    return np.conj(np.asarray(codeword, dtype=complex))


@dataclass(frozen=True)
class BinnedDecode:
    """Factorized decoder weights on integer signal/idler bins.

    Bin j is centered at j * bin_spacing with width bin_spacing; bins
    absent from a map get weight 0 (blocked).
    """

    signal_weights: dict
    idler_weights: dict
    bin_spacing: float


@dataclass(frozen=True)
class CodingAssignment:
    """Per-pair encode/decode weights, plus optional factorized decoding.

    encode/decode of None mean all-ones (uncoded / all-pass).  When
    channel_map is set (a BinnedDecode), the per-pair decode vector is
    ignored and the masks come from the factorized bin weights instead.
    """

    encode: np.ndarray | None = None
    decode: np.ndarray | None = None
    channel_map: BinnedDecode | None = None


@dataclass(frozen=True)
class G2Matrix:
    """Nonnegative correlation values indexed (encode index, decode index)."""

    values: np.ndarray
    kind: str = "ideal"

    @property
    def dimension(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ContrastReport:
    v: float
    c_od: float
    g2_max: float
    g2_min: float
    g2_od: float
    c_non: float | None = None

    def as_dict(self) -> dict:
        d = {"v": self.v, "c_od": self.c_od, "g2_max": self.g2_max,
             "g2_min": self.g2_min, "g2_od": self.g2_od}
        if self.c_non is not None:
            d["c_non"] = self.c_non
        return d


def g2_prefactor(n_s: float, n_i: float, tau: float) -> float:
    """Uncoded single-pair g2(0): 2 sqrt(pi) / (N_s^2 N_i^2 tau)."""
    return 2.0 * math.sqrt(math.pi) / (n_s ** 2 * n_i ** 2 * tau)


# ---------------------------------------------------------------------------
# convolution and sum-frequency amplitudes
# ---------------------------------------------------------------------------

def _matched_spacing(grid_s: FrequencyGrid, grid_i: FrequencyGrid) -> float:
    ds, di = grid_s.spacing, grid_i.spacing
    if abs(ds - di) > 1e-9 * ds:
        raise UnderResolvedGrid(
            f"signal/idler grids need equal spacing for convolution "
            f"({ds:.6g} vs {di:.6g})")
    return ds


def convolution_grid(grid_s: FrequencyGrid, grid_i: FrequencyGrid) -> FrequencyGrid:
    """Sum-frequency axis carrying the discrete convolution output."""
    _matched_spacing(grid_s, grid_i)
    return FrequencyGrid(grid_s.min + grid_i.min, grid_s.max + grid_i.max,
                         grid_s.points + grid_i.points - 1)


def convolution(signal_mode, idler_mode, spacing: float) -> np.ndarray:
    """Discrete quadrature convolution (psi * phi)(omega) on the sum axis."""
    return spacing * np.convolve(np.asarray(signal_mode, dtype=complex),
                                 np.asarray(idler_mode, dtype=complex))


def sum_frequency_amplitude(samples, grid_s: FrequencyGrid,
                            grid_i: FrequencyGrid) -> np.ndarray:
    """Anti-diagonal quadrature F(omega) = int f(w, omega - w) dw of a
    sampled joint amplitude, on convolution_grid(grid_s, grid_i)."""
    f = np.asarray(samples, dtype=complex)
    if f.shape != (grid_s.points, grid_i.points):
        raise ValueError("sample matrix shape does not match the grids")
    spacing = _matched_spacing(grid_s, grid_i)
    out = np.zeros(grid_s.points + grid_i.points - 1, dtype=complex)
    for j in range(grid_s.points):
        out[j:j + grid_i.points] += f[j, :]
    return spacing * out


def pair_correlation_kernel(pair, params: PhysicalParams,
                            grid_s: FrequencyGrid, grid_i: FrequencyGrid):
    """Joint correlation kernel of one pair on the sum-frequency axis.

    Integrates the pair amplitude along anti-diagonals and divides by the
    idler line integral and by the marginal norms N_s N_i.  Because the
    Gaussian ridge is constant along each anti-diagonal, the result is
    (1 / (N_s N_i)) exp(-(omega + delta_q)^2 tau^2 / 8) up to the slow
    omega-dependence of the truncated Lorentzian line integral; wide grids
    push that residual well below one percent.

    Returns (grid_out, kernel).
    """
    spacing = _matched_spacing(grid_s, grid_i)
    _, n_s = marginal_signal_mode(pair, params, grid_s)
    _, n_i = marginal_idler_mode(pair, params, grid_i)

    gauss = np.exp(-((grid_s.omegas[:, None] + grid_i.omegas[None, :]
                      + pair.delta_q) * params.tau) ** 2 / 8.0)
    lor = lorentzian_factor(params, grid_i.omegas, pair.delta_p)
    f = pair.weight * gauss * lor[None, :]

    line_integral = spacing * np.sum(lor)
    kernel = sum_frequency_amplitude(f, grid_s, grid_i) / (n_s * n_i * line_integral)
    return convolution_grid(grid_s, grid_i), kernel


# ---------------------------------------------------------------------------
# ideal (closed-form) path
# ---------------------------------------------------------------------------

def g2_ideal_single(assign: CodingAssignment, n_pairs: int,
                    prefactor: float = 1.0, lambdas=None) -> float:
    """Closed-form g2 for one channel of well-separated pairs.

    prefactor * |sum_n sqrt(lambda_n) H^d_n H^e_n|^2 with uniform
    lambda_n = 1/n_pairs unless an explicit spectrum is given.
    """
    enc = np.ones(n_pairs, complex) if assign.encode is None \
        else np.asarray(assign.encode, dtype=complex)
    dec = np.ones(n_pairs, complex) if assign.decode is None \
        else np.asarray(assign.decode, dtype=complex)
    if len(enc) != n_pairs or len(dec) != n_pairs:
        raise ChannelShapeMismatch("encode/decode length must equal n_pairs")
    lam = np.full(n_pairs, 1.0 / n_pairs) if lambdas is None \
        else np.asarray(lambdas, dtype=float)
    return float(prefactor * np.abs(np.sum(np.sqrt(lam) * dec * enc)) ** 2)


def g2_matrix_ideal(code: CodeMatrix, prefactor: float = 1.0) -> G2Matrix:
    """Ideal N x N correlation matrix over (encode column, decode column).

    Entry (i, j) uses codeword i for encoding and the matched decode of
    codeword j, giving prefactor/N * |<col_j, col_i>|^2.
    """
    g = gram(code)
    values = prefactor / code.n * np.abs(g.conj().T) ** 2
    return G2Matrix(values=values.real, kind="ideal")


def _lambda_norm(r: int, m: int, normalization: str) -> float:
    # 'global' spreads unit total weight over all R*M pairs; 'per_channel'
    # keeps the printed 1/M factor.  The two differ by 1/R overall.
    if normalization == "global":
        return 1.0 / (r * m)
    if normalization == "per_channel":
        return 1.0 / m
    raise ValueError(f"unknown normalization {normalization!r}")


def g2_ideal_multi(encodes, decodes, prefactor: float = 1.0,
                   normalization: str = "global") -> float:
    """Closed-form g2 for R channels of M pairs each.

    encodes and decodes are (R, M) arrays of per-channel weights; the
    value is prefactor * lam * sum_r |sum_m H^e_rm H^d_rm|^2 with lam the
    chosen pair-weight normalization.
    """
    enc = np.asarray(encodes, dtype=complex)
    dec = np.asarray(decodes, dtype=complex)
    if enc.ndim != 2 or enc.shape != dec.shape:
        raise ChannelShapeMismatch(
            f"encode/decode shapes differ: {enc.shape} vs {dec.shape}")
    r, m = enc.shape
    lam = _lambda_norm(r, m, normalization)
    per_channel = np.abs(np.sum(enc * dec, axis=1)) ** 2
    return float(prefactor * lam * np.sum(per_channel))


def codeword_digits(index: int, r: int, m: int) -> tuple:
    """Mixed-radix decomposition of a code-space index into per-channel
    codeword choices (channel 1 most significant), all 0-based."""
    digits = []
    for _ in range(r):
        index, d = divmod(index, m)
        digits.append(d)
    return tuple(reversed(digits))


def g2_matrix_ideal_multi(code: CodeMatrix, r_channels: int,
                          prefactor: float = 1.0,
                          normalization: str = "global") -> G2Matrix:
    """Ideal correlation matrix over the full M^R code space.

    Every channel draws from the same order-M codebook; index digits give
    the per-channel choices (see codeword_digits).
    """
    m = code.n
    d = m ** r_channels
    p = np.abs(gram(code)) ** 2   # p[j, i] = |<col_j, col_i>|^2
    digits = np.array([codeword_digits(k, r_channels, m) for k in range(d)])
    lam = _lambda_norm(r_channels, m, normalization)
    values = np.zeros((d, d))
    for r in range(r_channels):
        enc_d = digits[:, r][:, None]
        dec_d = digits[:, r][None, :]
        values += p[dec_d, enc_d]
    return G2Matrix(values=prefactor * lam * values, kind="ideal")


@dataclass(frozen=True)
class LevelClass:
    matched_channels: int
    value: float
    multiplicity: int


def level_summary(code: CodeMatrix, r_channels: int, prefactor: float = 1.0,
                  normalization: str = "global") -> list:
    """Distinct correlation levels of the M^R code space, grouped by the
    number of matched channels, without enumerating all M^R x M^R cells.

    The per-channel value distribution is convolved R times; multiplicity
    bookkeeping is exact integer arithmetic.
    """
    m = code.n
    p = np.abs(gram(code)) ** 2
    base = {}
    for i in range(m):
        for j in range(m):
            key = (1 if i == j else 0, float(f"{p[j, i]:.12g}"))
            base[key] = base.get(key, 0) + 1

    acc = {(0, 0.0): 1}
    for _ in range(r_channels):
        nxt = {}
        for (k1, v1), c1 in acc.items():
            for (k2, v2), c2 in base.items():
                key = (k1 + k2, float(f"{v1 + v2:.12g}"))
                nxt[key] = nxt.get(key, 0) + c1 * c2
        acc = nxt

    lam = _lambda_norm(r_channels, m, normalization)
    out = [LevelClass(matched_channels=k, value=prefactor * lam * v,
                      multiplicity=c)
           for (k, v), c in acc.items()]
    out.sort(key=lambda lc: (-lc.matched_channels, -lc.value))
    return out


# ---------------------------------------------------------------------------
# contrast metrics
# ---------------------------------------------------------------------------

def _matched_count(i: int, j: int, r: int, m: int) -> int:
    di = codeword_digits(i, r, m)
    dj = codeword_digits(j, r, m)
    return sum(1 for a, b in zip(di, dj) if a == b)


def contrasts(matrix: G2Matrix, r_channels: int = 1,
              pairs_per_channel: int | None = None) -> ContrastReport:
    """Visibility and contrast metrics of a correlation matrix.

    V uses the global max/min; C_od compares the matched maximum against
    the largest entry with at least one mismatched channel.  For
    r_channels > 1 (pairs_per_channel required), C_non compares the fully
    matched level against the lowest level of the (R-1)-matched class.
    """
    v = matrix.values
    g_max = float(v.max())
    g_min = float(v.min())
    if g_max == g_min:
        raise DegenerateMatrix("all correlation entries are equal")
    off = ~np.eye(v.shape[0], dtype=bool)
    g_od = float(v[off].max())
    report = dict(
        v=(g_max - g_min) / (g_max + g_min),
        c_od=(g_max - g_od) / (g_max + g_od),
        g2_max=g_max, g2_min=g_min, g2_od=g_od, c_non=None)

    if r_channels > 1:
        if pairs_per_channel is None:
            raise ValueError("pairs_per_channel required when r_channels > 1")
        best, worst = None, None
        n = v.shape[0]
        for i in range(n):
            for j in range(n):
                k = _matched_count(i, j, r_channels, pairs_per_channel)
                if k == r_channels - 1:
                    worst = v[i, j] if worst is None else min(worst, v[i, j])
                elif k == r_channels:
                    best = v[i, j] if best is None else max(best, v[i, j])
        report["c_non"] = (best - worst) / (best + worst)
    return ContrastReport(**report)


def contrasts_from_levels(levels, r_channels: int) -> ContrastReport:
    """Contrast metrics computed from a level_summary table."""
    values = [lc.value for lc in levels]
    g_max, g_min = max(values), min(values)
    if g_max == g_min:
        raise DegenerateMatrix("all correlation entries are equal")
    g_od = max(lc.value for lc in levels
               if lc.matched_channels < r_channels)
    c_non = None
    if r_channels > 1:
        best = max(lc.value for lc in levels
                   if lc.matched_channels == r_channels)
        worst = min(lc.value for lc in levels
                    if lc.matched_channels == r_channels - 1)
        c_non = (best - worst) / (best + worst)
    return ContrastReport(
        v=(g_max - g_min) / (g_max + g_min),
        c_od=(g_max - g_od) / (g_max + g_od),
        g2_max=g_max, g2_min=g_min, g2_od=g_od, c_non=c_non)


# ---------------------------------------------------------------------------
# numeric path
# ---------------------------------------------------------------------------

def coding_bin_mask(centers, weights, bin_width: float,
                    grid: FrequencyGrid) -> np.ndarray:
    """Piecewise-constant coding mask: one hard bin of width bin_width per
    center, zero outside the bin union (nothing passes out of band).

    A grid sample landing on a shared bin edge takes the average of the
    adjacent weights, which keeps masks mirror-symmetric on symmetric
    grids whose spacing divides bin_width/2.
    """
    centers = np.asarray(centers, dtype=float)
    w = np.asarray(weights, dtype=complex)
    order = np.argsort(centers)
    gaps = np.diff(centers[order])
    if gaps.size and gaps.min() < bin_width * (1.0 - 1e-9):
        raise BinOverlap(
            f"coding bins of width {bin_width:.4g} overlap at center "
            f"spacing {gaps.min():.4g}")
    mask = np.zeros(grid.points, dtype=complex)
    half = bin_width / 2.0
    eps = 0.25 * grid.spacing
    for c, wt in zip(centers, w):
        inside = (grid.omegas > c - half + eps) & (grid.omegas < c + half - eps)
        mask[inside] += wt
        for edge in (c - half, c + half):
            mask[np.abs(grid.omegas - edge) <= eps] += 0.5 * wt
    return mask


def _binned_mask(weights: dict, spacing: float, grid: FrequencyGrid) -> np.ndarray:
    ks = sorted(weights)
    return coding_bin_mask([k * spacing for k in ks],
                           [weights[k] for k in ks], spacing, grid)


def acceptance_gate(grid_out: FrequencyGrid, spec: MultiplexedSpectrum,
                    scale: float = 3.0) -> np.ndarray:
    """Gaussian sum-frequency intensity gate about each channel ridge.

    A channel with joint shift delta_q emits its coincidences along the
    energy-conservation ridge omega = -delta_q, with envelope width set
    by the pump bandwidth 2/tau.  The gate accepts `scale` pump
    bandwidths around every ridge: max_r exp(-((omega + delta_r) tau
    / (2 scale))^2).  Pass math.inf to accept the full axis.
    """
    if not scale > 0:
        raise ValueError("acceptance scale must be positive")
    if math.isinf(scale):
        return np.ones(grid_out.points)
    tau = spec.params.tau
    acc = np.zeros(grid_out.points)
    for dq in sorted({p.delta_q for p in spec.pairs}):
        x = (grid_out.omegas + dq) * tau / (2.0 * scale)
        np.maximum(acc, np.exp(-x * x), out=acc)
    return acc


def _coded_numerator(spec: MultiplexedSpectrum, encode, mask_s, mask_i,
                     grid_s: FrequencyGrid, grid_i: FrequencyGrid,
                     gate=None) -> float:
    """Gated integral of |F|^2 over the sum-frequency axis."""
    p = spec.params
    spacing = _matched_spacing(grid_s, grid_i)
    lam_root = math.sqrt(1.0 / spec.n_pairs)
    f_sum = None
    for pair, w_enc in zip(spec.pairs, encode):
        psi, _ = marginal_signal_mode(pair, p, grid_s)
        phi, _ = marginal_idler_mode(pair, p, grid_i)
        kappa = convolution(mask_s * psi, mask_i * phi, spacing)
        term = lam_root * pair.weight * w_enc * kappa
        f_sum = term if f_sum is None else f_sum + term
    density = np.abs(f_sum) ** 2
    if gate is not None:
        density = gate * density
    return float(spacing * np.sum(density))


def g2_numeric(spec: MultiplexedSpectrum, assign: CodingAssignment,
               bin_width: float, grid_s: FrequencyGrid,
               grid_i: FrequencyGrid, acceptance_scale: float = 3.0) -> float:
    """g2(0) through the frequency-bin numeric path.

    Single channel: the encode weights become signal-axis bins centered
    on each pair's signal frequency and the decode weights become idler
    bins at delta_p, so both coding stages act imperfectly once the bins
    stop being wide against the mode profiles.  With a channel_map the
    decoder is the factorized bin assignment and the encode weights stay
    exact per-pair amplitudes (applied at the source, before
    multiplexing).  The scale is calibrated against the all-ones cell so
    the result is directly comparable to the ideal path.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    n = spec.n_pairs
    encode = np.ones(n, complex) if assign.encode is None \
        else np.asarray(assign.encode, dtype=complex)
    if len(encode) != n:
        raise ChannelShapeMismatch("encode length must match the pair count")
    gate = acceptance_gate(convolution_grid(grid_s, grid_i), spec,
                           acceptance_scale)
    ones = np.ones(n, complex)

    if assign.channel_map is not None:
        cm = assign.channel_map
        mask_s = _binned_mask(cm.signal_weights, cm.bin_spacing, grid_s)
        mask_i = _binned_mask(cm.idler_weights, cm.bin_spacing, grid_i)
        ref_s = _binned_mask(dict.fromkeys(cm.signal_weights, 1.0),
                             cm.bin_spacing, grid_s)
        ref_i = _binned_mask(dict.fromkeys(cm.idler_weights, 1.0),
                             cm.bin_spacing, grid_i)
        enc_pair = encode
    else:
        decode = ones if assign.decode is None \
            else np.asarray(assign.decode, dtype=complex)
        if len(decode) != n:
            raise ChannelShapeMismatch("decode length must match the pair count")
        sig_centers = [p.signal_center for p in spec.pairs]
        idl_centers = [p.delta_p for p in spec.pairs]
        mask_s = coding_bin_mask(sig_centers, encode, bin_width, grid_s)
        mask_i = coding_bin_mask(idl_centers, decode, bin_width, grid_i)
        ref_s = coding_bin_mask(sig_centers, ones, bin_width, grid_s)
        ref_i = coding_bin_mask(idl_centers, ones, bin_width, grid_i)
        enc_pair = ones          # weights already live in the signal mask

    num = _coded_numerator(spec, enc_pair, mask_s, mask_i, grid_s, grid_i, gate)
    ref = _coded_numerator(spec, ones, ref_s, ref_i, grid_s, grid_i, gate)

    pair0 = spec.pairs[0]
    _, n_s = marginal_signal_mode(pair0, spec.params, grid_s)
    _, n_i = marginal_idler_mode(pair0, spec.params, grid_i)
    # all-ones reference in closed form: prefactor * M per ridge, summed
    # over ridges and divided by the global 1/(R M) weight -> pref * n / R
    ridges = len({p.delta_q for p in spec.pairs})
    ideal_ref = g2_prefactor(n_s, n_i, spec.params.tau) * n / ridges
    return ideal_ref * num / ref


def g2_matrix_numeric(spec: MultiplexedSpectrum, code: CodeMatrix,
                      bin_width: float, grid_s: FrequencyGrid,
                      grid_i: FrequencyGrid,
                      acceptance_scale: float = 3.0) -> G2Matrix:
    """Numeric correlation matrix over (encode column, decode column)."""
    n = code.n
    if spec.n_pairs != n:
        raise ChannelShapeMismatch("code order must match the pair count")
    values = np.zeros((n, n))
    for j in range(n):
        dec = matched_decode(code.column(j))
        for i in range(n):
            assign = CodingAssignment(encode=code.column(i), decode=dec)
            values[i, j] = g2_numeric(spec, assign, bin_width, grid_s,
                                      grid_i, acceptance_scale)
    return G2Matrix(values=values, kind="numeric")
