"""Command-line runner writing simulation results as data files.

Each subcommand reads one JSON configuration file, validates it against a
hand-rolled schema (unknown keys are rejected so typos fail loudly rather
than silently falling back to defaults), runs the corresponding toolkit
routine, and writes deterministic artifacts: CSV numbers carry 12
significant digits, JSON objects are key-sorted, and every file embeds
the SHA-256 of the config it came from together with the artifact format
version.  Identical configs therefore produce byte-identical outputs.

All frequencies and rates in configs are in units of gamma, times in
units of 1/gamma, matching the library convention.

Exit codes: 0 success, 1 configuration or validation failure, 2 numeric
failure (non-convergence, integrator abort, degenerate contrast).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .codes import CodeVectorSpec, alamouti_n, gram, make_c
from .correlation import (CodingAssignment, G2Matrix, contrasts,
                          contrasts_from_levels, g2_matrix_ideal,
                          g2_matrix_ideal_multi, g2_numeric, level_summary,
                          matched_decode)
from .dynamics import DriveParams, compare_dynamics
from .errors import (BiphotonCodingError, ConfigError, CycleDetected,
                     DegenerateMatrix, NotConverged, StepFailure)
from .layout import ChannelLayout, dimension, staircase, validate
from .schmidt import decompose, entropy
from .spectra import (FrequencyGrid, MultiplexedSpectrum, PairShift,
                      PhysicalParams, jsa_multiplexed)

ARTIFACT_VERSION = 1
CONFIG_VERSION = 1
UNITS = "frequencies and rates in gamma; times in 1/gamma"

# above this code-space dimension the matrix CSV is replaced by the
# distinct-level summary to bound output size
LEVEL_THRESHOLD = 4096


# ---------------------------------------------------------------------------
# config schema helpers
# ---------------------------------------------------------------------------

_REQUIRED = object()


def _int(raw):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ValueError(f"expected an integer, got {raw!r}")
    return raw


def _float(raw):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValueError(f"expected a number, got {raw!r}")
    return float(raw)


def _str(raw):
    if not isinstance(raw, str):
        raise ValueError(f"expected a string, got {raw!r}")
    return raw


def _bool(raw):
    if not isinstance(raw, bool):
        raise ValueError(f"expected true/false, got {raw!r}")
    return raw


def _complex(raw):
    """Accept a plain number or a [re, im] pair."""
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(_float(raw[0]), _float(raw[1]))
    raise ValueError(f"expected a number or [re, im], got {raw!r}")


def _float_list(raw):
    if not isinstance(raw, list):
        raise ValueError(f"expected a list of numbers, got {raw!r}")
    return [_float(x) for x in raw]


class _Section:
    """One config mapping.  Keys are consumed as they are read; anything
    left over when the section closes is a schema violation."""

    def __init__(self, mapping, where: str):
        if not isinstance(mapping, dict):
            raise ConfigError(f"{where}: expected an object")
        self._data = dict(mapping)
        self._where = where

    def has(self, key) -> bool:
        return key in self._data

    def take(self, key, cast, default=_REQUIRED):
        if key not in self._data:
            if default is _REQUIRED:
                raise ConfigError(f"{self._where}: missing required key {key!r}")
            return default
        raw = self._data.pop(key)
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"{self._where}.{key}: {exc}") from None

    def take_raw(self, key, default=_REQUIRED):
        if key not in self._data:
            if default is _REQUIRED:
                raise ConfigError(f"{self._where}: missing required key {key!r}")
            return default
        return self._data.pop(key)

    def subsection(self, key, required: bool = False):
        if key not in self._data:
            if required:
                raise ConfigError(f"{self._where}: missing required key {key!r}")
            return None
        return _Section(self._data.pop(key), f"{self._where}.{key}")

    def close(self):
        if self._data:
            names = ", ".join(sorted(map(str, self._data)))
            raise ConfigError(f"{self._where}: unknown keys: {names}")


def _load_config(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg, hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# domain-object parsing
# ---------------------------------------------------------------------------

def _parse_params(sec) -> PhysicalParams:
    if sec is None:
        return PhysicalParams()
    kw = {}
    for name in ("gamma", "gamma3n", "tau", "delta1", "delta2",
                 "omega_a_tilde", "omega_b_tilde"):
        if sec.has(name):
            kw[name] = sec.take(name, _float)
    if sec.has("coupling_prefactor"):
        kw["coupling_prefactor"] = sec.take("coupling_prefactor", _complex)
    sec.close()
    try:
        return PhysicalParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from None


def _parse_drive(sec) -> DriveParams:
    if sec is None:
        return DriveParams()
    kw = {}
    for name in ("omega_a_tilde", "omega_b_tilde", "tau", "delta1", "delta2",
                 "gamma3n", "lamb_shift", "pulse_center", "g_s", "g_i"):
        if sec.has(name):
            kw[name] = sec.take(name, _float)
    sec.close()
    try:
        return DriveParams(**kw)
    except ValueError as exc:
        raise ConfigError(f"drive: {exc}") from None


def _parse_grid(sec) -> FrequencyGrid:
    points = sec.take("points", _int)
    try:
        if sec.has("half_width"):
            half = sec.take("half_width", _float)
            center = sec.take("center", _float, 0.0)
            sec.close()
            return FrequencyGrid.centered(half, points, center)
        lo = sec.take("min", _float)
        hi = sec.take("max", _float)
        sec.close()
        return FrequencyGrid(lo, hi, points)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _parse_spectrum(sec, params: PhysicalParams) -> MultiplexedSpectrum:
    """A spectrum is either an explicit pair list or a regular comb;
    with neither given, a single unshifted unit-weight pair."""
    pairs_raw = sec.take_raw("pairs", None)
    comb = sec.subsection("comb")
    if pairs_raw is not None and comb is not None:
        raise ConfigError("give either 'pairs' or 'comb', not both")
    try:
        if comb is not None:
            n = comb.take("n_pairs", _int)
            delta = comb.take("delta", _float)
            delta_q = comb.take("delta_q", _float, 0.0)
            comb.close()
            return MultiplexedSpectrum.comb(n, delta, params, delta_q=delta_q)
        if pairs_raw is None:
            return MultiplexedSpectrum(params=params, pairs=(PairShift(),))
        if not isinstance(pairs_raw, list) or not pairs_raw:
            raise ConfigError("pairs: expected a non-empty list")
        pairs = []
        for k, entry in enumerate(pairs_raw):
            p = _Section(entry, f"pairs[{k}]")
            pairs.append(PairShift(weight=p.take("weight", _complex, 1.0 + 0j),
                                   delta_p=p.take("delta_p", _float, 0.0),
                                   delta_q=p.take("delta_q", _float, 0.0)))
            p.close()
        return MultiplexedSpectrum(params=params, pairs=tuple(pairs))
    except ValueError as exc:
        raise ConfigError(f"spectrum: {exc}") from None


def _parse_code(sec):
    kind = sec.take("kind", _str, "linear-h")
    n = sec.take("n", _int)
    try:
        if kind == "linear-h":
            spec = CodeVectorSpec(kind=kind, n=n, h=sec.take("h", _float, 2.0))
        elif kind == "geometric":
            spec = CodeVectorSpec(kind=kind, n=n,
                                  a=sec.take("a", _complex, 1.0 + 0j),
                                  r=sec.take("r", _complex, 1.0 + 0j))
        else:
            raise ConfigError(f"code.kind: unknown kind {kind!r}")
        sec.close()
        return spec, alamouti_n(make_c(spec), n)
    except ValueError as exc:
        raise ConfigError(f"code: {exc}") from None


def _auto_grids(n_pairs: int, delta: float, params: PhysicalParams):
    """Equal-spacing signal/idler grids sized for an n-pair comb.

    Spacing resolves the Gaussian ridge with margin and is snapped to
    divide delta/2 so that coding-bin edges land exactly on samples; the
    signal span covers every coding bin plus ~7 sigma of Gaussian tail,
    the idler span covers the +-20*gamma3n window each Lorentzian norm
    needs.
    """
    s0 = min(0.98 / (8.0 * params.tau), params.gamma3n / 4.0)
    s = (delta / 2.0) / math.ceil((delta / 2.0) / s0)
    half_s = 0.5 * n_pairs * delta + 10.0 / params.tau
    half_i = 0.5 * (n_pairs - 1) * delta + 20.5 * params.gamma3n
    ks = int(math.ceil(half_s / s))
    ki = int(math.ceil(half_i / s))
    return (FrequencyGrid(-ks * s, ks * s, 2 * ks + 1),
            FrequencyGrid(-ki * s, ki * s, 2 * ki + 1))


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    return f"{float(x):.12g}"


def _write_csv(path: Path, meta: dict, comments, header, rows):
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.extend(f"# {c}" for c in comments)
    if header:
        lines.append(",".join(header))
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, meta: dict, payload: dict):
    path.write_text(json.dumps({**meta, **payload}, sort_keys=True, indent=2)
                    + "\n")


def _grid_comment(name: str, g: FrequencyGrid) -> str:
    return f"{name} = {g.min:.12g},{g.max:.12g},{g.points}"


def _write_svg_heatmap(path: Path, values, title: str, extent=None):
    # plots are a convenience rendering of the CSVs, never load-bearing
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise ConfigError(
            "svg output requires matplotlib; install the 'plot' extra") from None
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.imshow(np.asarray(values), origin="lower", aspect="auto",
                   extent=extent, cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.savefig(path, format="svg")
    plt.close(fig)


def _parallel_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))   # map preserves submission order


def _numeric_matrix(spec, code, bin_width, grid_s, grid_i,
                    workers: int, acceptance_scale: float = 3.0) -> G2Matrix:
    """Numeric correlation matrix with the cells evaluated in parallel."""
    n = code.n

    def one(cell):
        i, j = cell
        assign = CodingAssignment(encode=code.column(i),
                                  decode=matched_decode(code.column(j)))
        return g2_numeric(spec, assign, bin_width, grid_s, grid_i,
                          acceptance_scale)

    cells = [(i, j) for i in range(n) for j in range(n)]
    values = _parallel_map(one, cells, workers)
    return G2Matrix(values=np.array(values).reshape(n, n), kind="numeric")


def _contrast_payload(report) -> dict:
    return {k: (None if v is None else float(v))
            for k, v in report.as_dict().items()}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_jsa(sec, meta, outdir: Path, label: str, args) -> int:
    params = _parse_params(sec.subsection("params"))
    spec = _parse_spectrum(sec, params)
    grid_s = _parse_grid(sec.subsection("signal_grid", required=True))
    grid_i = _parse_grid(sec.subsection("idler_grid", required=True))
    svg = sec.take("svg", _bool, False)
    sec.close()

    f = jsa_multiplexed(spec, grid_s.omegas[:, None], grid_i.omegas[None, :])
    surface = np.abs(f) ** 2
    peak = np.unravel_index(int(np.argmax(surface)), surface.shape)
    total = float(grid_s.weights @ surface @ grid_i.weights)

    _write_csv(outdir / f"{label}_surface.csv", meta,
               [_grid_comment("signal_grid", grid_s),
                _grid_comment("idler_grid", grid_i),
                "rows = signal detuning, columns = idler detuning, "
                "values = |f|^2"],
               None, surface)
    _write_json(outdir / f"{label}_meta.json", meta, {
        "n_pairs": spec.n_pairs,
        "peak_value": float(surface[peak]),
        "peak_signal_detuning": float(grid_s.omegas[peak[0]]),
        "peak_idler_detuning": float(grid_i.omegas[peak[1]]),
        "total_intensity": total,
    })
    if svg:
        _write_svg_heatmap(outdir / f"{label}_surface.svg", surface.T,
                           f"{label}: |f(w_s, w_i)|^2",
                           extent=(grid_s.min, grid_s.max, grid_i.min, grid_i.max))
    return 0


def _cmd_schmidt(sec, meta, outdir: Path, label: str, args) -> int:
    params = _parse_params(sec.subsection("params"))
    spec = _parse_spectrum(sec, params)
    grid_s = _parse_grid(sec.subsection("signal_grid", required=True))
    grid_i = _parse_grid(sec.subsection("idler_grid", required=True))
    n_modes = sec.take("n_modes", _int, None)
    sec.close()

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        d = decompose(spec, grid_s, grid_i, n_modes=n_modes)

    _write_csv(outdir / f"{label}_lambdas.csv", meta, [],
               ["index", "lambda"],
               [(k, float(lam)) for k, lam in enumerate(d.lambdas)])
    _write_json(outdir / f"{label}_report.json", meta, {
        "entropy": entropy(d),
        "norm": d.norm,
        "n_modes": d.n_modes,
        "lambda_sum": float(np.sum(d.lambdas)),
        "lambdas_top": [float(x) for x in d.lambdas[:8]],
        "warnings": [str(w.message) for w in caught],
    })
    return 0


def _cmd_codes(sec, meta, outdir: Path, label: str, args) -> int:
    cspec, code = _parse_code(sec.subsection("code", required=True))
    sec.close()

    g = gram(code)
    off = ~np.eye(code.n, dtype=bool)
    orthogonal_pairs = int(np.sum(np.abs(g[off]) < 1e-12)) // 2
    report = contrasts_from_levels(level_summary(code, 1), 1)

    _write_csv(outdir / f"{label}_code.csv", meta,
               ["columns are codewords"], None, code.entries)
    _write_csv(outdir / f"{label}_gram.csv", meta,
               ["entry (i, j) = <codeword_i, codeword_j>"], None, g)
    _write_json(outdir / f"{label}_report.json", meta, {
        "kind": cspec.kind,
        "n": code.n,
        "h": cspec.h if cspec.kind == "linear-h" else None,
        "orthogonal_column_pairs": orthogonal_pairs,
        "ideal_contrast": _contrast_payload(report),
    })
    return 0


def _cmd_single_channel(sec, meta, outdir: Path, label: str, args) -> int:
    cspec, code = _parse_code(sec.subsection("code", required=True))
    mode = sec.take("mode", _str, "ideal")
    if mode not in ("ideal", "numeric"):
        raise ConfigError(f"mode: expected 'ideal' or 'numeric', got {mode!r}")
    svg = sec.take("svg", _bool, False)

    if mode == "ideal":
        prefactor = sec.take("prefactor", _float, 1.0)
        sec.close()
        matrix = g2_matrix_ideal(code, prefactor)
        comments = [f"ideal path, prefactor = {prefactor:.12g}"]
    else:
        if sec.has("prefactor"):
            raise ConfigError(
                "prefactor is fixed by calibration in numeric mode")
        params = _parse_params(sec.subsection("params"))
        delta = sec.take("delta", _float)
        bin_width = sec.take("bin_width", _float, delta)
        acceptance = sec.take("acceptance_scale", _float, 3.0)
        gsec, isec = sec.subsection("signal_grid"), sec.subsection("idler_grid")
        sec.close()
        if (gsec is None) != (isec is None):
            raise ConfigError("give both grids or neither")
        if gsec is None:
            grid_s, grid_i = _auto_grids(code.n, delta, params)
        else:
            grid_s, grid_i = _parse_grid(gsec), _parse_grid(isec)
        spec = MultiplexedSpectrum.comb(code.n, delta, params)
        matrix = _numeric_matrix(spec, code, bin_width, grid_s, grid_i,
                                 args.workers, acceptance)
        comments = [f"numeric path, delta = {delta:.12g}, "
                    f"bin_width = {bin_width:.12g}, "
                    f"acceptance_scale = {acceptance:.12g}",
                    _grid_comment("signal_grid", grid_s),
                    _grid_comment("idler_grid", grid_i)]

    # contrast always from the emitted matrix so the report describes
    # exactly what was written
    report = contrasts(matrix)

    _write_csv(outdir / f"{label}_g2.csv", meta,
               comments + ["rows = encode index, columns = decode index"],
               None, matrix.values)
    _write_json(outdir / f"{label}_contrast.json", meta, {
        "mode": mode, "n": code.n,
        "contrast": _contrast_payload(report),
    })
    if svg:
        _write_svg_heatmap(outdir / f"{label}_g2.svg", matrix.values,
                           f"{label}: g2 ({mode})")
    return 0


def _cmd_sweep(sec, meta, outdir: Path, label: str, args) -> int:
    variable = sec.take("variable", _str)
    if variable not in ("h", "delta"):
        raise ConfigError(f"variable: expected 'h' or 'delta', got {variable!r}")

    if sec.has("values"):
        values = sec.take("values", _float_list)
    else:
        rng = sec.subsection("range", required=True)
        start = rng.take("start", _float)
        stop = rng.take("stop", _float)
        steps = rng.take("steps", _int)
        rng.close()
        if steps < 1:
            raise ConfigError("range.steps must be at least 1")
        values = [float(x) for x in np.linspace(start, stop, steps)]
    if not values:
        raise ConfigError("sweep range is empty")

    n = sec.take("n", _int, 4)

    if variable == "h":
        prefactor = sec.take("prefactor", _float, 1.0)
        sec.close()

        def point(h):
            code = alamouti_n(make_c(CodeVectorSpec("linear-h", n, h=h)), n)
            rep = contrasts(g2_matrix_ideal(code, prefactor))
            return h, rep.v, rep.c_od
    else:
        params = _parse_params(sec.subsection("params"))
        h = sec.take("h", _float, 1.0)
        acceptance = sec.take("acceptance_scale", _float, 3.0)
        sec.close()
        code = alamouti_n(make_c(CodeVectorSpec("linear-h", n, h=h)), n)

        def point(delta):
            grid_s, grid_i = _auto_grids(n, delta, params)
            spec = MultiplexedSpectrum.comb(n, delta, params)
            matrix = _numeric_matrix(spec, code, delta, grid_s, grid_i, 1,
                                     acceptance)
            rep = contrasts(matrix)
            return delta, rep.v, rep.c_od

    rows = _parallel_map(point, values, args.workers)
    _write_csv(outdir / f"{label}_sweep.csv", meta,
               [f"n = {n}"], [variable, "v", "c_od"],
               [(v, float(a), float(b)) for v, a, b in rows])
    return 0


def _cmd_multi_channel(sec, meta, outdir: Path, label: str, args) -> int:
    r = sec.take("r", _int)
    m = sec.take("m", _int)
    h = sec.take("h", _float, 2.0)
    bin_width = sec.take("bin_width", _float, 100.0)
    normalization = sec.take("normalization", _str, "global")
    prefactor = sec.take("prefactor", _float, 1.0)
    tau = sec.take("tau", _float, None)
    svg = sec.take("svg", _bool, False)
    sec.close()
    if normalization not in ("global", "per_channel"):
        raise ConfigError(f"normalization: unknown value {normalization!r}")

    layout = staircase(r, m, bin_width)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        info = validate(layout, tau=tau)
    d = dimension(layout)
    code = alamouti_n(make_c(CodeVectorSpec("linear-h", m, h=h)), m)

    levels = level_summary(code, r, prefactor, normalization)
    report = contrasts_from_levels(levels, r)

    _write_csv(outdir / f"{label}_levels.csv", meta,
               [f"r = {r}, m = {m}, h = {h:.12g}, "
                f"normalization = {normalization}"],
               ["matched_channels", "value", "multiplicity"],
               [(lc.matched_channels, lc.value, lc.multiplicity)
                for lc in levels])
    if d <= LEVEL_THRESHOLD:
        matrix = g2_matrix_ideal_multi(code, r, prefactor, normalization)
        _write_csv(outdir / f"{label}_g2.csv", meta,
                   ["rows = encode index, columns = decode index, "
                    "mixed-radix digits give per-channel codewords"],
                   None, matrix.values)
        if svg:
            _write_svg_heatmap(outdir / f"{label}_g2.svg", matrix.values,
                               f"{label}: g2 ({d} x {d})")
    elif svg:
        raise ConfigError(
            f"dimension {d} exceeds {LEVEL_THRESHOLD}; no matrix to plot")

    _write_json(outdir / f"{label}_contrast.json", meta, {
        "r": r, "m": m, "dimension": d,
        "normalization": normalization,
        "layout": info,
        "n_levels": len(levels),
        "matrix_emitted": d <= LEVEL_THRESHOLD,
        "contrast": _contrast_payload(report),
        "warnings": [str(w.message) for w in caught],
    })
    return 0


def _cmd_validate_layout(sec, meta, outdir: Path, label: str, args) -> int:
    tau = sec.take("tau", _float, None)
    stair = sec.subsection("staircase")
    placed = sec.subsection("placement")
    sec.close()
    if (stair is None) == (placed is None):
        raise ConfigError("give exactly one of 'staircase' or 'placement'")

    if stair is not None:
        r = stair.take("r", _int)
        m = stair.take("m", _int)
        bw = stair.take("bin_width", _float, 100.0)
        stair.close()
        layout = staircase(r, m, bw)
    else:
        r = placed.take("r", _int)
        m = placed.take("m", _int)
        bw = placed.take("bin_width", _float, 100.0)
        cells_raw = placed.take_raw("cells")
        placed.close()
        if not isinstance(cells_raw, list):
            raise ConfigError("placement.cells: expected a list")
        placement = {}
        for entry in cells_raw:
            if not (isinstance(entry, list) and len(entry) == 4
                    and all(isinstance(x, int) for x in entry)):
                raise ConfigError(
                    "placement.cells entries must be [r, m, k, k'] integers")
            placement[(entry[0], entry[1])] = (entry[2], entry[3])
        try:
            layout = ChannelLayout(r=r, m=m, placement=placement, bin_width=bw)
        except ValueError as exc:
            raise ConfigError(f"placement: {exc}") from None

    path = outdir / f"{label}_layout.json"
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            info = validate(layout, tau=tau)
    except CycleDetected as exc:
        _write_json(path, meta, {"valid": False, "error": str(exc),
                                 "cycle": [f"{a}{k}" for a, k in exc.cycle]})
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_json(path, meta, {
        **info,
        "dimension": dimension(layout),
        "warnings": [str(w.message) for w in caught],
    })
    return 0


def _cmd_dynamics_check(sec, meta, outdir: Path, label: str, args) -> int:
    drive = _parse_drive(sec.subsection("drive"))
    grid_s = _parse_grid(sec.subsection("signal_grid", required=True))
    grid_i = _parse_grid(sec.subsection("idler_grid", required=True))
    t_final = sec.take("t_final", _float, None)
    rtol = sec.take("rtol", _float, 1e-8)
    sec.close()

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = compare_dynamics(drive, grid_s, grid_i,
                                  t_final=t_final, rtol=rtol)

    _write_json(outdir / f"{label}_dynamics.json", meta, {
        **report,
        "drive": dataclasses.asdict(drive),
        "signal_grid": [grid_s.min, grid_s.max, grid_s.points],
        "idler_grid": [grid_i.min, grid_i.max, grid_i.points],
        "warnings": [str(w.message) for w in caught],
    })
    return 0


_COMMANDS = {
    "jsa": (_cmd_jsa, "sample a joint spectral amplitude onto CSV"),
    "schmidt": (_cmd_schmidt, "Schmidt weights and entropy of a spectrum"),
    "codes": (_cmd_codes, "build a code matrix and its Gram matrix"),
    "single-channel": (_cmd_single_channel,
                       "correlation matrix of one coded channel"),
    "sweep": (_cmd_sweep, "contrast metrics swept over h or delta"),
    "multi-channel": (_cmd_multi_channel,
                      "correlation levels of a multi-channel design"),
    "validate-layout": (_cmd_validate_layout,
                        "check decodability of a pair placement"),
    "dynamics-check": (_cmd_dynamics_check,
                       "integrate the cascade and compare the closed form"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="biphoton-coding",
        description="spectral-coding simulation runner (config-driven)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker threads for independent cells/points")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, blurb) in _COMMANDS.items():
        p = sub.add_parser(name, help=blurb)
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--out", default=None,
                       help="output directory (overrides the config)")
    args = parser.parse_args(argv)

    try:
        cfg, digest = _load_config(args.config)
        sec = _Section(cfg, "config")
        version = sec.take("config_version", _int)
        if version != CONFIG_VERSION:
            raise ConfigError(
                f"unsupported config_version {version} (expected {CONFIG_VERSION})")
        # consume output_dir even when --out overrides it, so the
        # unknown-key check stays strict for everything else
        cfg_out = sec.take("output_dir", _str, ".")
        outdir = Path(args.out) if args.out is not None else Path(cfg_out)
        label = sec.take("label", _str, args.command.replace("-", "_"))
        meta = {"artifact_version": ARTIFACT_VERSION,
                "config_sha256": digest,
                "tool": f"biphoton-coding {args.command}",
                "units": UNITS}
        outdir.mkdir(parents=True, exist_ok=True)
        handler = _COMMANDS[args.command][0]
        return handler(sec, meta, outdir, label, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NotConverged, StepFailure, DegenerateMatrix) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except BiphotonCodingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
