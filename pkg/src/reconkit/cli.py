"""Command-line entry point: one binary with experiment subcommands.

Configuration lives in a JSON file (nested key/value sections); any flag
given on the command line overrides the corresponding config value.  Unknown
config fields are rejected by name.  Every command echoes its effective
configuration, the seeds it used, and the package version into
``manifest.json`` in the output directory, and writes canonical float
rasters (see ``reconkit.io``) next to PGM previews and CSV metric tables.

Exit codes: 0 on success, 2 for a malformed configuration, 3 for a numerical
failure (a diagnostic trace is written and its path printed).

Seeds: ``--seed`` sets the experiment seed (default 0).  Component streams
derive from it as seed * 1000 + {1: mask, 2: noise, 3: power iteration}
unless the config pins them explicitly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import types
import typing
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .direct import fbp
from .errors import BreakdownError, DivergenceError, SingularityError, ValidationError
from .grids import dft2, idft2
from .io import read_raster, write_csv, write_manifest, write_pgm, write_raster
from .operators import (
    Mask,
    RadonGeometry,
    dot_test,
    embed_kernel,
    fourier_slice_check,
    op_compose,
    op_convolve,
    op_dft2,
    op_grad,
    op_mask,
    op_multiply,
    op_radon,
)
from .phantoms import (
    SHEPP_LOGAN,
    airy_psf,
    analytic_sinogram,
    degrade,
    gaussian_kernel,
    shepp_logan,
    snr_db,
)
from .variational import (
    Objective,
    ProxSpec,
    admm,
    conjugate_gradient_normal,
    gradient_descent,
    ista,
    lambda_sweep,
    nullspace_demo,
    prox_apply,
)


class ConfigError(Exception):
    """A config field is unknown, has the wrong type, or a bad value."""


# ---------------------------------------------------------------------------
# Configuration schema
# ---------------------------------------------------------------------------


@dataclass
class PhantomConfig:
    kind: str = "shepp_logan"
    size: int = 128


@dataclass
class DegradationConfig:
    blur: str = "gaussian"  # gaussian | airy | none
    blur_size: int = 5
    blur_sigma: float = 1.0
    airy_cutoff: float = 0.2
    mask_fraction: float = 0.5
    noise_snr_db: float | None = 20.0
    noise_sigma: float | None = None  # when set, wins over noise_snr_db
    mask_seed: int | None = None
    noise_seed: int | None = None


@dataclass
class GeometryConfig:
    n_angles: int = 30
    n_detectors: int | None = None  # defaults to the image size
    detector_pitch: float = 1.0


@dataclass
class SolverConfig:
    kind: str = "cg_tikhonov"  # cg_tikhonov | gd | ista | fista | admm_tv | admm_l1
    lam: float = 0.1
    lambdas: list | None = None
    rho: float = 1.0
    max_iter: int = 200
    tol: float = 1e-8
    inner_iter: int = 30
    step: float | None = None  # gd only; None picks the safe auto step
    power_seed: int | None = None


@dataclass
class ExperimentConfig:
    phantom: PhantomConfig = field(default_factory=PhantomConfig)
    degradation: DegradationConfig = field(default_factory=DegradationConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    transform: str = "haar"  # haar | dct8 | dft | all
    keep_fractions: list = field(default_factory=lambda: [0.01, 0.05, 0.1, 0.25])
    levels: int = 4
    out_dir: str = "out"
    seed: int = 0

    def mask_seed(self) -> int:
        s = self.degradation.mask_seed
        return self.seed * 1000 + 1 if s is None else s

    def noise_seed(self) -> int:
        s = self.degradation.noise_seed
        return self.seed * 1000 + 2 if s is None else s

    def power_seed(self) -> int:
        s = self.solver.power_seed
        return self.seed * 1000 + 3 if s is None else s


_PRIMITIVES = (int, float, str, bool)


def _coerce(value, typ, path):
    origin = typing.get_origin(typ)
    # X | None and typing.Optional[X] report different origins
    if origin is typing.Union or origin is types.UnionType:
        args = [a for a in typing.get_args(typ) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], path)
    if dataclasses.is_dataclass(typ):
        if not isinstance(value, dict):
            raise ConfigError(f"{path} must be a table of fields")
        return _from_dict(typ, value, path)
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path} must be true or false")
        return value
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path} must be an integer")
        return value
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path} must be a number")
        return float(value)
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path} must be a string")
        return value
    if typ is list or origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path} must be a list")
        return list(value)
    raise ConfigError(f"{path} has unsupported type {typ!r}")


def _from_dict(cls, data: dict, path: str = "config"):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown field {path}.{key}")
    kwargs = {}
    for name, value in data.items():
        kwargs[name] = _coerce(value, hints[name], f"{path}.{name}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad {path}: {exc}") from exc


def _deep_merge(base: dict, patch: dict) -> dict:
    out = dict(base)
    for key, value in patch.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return dataclasses.asdict(cfg)


def config_from_dict(data: dict) -> ExperimentConfig:
    return _from_dict(ExperimentConfig, data)


def load_config(args, base: dict | None = None) -> ExperimentConfig:
    """defaults <- command base <- config file <- explicit command-line flags."""
    file_part: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_part = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(file_part, dict):
            raise ConfigError("config file must hold a JSON object")
    merged = _deep_merge(base or {}, file_part)
    merged = _deep_merge(merged, _flag_patch(args))
    cfg = config_from_dict(merged)
    _validate_config(cfg)
    return cfg


_FLAG_PATHS = {
    "size": ("phantom", "size"),
    "mask_fraction": ("degradation", "mask_fraction"),
    "snr_db": ("degradation", "noise_snr_db"),
    "sigma": ("degradation", "noise_sigma"),
    "blur": ("degradation", "blur"),
    "angles": ("geometry", "n_angles"),
    "solver": ("solver", "kind"),
    "lam": ("solver", "lam"),
    "lambdas": ("solver", "lambdas"),
    "rho": ("solver", "rho"),
    "max_iter": ("solver", "max_iter"),
    "step": ("solver", "step"),
    "transform": ("transform",),
    "fractions": ("keep_fractions",),
    "levels": ("levels",),
    "out": ("out_dir",),
    "seed": ("seed",),
}


def _flag_patch(args) -> dict:
    patch: dict = {}
    for flag, path in _FLAG_PATHS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        node = patch
        for part in path[:-1]:
            node = node.setdefault(part, {})
        node[path[-1]] = value
    return patch


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.phantom.kind != "shepp_logan":
        raise ConfigError(f"phantom.kind {cfg.phantom.kind!r} is not supported")
    if cfg.phantom.size < 32:
        raise ConfigError("phantom.size must be >= 32")
    if cfg.degradation.blur not in ("gaussian", "airy", "none"):
        raise ConfigError(f"degradation.blur {cfg.degradation.blur!r} is not supported")
    if not 0.0 < cfg.degradation.mask_fraction <= 1.0:
        raise ConfigError("degradation.mask_fraction must lie in (0, 1]")
    if cfg.solver.kind not in ("cg_tikhonov", "gd", "ista", "fista", "admm_tv", "admm_l1"):
        raise ConfigError(f"solver.kind {cfg.solver.kind!r} is not supported")
    if cfg.solver.lam < 0:
        raise ConfigError("solver.lam must be >= 0")
    if cfg.solver.step is not None and not cfg.solver.step > 0:
        raise ConfigError("solver.step must be > 0 when given")
    if cfg.transform not in ("haar", "dct8", "dft", "all"):
        raise ConfigError(f"transform {cfg.transform!r} is not supported")
    for fr in cfg.keep_fractions:
        if not isinstance(fr, (int, float)) or not 0.0 < float(fr) <= 1.0:
            raise ConfigError("keep_fractions entries must lie in (0, 1]")


# ---------------------------------------------------------------------------
# Shared pipeline pieces
# ---------------------------------------------------------------------------


def _blur_kernel(cfg: ExperimentConfig) -> np.ndarray:
    deg = cfg.degradation
    if deg.blur == "gaussian":
        return gaussian_kernel(deg.blur_size, deg.blur_sigma)
    if deg.blur == "airy":
        return airy_psf(deg.blur_size, deg.airy_cutoff).data
    return np.array([[1.0]])


def _simulate(cfg: ExperimentConfig):
    """Phantom, blur, mask, and noise per the config; returns truth and data."""
    truth = shepp_logan(cfg.phantom.size)
    kernel = _blur_kernel(cfg)
    mask = Mask.random(truth.data.shape, cfg.degradation.mask_fraction, cfg.mask_seed())
    if cfg.degradation.noise_sigma is not None:
        sigma = float(cfg.degradation.noise_sigma)
    elif cfg.degradation.noise_snr_db is not None:
        # sigma hits the target expected measurement SNR: ||clean||^2 / (M sigma^2)
        probe = op_compose(op_mask(mask), op_convolve(embed_kernel(kernel, truth.data.shape)))
        clean = probe.apply(truth.data)
        power = float(np.vdot(clean, clean).real)
        sigma = float(
            np.sqrt(power / (clean.size * 10.0 ** (cfg.degradation.noise_snr_db / 10.0)))
        )
    else:
        sigma = 0.0
    data = degrade(truth, kernel, mask, sigma, cfg.noise_seed())
    return truth, kernel, data


def _seed_block(cfg: ExperimentConfig) -> dict:
    return {
        "seed": cfg.seed,
        "mask_seed": cfg.mask_seed(),
        "noise_seed": cfg.noise_seed(),
        "power_seed": cfg.power_seed(),
    }


def _manifest(cfg: ExperimentConfig, command: str, outputs: list[str], extra: dict | None = None):
    payload = {
        "command": command,
        "version": __version__,
        "config": config_to_dict(cfg),
        "seeds": _seed_block(cfg),
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    if extra:
        payload.update(extra)
    path = os.path.join(cfg.out_dir, "manifest.json")
    write_manifest(path, payload)
    return path


def _emit_image(out_dir: str, name: str, data, windows: dict) -> list[str]:
    base = os.path.join(out_dir, name)
    paths = write_raster(base, data)
    lo, hi = write_pgm(base + ".pgm", np.atleast_2d(np.asarray(data)))
    windows[name] = [lo, hi]
    return paths + [base + ".pgm"]


def _build_reconstructor(cfg: ExperimentConfig, forward, data, shape):
    """Map solver.kind onto an Objective and a solver call; returns run(lam)."""
    kind = cfg.solver.kind
    sol = cfg.solver

    def run(lam: float) -> np.ndarray:
        if kind == "cg_tikhonov":
            obj = Objective(forward, data, "quadratic", lam, reg_op=op_grad(shape))
            return conjugate_gradient_normal(obj, max_iter=sol.max_iter, tol=sol.tol).final
        if kind == "gd":
            obj = Objective(forward, data, "quadratic", lam, reg_op=op_grad(shape))
            return gradient_descent(
                obj,
                step="auto" if sol.step is None else sol.step,
                max_iter=sol.max_iter,
                tol=sol.tol,
                power_seed=cfg.power_seed(),
            ).final
        if kind in ("ista", "fista"):
            obj = Objective(forward, data, "abs", lam)
            return ista(
                obj,
                accelerate=(kind == "fista"),
                max_iter=sol.max_iter,
                tol=sol.tol,
                power_seed=cfg.power_seed(),
            ).final
        reg = op_grad(shape) if kind == "admm_tv" else None
        obj = Objective(forward, data, "abs", lam, reg_op=reg)
        return admm(
            obj,
            rho=sol.rho,
            max_iter=sol.max_iter,
            tol_primal=sol.tol,
            tol_dual=sol.tol,
            inner_iter=sol.inner_iter,
        ).final

    return run


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_phantom(args) -> int:
    cfg = load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    truth = shepp_logan(cfg.phantom.size)
    windows: dict = {}
    outputs = _emit_image(cfg.out_dir, "phantom", truth.data, windows)
    outputs.append(_manifest(cfg, "phantom", outputs, {"windows": windows}))
    print(f"phantom: wrote {cfg.phantom.size}x{cfg.phantom.size} head phantom to {cfg.out_dir}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    truth, kernel, data = _simulate(cfg)
    windows: dict = {}
    outputs = []
    outputs += _emit_image(cfg.out_dir, "truth", truth.data, windows)
    outputs += _emit_image(cfg.out_dir, "kernel", kernel, windows)
    outputs += _emit_image(cfg.out_dir, "mask", data.mask.to_bool().astype(np.float64), windows)
    outputs += write_raster(os.path.join(cfg.out_dir, "measurements"), data.measurements)
    metrics = os.path.join(cfg.out_dir, "metrics.csv")
    write_csv(
        metrics,
        ["metric", "value"],
        [
            ("measurement_snr_db", data.measurement_snr_db),
            ("noise_sigma", data.sigma),
            ("kept_entries", data.mask.count),
        ],
    )
    outputs.append(metrics)
    outputs.append(
        _manifest(cfg, "simulate", outputs, {"windows": windows, "noise_sigma": data.sigma})
    )
    print(
        f"simulate: {data.mask.count} measurements at "
        f"{data.measurement_snr_db:.2f} dB, sigma={data.sigma:.6g}"
    )
    return 0


def cmd_reconstruct(args) -> int:
    cfg = load_config(args)
    data_dir = args.data if getattr(args, "data", None) else cfg.out_dir
    truth = read_raster(os.path.join(data_dir, "truth"))
    kernel = read_raster(os.path.join(data_dir, "kernel"))
    mask = Mask.from_bool(read_raster(os.path.join(data_dir, "mask")) > 0.5)
    measurements = read_raster(os.path.join(data_dir, "measurements")).ravel()
    os.makedirs(cfg.out_dir, exist_ok=True)

    forward = op_compose(
        op_mask(mask), op_convolve(embed_kernel(kernel, truth.shape), "circular")
    )
    run = _build_reconstructor(cfg, forward, measurements, truth.shape)
    recon = run(cfg.solver.lam)

    windows: dict = {}
    outputs = _emit_image(cfg.out_dir, "recon", recon, windows)
    metrics = os.path.join(cfg.out_dir, "metrics.csv")
    write_csv(
        metrics,
        ["metric", "value"],
        [("snr_db", snr_db(truth, recon)), ("lam", cfg.solver.lam), ("solver", cfg.solver.kind)],
    )
    outputs.append(metrics)
    outputs.append(_manifest(cfg, "reconstruct", outputs, {"windows": windows}))
    print(f"reconstruct: {cfg.solver.kind} lam={cfg.solver.lam:g} snr={snr_db(truth, recon):.2f} dB")
    return 0


def cmd_compress_study(args) -> int:
    from .phantoms import compressibility_study

    cfg = load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    img = shepp_logan(cfg.phantom.size)
    names = ["haar", "dct8", "dft"] if cfg.transform == "all" else [cfg.transform]
    rows = []
    for name in names:
        for fr, snr in compressibility_study(img, name, cfg.keep_fractions, cfg.levels):
            rows.append((name, fr, snr))
    metrics = os.path.join(cfg.out_dir, "metrics.csv")
    write_csv(metrics, ["transform", "keep_fraction", "snr_db"], rows)
    _manifest(cfg, "compress-study", [metrics])
    for name, fr, snr in rows:
        print(f"compress-study: {name} keep={fr:g} snr={snr:.2f} dB")
    return 0


def cmd_compare_l2_l1(args) -> int:
    cfg = load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    truth, kernel, data = _simulate(cfg)
    lambdas = cfg.solver.lambdas or [0.003, 0.01, 0.03, 0.1, 0.3]

    quad_cfg = dataclasses.replace(cfg, solver=dataclasses.replace(cfg.solver, kind="cg_tikhonov"))
    tv_cfg = dataclasses.replace(cfg, solver=dataclasses.replace(cfg.solver, kind="admm_tv"))
    run_l2 = _build_reconstructor(quad_cfg, data.op, data.measurements, truth.data.shape)
    run_l1 = _build_reconstructor(tv_cfg, data.op, data.measurements, truth.data.shape)
    sweep_l2 = lambda_sweep(run_l2, truth.data, lambdas)
    sweep_l1 = lambda_sweep(run_l1, truth.data, lambdas)

    rows = [("l2_grad", lam, snr) for lam, snr in sweep_l2.rows]
    rows += [("l1_tv", lam, snr) for lam, snr in sweep_l1.rows]
    metrics = os.path.join(cfg.out_dir, "metrics.csv")
    write_csv(metrics, ["solver", "lambda", "snr_db"], rows)
    summary = os.path.join(cfg.out_dir, "summary.csv")
    gap = sweep_l1.best_snr - sweep_l2.best_snr
    write_csv(
        summary,
        ["solver", "best_lambda", "best_snr_db"],
        [
            ("l2_grad", sweep_l2.best_lambda, sweep_l2.best_snr),
            ("l1_tv", sweep_l1.best_lambda, sweep_l1.best_snr),
            ("gap_db", "", gap),
        ],
    )

    windows: dict = {}
    outputs = [metrics, summary]
    outputs += _emit_image(cfg.out_dir, "truth", truth.data, windows)
    outputs += _emit_image(cfg.out_dir, "recon_l2", run_l2(sweep_l2.best_lambda), windows)
    outputs += _emit_image(cfg.out_dir, "recon_l1", run_l1(sweep_l1.best_lambda), windows)
    outputs.append(_manifest(cfg, "compare-l2-l1", outputs, {"windows": windows, "gap_db": gap}))
    print(
        f"compare-l2-l1: l2 best {sweep_l2.best_snr:.2f} dB (lam={sweep_l2.best_lambda:g}), "
        f"l1 best {sweep_l1.best_snr:.2f} dB (lam={sweep_l1.best_lambda:g}), gap {gap:.2f} dB"
    )
    return 0


# Low-view defaults: 64^2 image, 30 views, TV weight sized for unnormalized
# line integrals, and a light inner CG budget (warm starts take up the slack).
_FBP_VS_TV_BASE = {
    "phantom": {"size": 64},
    "geometry": {"n_angles": 30},
    "solver": {"kind": "admm_tv", "lam": 3.0, "max_iter": 100, "inner_iter": 10},
}


def cmd_fbp_vs_tv(args) -> int:
    cfg = load_config(args, base=_FBP_VS_TV_BASE)
    os.makedirs(cfg.out_dir, exist_ok=True)
    size = cfg.phantom.size
    n_det = cfg.geometry.n_detectors or size
    geom = RadonGeometry(cfg.geometry.n_angles, n_det, cfg.geometry.detector_pitch)
    truth = shepp_logan(size)
    sino = analytic_sinogram(SHEPP_LOGAN, geom, size)

    fbp_img = fbp(sino, out_shape=(size, size))
    obj = Objective(
        op_radon(geom, (size, size)),
        sino.data,
        "abs",
        cfg.solver.lam,
        reg_op=op_grad((size, size)),
    )
    tv = admm(
        obj,
        rho=cfg.solver.rho,
        max_iter=cfg.solver.max_iter,
        tol_primal=cfg.solver.tol,
        tol_dual=cfg.solver.tol,
        inner_iter=cfg.solver.inner_iter,
    )
    snr_fbp = snr_db(truth.data, fbp_img.data)
    snr_tv = snr_db(truth.data, tv.final)

    windows: dict = {}
    outputs = _emit_image(cfg.out_dir, "truth", truth.data, windows)
    outputs += _emit_image(cfg.out_dir, "recon_fbp", fbp_img.data, windows)
    outputs += _emit_image(cfg.out_dir, "recon_tv", tv.final, windows)
    metrics = os.path.join(cfg.out_dir, "metrics.csv")
    write_csv(
        metrics,
        ["method", "snr_db"],
        [("fbp", snr_fbp), ("tv_admm", snr_tv)],
    )
    outputs.append(metrics)
    outputs.append(_manifest(cfg, "fbp-vs-tv", outputs, {"windows": windows}))
    print(
        f"fbp-vs-tv: {cfg.geometry.n_angles} views, fbp {snr_fbp:.2f} dB, "
        f"tv {snr_tv:.2f} dB"
    )
    return 0


def cmd_nullspace_demo(args) -> int:
    cfg = load_config(args)
    report = nullspace_demo()
    print("start           solution                    sum sq error")
    for init, sol, sse in zip(report.inits, report.solutions, report.sse):
        init_s = "(" + ", ".join(f"{v:g}" for v in init) + ")"
        sol_s = "(" + ", ".join(f"{v:7.4f}" for v in sol) + ")"
        print(f"{init_s:15s} {sol_s:27s} {sse:.6f}")
    if getattr(args, "out", None):
        os.makedirs(cfg.out_dir, exist_ok=True)
        metrics = os.path.join(cfg.out_dir, "metrics.csv")
        rows = [
            (i, *report.inits[i], *report.solutions[i], report.sse[i])
            for i in range(len(report.sse))
        ]
        write_csv(
            metrics,
            ["run", "f0_1", "f0_2", "f0_3", "f_1", "f_2", "f_3", "sse"],
            rows,
        )
        _manifest(cfg, "nullspace-demo", [metrics])
    return 0


def _selftest_cases():
    from .grids import normal_stream

    shape = (16, 16)
    kernel = embed_kernel(gaussian_kernel(5, 1.0), shape)
    weights_c = (
        normal_stream(256, 1.0, 11).reshape(shape) + 1j * normal_stream(256, 1.0, 12).reshape(shape)
    )
    mask = Mask.random(shape, 0.3, seed=3)
    cases = [
        ("mask", op_mask(mask), 1e-10),
        ("multiply_real", op_multiply(normal_stream(256, 1.0, 10).reshape(shape)), 1e-10),
        ("multiply_complex", op_multiply(weights_c), 1e-10),
        ("convolve_circular", op_convolve(kernel, "circular"), 1e-6),
        (
            "convolve_linear",
            op_convolve(gaussian_kernel(5, 1.0), "zeropad-linear", domain_shape=shape),
            1e-6,
        ),
        ("grad", op_grad(shape), 1e-10),
        ("dft2", op_dft2(shape), 1e-6),
        ("radon", op_radon(RadonGeometry(12, 16), shape), 1e-6),
        ("mask_dft2", op_compose(op_mask(mask, complex_field=True), op_dft2(shape)), 1e-6),
        ("mask_convolve", op_compose(op_mask(mask), op_convolve(kernel, "circular")), 1e-6),
    ]
    return cases


def cmd_selftest(args) -> int:
    failures = []
    for name, op, tol in _selftest_cases():
        err = dot_test(op, trials=25, seed=100)
        status = "ok" if err <= tol else "FAIL"
        print(f"selftest: {status} dot_test[{name}] err={err:.3e} tol={tol:.0e}")
        if err > tol:
            failures.append(name)

    img = shepp_logan(64)
    fsc = fourier_slice_check(img, np.pi / 6)
    status = "ok" if fsc < 3e-2 else "FAIL"
    print(f"selftest: {status} fourier_slice err={fsc:.3e} tol=3e-02")
    if fsc >= 3e-2:
        failures.append("fourier_slice")

    x = np.linspace(-2, 2, 9)
    soft = prox_apply(ProxSpec("abs", lam=1.0), x, 0.5)
    manual = np.sign(x) * np.maximum(np.abs(x) - 0.5, 0.0)
    ok = np.allclose(soft, manual, atol=1e-12)
    print(f"selftest: {'ok' if ok else 'FAIL'} prox_abs")
    if not ok:
        failures.append("prox_abs")

    rt = idft2(dft2(img)).data.real
    ok = np.allclose(rt, img.data, atol=1e-10)
    print(f"selftest: {'ok' if ok else 'FAIL'} dft_roundtrip")
    if not ok:
        failures.append("dft_roundtrip")

    if failures:
        print(f"selftest: {len(failures)} failure(s): {', '.join(failures)}", file=sys.stderr)
        return 3
    print("selftest: all checks passed")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="experiment seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reconkit", description=__doc__.split("\n")[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("phantom", help="render the head phantom")
    _add_common(p)
    p.add_argument("--size", type=int)
    p.set_defaults(fn=cmd_phantom)

    p = subs.add_parser("simulate", help="blur + mask + noise measurements")
    _add_common(p)
    p.add_argument("--size", type=int)
    p.add_argument("--mask-fraction", dest="mask_fraction", type=float)
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--blur", choices=["gaussian", "airy", "none"])
    p.set_defaults(fn=cmd_simulate)

    p = subs.add_parser("reconstruct", help="solve for the image behind measurements")
    _add_common(p)
    p.add_argument("--data", help="directory holding simulate outputs (default: out dir)")
    p.add_argument("--solver", choices=["cg_tikhonov", "gd", "ista", "fista", "admm_tv", "admm_l1"])
    p.add_argument("--lam", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--step", type=float, help="fixed gradient-descent step (default: auto)")
    p.set_defaults(fn=cmd_reconstruct)

    p = subs.add_parser("compress-study", help="transform-domain compressibility table")
    _add_common(p)
    p.add_argument("--size", type=int)
    p.add_argument("--transform", choices=["haar", "dct8", "dft", "all"])
    p.add_argument("--fractions", dest="fractions", type=_float_list)
    p.add_argument("--levels", type=int)
    p.set_defaults(fn=cmd_compress_study)

    p = subs.add_parser("compare-l2-l1", help="smooth vs sparse regularization, swept")
    _add_common(p)
    p.add_argument("--size", type=int)
    p.add_argument("--mask-fraction", dest="mask_fraction", type=float)
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--lambdas", type=_float_list)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.set_defaults(fn=cmd_compare_l2_l1)

    p = subs.add_parser("fbp-vs-tv", help="few-view tomography: direct vs variational")
    _add_common(p)
    p.add_argument("--size", type=int)
    p.add_argument("--angles", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.set_defaults(fn=cmd_fbp_vs_tv)

    p = subs.add_parser("nullspace-demo", help="one system, three equally good answers")
    _add_common(p)
    p.set_defaults(fn=cmd_nullspace_demo)

    p = subs.add_parser("selftest", help="adjoint and invariant spot checks")
    _add_common(p)
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceError, BreakdownError, SingularityError) as exc:
        out_dir = getattr(args, "out", None) or "."
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "diagnostic.json")
        payload = {"error": type(exc).__name__, "message": str(exc)}
        trace = getattr(exc, "trace", None)
        if trace is not None:
            payload["objective_trace"] = [float(v) for v in np.asarray(trace).ravel()]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"numerical failure: {exc}; diagnostic written to {path}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
