"""Command-line driver: verification sweeps, demos, and scans.

Emits machine-readable JSON reports (schema "sun-phase/1") and CSV
grids.  Reports are byte-identical for identical configuration and
seed: the RNG is seeded explicitly, floats are printed with 17
significant digits, and no timestamps are recorded.

Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
3 inconclusive sweep (more than half of the sampled points skipped).
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algebra import StatePair, build_gellmann_basis, haar_state
from .amplitude import (
    group_relation_residuals,
    phase_gradient,
    polar_amplitude,
    reconstruct_modulus,
    vortex_winding,
)
from .charts import Chart, exp_chart, su2_polar_chart
from .coset import (
    bridge_residuals,
    build_cartan_frame,
    coset_element,
    factorization_residual,
    full_cartan_chart,
    ray_relation_residuals,
    section,
    u1_berry_residuals,
    u1_eigenvalue,
)
from .errors import SunPhaseError
from .superosc import aligned_generator, superoscillation_report

SCHEMA = "sun-phase/1"

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_INCONCLUSIVE = 3

P_SKIP = 1e-6      # group sweeps skip points below this squared amplitude
P_SKIP_RAY = 1e-4  # ray sweeps: the section derivatives carry an O(h^2)/p
                   # error floor, so the 1e-5 tolerance needs this margin


class ConfigError(SunPhaseError, ValueError):
    """Invalid command-line configuration."""


# ---------------------------------------------------------------------------
# deterministic serialization


def format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError("non-finite value in report")
    return format(float(x), ".17g")


def _json_chunks(obj, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{\n"
        for idx, (key, value) in enumerate(obj.items()):
            yield f'{pad}  "{key}": '
            yield from _json_chunks(value, indent + 1)
            yield ",\n" if idx < len(obj) - 1 else "\n"
        yield pad + "}"
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            yield "[]"
            return
        yield "[\n"
        for idx, value in enumerate(obj):
            yield pad + "  "
            yield from _json_chunks(value, indent + 1)
            yield ",\n" if idx < len(obj) - 1 else "\n"
        yield pad + "]"
    elif isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        yield f'"{escaped}"'
    elif isinstance(obj, (bool, np.bool_)):
        yield "true" if obj else "false"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield format_float(float(obj))
    elif obj is None:
        yield "null"
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def dump_report(report: dict) -> str:
    return "".join(_json_chunks(report, 0)) + "\n"


def write_csv(path: str, header: list[str], rows) -> None:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return format(float(v), ".17g")
        return str(v)

    with open(path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(cell(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SweepConfig:
    n: int
    chart: str = "exp"
    points: int = 200
    seed: int = 0
    pair_kind: str = "random"
    psi_i: np.ndarray | None = None
    psi_f: np.ndarray | None = None
    sample_scale: float = 1.0
    tolerances: dict = field(default_factory=dict)
    per_point: bool = False

    def echo(self) -> dict:
        out = {
            "n": self.n,
            "chart": self.chart,
            "points": self.points,
            "seed": self.seed,
            "pair": self.pair_kind,
            "sample_scale": self.sample_scale,
        }
        if self.psi_i is not None:
            out["psi_i"] = [format_float(v) for v in np.ravel([self.psi_i.real, self.psi_i.imag])]
            out["psi_f"] = [format_float(v) for v in np.ravel([self.psi_f.real, self.psi_f.imag])]
        if self.tolerances:
            out["tolerance_overrides"] = dict(sorted(self.tolerances.items()))
        return out


def _parse_state(text: str, n: int, name: str) -> np.ndarray:
    try:
        entries = [complex(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {name}: {exc}") from exc
    if len(entries) != n:
        raise ConfigError(f"{name} needs {n} comma-separated entries")
    v = np.array(entries, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ConfigError(f"{name} is the zero vector")
    if abs(norm - 1.0) > 1e-6:
        print(
            f"warning: {name} norm deviates by {abs(norm - 1.0):.2e}; normalizing",
            file=sys.stderr,
        )
    return v / norm


def resolve_pair(config: SweepConfig, rng: np.random.Generator) -> StatePair:
    if config.pair_kind == "random":
        return StatePair(haar_state(config.n, rng), haar_state(config.n, rng))
    if config.pair_kind == "spin-flip":
        psi_i = np.zeros(config.n, dtype=complex)
        psi_f = np.zeros(config.n, dtype=complex)
        psi_i[0] = 1.0
        psi_f[1] = 1.0
        return StatePair(psi_i, psi_f)
    if config.pair_kind == "explicit":
        return StatePair(config.psi_i, config.psi_f)
    raise ConfigError(f"unknown pair kind '{config.pair_kind}'")


def resolve_chart(config: SweepConfig, pair: StatePair) -> Chart:
    if config.chart == "exp":
        return exp_chart(build_gellmann_basis(config.n))
    if config.chart == "su2-polar":
        if config.n != 2:
            raise ConfigError("chart 'su2-polar' requires --n 2")
        return su2_polar_chart()
    if config.chart == "cartan":
        frame = build_cartan_frame(pair.psi_i, build_gellmann_basis(config.n))
        return full_cartan_chart(frame)
    raise ConfigError(f"unknown chart '{config.chart}'")


def sample_points(chart_box: np.ndarray, rng: np.random.Generator, count: int, scale: float):
    lo, hi = chart_box[:, 0], chart_box[:, 1]
    center = (lo + hi) / 2.0
    half = (hi - lo) / 2.0 * scale
    return [rng.uniform(center - half, center + half) for _ in range(count)]


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("SUN_PHASE_THREADS", "1")))
    except ValueError:
        return 1


def map_ordered(fn, items):
    """Evaluate fn over items, in parallel if configured, preserving order."""
    workers = _max_workers()
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


# ---------------------------------------------------------------------------
# report assembly


def make_check(name: str, max_residual: float, tolerance: float) -> dict:
    return {
        "name": name,
        "max_residual": float(max_residual),
        "tolerance": float(tolerance),
        "pass": bool(max_residual <= tolerance),
    }


def base_report(command: str, config_echo: dict, seed: int) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "config": config_echo,
        "seed": seed,
    }


def finish_report(report: dict, checks: list[dict], out_path: str | None) -> int:
    report["checks"] = checks
    report["pass"] = all(c["pass"] for c in checks)
    text = dump_report(report)
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE


def _tol(config: SweepConfig, name: str, default: float) -> float:
    return float(config.tolerances.get(name, default))


# ---------------------------------------------------------------------------
# verify-group


def run_group_sweep(config: SweepConfig, out_path: str | None = None) -> int:
    """Sweep the group-manifold gradient identities over random points."""
    if config.points < 1:
        raise ConfigError("--points must be >= 1")
    rng = np.random.default_rng(config.seed)
    fixed_pair = None
    if config.pair_kind != "random":
        fixed_pair = resolve_pair(config, rng)

    # only the cartan chart depends on the pair (it is adapted to psi_i)
    shared_chart = None
    if config.chart != "cartan":
        shared_chart = resolve_chart(config, fixed_pair)
    elif fixed_pair is not None:
        shared_chart = resolve_chart(config, fixed_pair)

    tasks = []
    for _ in range(config.points):
        pair = fixed_pair if fixed_pair is not None else resolve_pair(config, rng)
        chart_k = shared_chart if shared_chart is not None else resolve_chart(config, pair)
        x = sample_points(chart_k.sample_box, rng, 1, config.sample_scale)[0]
        tasks.append((pair, chart_k, x))

    bound = 2.0 * (config.n - 1) / config.n

    def evaluate(task):
        pair, chart_k, x = task
        amp = polar_amplitude(pair, chart_k.evaluate(x))
        if amp.p <= P_SKIP:
            return None
        res = group_relation_residuals(pair, chart_k, x)
        grad = phase_gradient(pair, chart_k, x)
        rec = reconstruct_modulus(pair, chart_k, x)
        rec_residual = abs(rec - np.sqrt(amp.p)) / np.sqrt(amp.p)
        bound_deficit = max(0.0, bound - grad.phase_grad_sq)
        return (res.phase, res.modulus, res.cross, rec_residual, bound_deficit, amp.p, x)

    results = map_ordered(evaluate, tasks)
    kept = [r for r in results if r is not None]
    skipped = len(results) - len(kept)

    report = base_report("verify-group", config.echo(), config.seed)
    report["points_requested"] = config.points
    report["points_evaluated"] = len(kept)
    report["points_skipped_low_amplitude"] = skipped

    if skipped > config.points / 2:
        report["inconclusive"] = True
        report["checks"] = []
        report["pass"] = False
        text = dump_report(report)
        if out_path:
            with open(out_path, "w") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        print("error: more than half of the sweep points were skipped", file=sys.stderr)
        return EXIT_INCONCLUSIVE

    columns = np.array([r[:5] for r in kept])
    checks = [
        make_check("phase-identity", columns[:, 0].max(), _tol(config, "phase-identity", 1e-8)),
        make_check("modulus-identity", columns[:, 1].max(), _tol(config, "modulus-identity", 1e-8)),
        make_check("orthogonality", columns[:, 2].max(), _tol(config, "orthogonality", 1e-8)),
        make_check("reconstruction", columns[:, 3].max(), _tol(config, "reconstruction", 1e-8)),
        make_check("gradient-lower-bound", columns[:, 4].max(), _tol(config, "gradient-lower-bound", 1e-9)),
    ]
    if config.per_point:
        report["per_point"] = [
            {
                "x": [float(v) for v in r[6]],
                "p": float(r[5]),
                "residuals": [float(v) for v in r[:3]],
            }
            for r in kept
        ]
    return finish_report(report, checks, out_path)


# ---------------------------------------------------------------------------
# verify-ray


def run_ray_sweep(config: SweepConfig, bridge_points: int, out_path: str | None = None) -> int:
    """Sweep the ray-space identities, connection proportionality, and the
    group-to-ray bridge identities on the section."""
    if config.points < 1:
        raise ConfigError("--points must be >= 1")
    if bridge_points < 0:
        raise ConfigError("--bridge-points must be >= 0")
    rng = np.random.default_rng(config.seed)
    pair = resolve_pair(config, rng)
    frame = build_cartan_frame(pair.psi_i, build_gellmann_basis(config.n))

    m = frame.dim_coset
    y_half = (np.pi / 2) * 0.62 / np.sqrt(m) * config.sample_scale
    # draw all randomness up front so parallel evaluation stays deterministic
    tasks = [
        (
            rng.uniform(-y_half, y_half, m),
            rng.uniform(-0.5, 0.5, frame.dim_iso),
            rng.uniform(-2.0, 2.0),
        )
        for _ in range(config.points)
    ]

    def evaluate(task):
        y, xi_s, xi0 = task
        amp = complex(pair.psi_f.conj() @ (coset_element(frame, y) @ frame.psi_i))
        if abs(amp) ** 2 <= P_SKIP_RAY:
            return None
        point = section(frame, y)
        rel = ray_relation_residuals(pair, frame, y)
        res_minus, res_plus = u1_berry_residuals(point, config.n)
        fs_gap = float(np.max(np.abs(point.fs_metric - point.fs_metric_state)))
        fact = factorization_residual(pair, frame, y, xi_s, xi0)
        return (rel.phase, rel.modulus, rel.cross, res_plus, res_minus, fs_gap, fact)

    results = map_ordered(evaluate, tasks)
    kept = [r for r in results if r is not None]
    skipped = len(results) - len(kept)

    report = base_report("verify-ray", config.echo(), config.seed)
    report["points_requested"] = config.points
    report["points_evaluated"] = len(kept)
    report["points_skipped_low_amplitude"] = skipped
    report["bridge_points"] = bridge_points

    if skipped > config.points / 2:
        report["inconclusive"] = True
        report["checks"] = []
        report["pass"] = False
        text = dump_report(report)
        if out_path:
            with open(out_path, "w") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        print("error: more than half of the sweep points were skipped", file=sys.stderr)
        return EXIT_INCONCLUSIVE

    columns = np.array([r[:7] for r in kept])
    # the sign report: which proportionality convention the numerics satisfy
    report["u1_berry_sign"] = {
        "residual_with_plus_coefficient": float(columns[:, 4].max()),
        "residual_with_minus_coefficient": float(columns[:, 3].max()),
        "resolved_coefficient": f"-sqrt({config.n}/(2*({config.n}-1)))",
    }

    checks = [
        make_check("ray-phase-identity", columns[:, 0].max(), _tol(config, "ray-phase-identity", 1e-5)),
        make_check("ray-modulus-identity", columns[:, 1].max(), _tol(config, "ray-modulus-identity", 1e-5)),
        make_check("ray-orthogonality", columns[:, 2].max(), _tol(config, "ray-orthogonality", 1e-5)),
        make_check("u1-berry-proportionality", columns[:, 3].max(), _tol(config, "u1-berry-proportionality", 1e-8)),
        make_check("fs-metric-agreement", columns[:, 5].max(), _tol(config, "fs-metric-agreement", 1e-6)),
        make_check("factorization", columns[:, 6].max(), _tol(config, "factorization", 1e-9)),
    ]

    if bridge_points:
        bridge_worst = np.zeros(3)
        rate_worst = 0.0
        u1_frame_worst = 0.0
        alt_best = np.inf
        done = 0
        attempts = 0
        while done < bridge_points and attempts < 4 * bridge_points:
            attempts += 1
            y = rng.uniform(-y_half, y_half, m)
            amp = complex(pair.psi_f.conj() @ (coset_element(frame, y) @ frame.psi_i))
            if abs(amp) ** 2 <= P_SKIP:
                continue
            result = bridge_residuals(pair, frame, y)
            bridge_worst = np.maximum(
                bridge_worst,
                [result.residual_phase, result.residual_mixed, result.residual_modulus],
            )
            rate_worst = max(rate_worst, abs(result.grad0_phase - u1_eigenvalue(config.n)))
            u1_frame_worst = max(u1_frame_worst, abs(result.u1_frame_component - 1.0))
            alt_best = min(alt_best, result.alt_residual_phase)
            done += 1
        report["bridge_points_evaluated"] = done
        if done == 0:
            report["inconclusive"] = True
            report["checks"] = checks
            report["pass"] = False
            text = dump_report(report)
            if out_path:
                with open(out_path, "w") as handle:
                    handle.write(text)
            else:
                sys.stdout.write(text)
            print("error: no usable bridge points found", file=sys.stderr)
            return EXIT_INCONCLUSIVE
        report["bridge_gauge_sign"] = {
            "residual_with_minus_berry": float(bridge_worst[0]),
            "best_residual_with_plus_berry": float(alt_best),
            "resolved_form": "d_eta - berry (= d_eta + sqrt(2(n-1)/n) u1)",
        }
        checks.extend(
            [
                make_check("bridge-phase", bridge_worst[0], _tol(config, "bridge-phase", 1e-4)),
                make_check("bridge-mixed", bridge_worst[1], _tol(config, "bridge-mixed", 1e-4)),
                make_check("bridge-modulus", bridge_worst[2], _tol(config, "bridge-modulus", 1e-4)),
                make_check("u1-phase-rate", rate_worst, _tol(config, "u1-phase-rate", 1e-6)),
                make_check("u1-frame-component", u1_frame_worst, _tol(config, "u1-frame-component", 1e-8)),
            ]
        )

    return finish_report(report, checks, out_path)


# ---------------------------------------------------------------------------
# su2-demo


def run_su2_demo(grid: int, out_path: str | None, csv_path: str | None) -> int:
    """Closed-form demo on the SU(2) polar chart with the spin-flip pair.

    The amplitude is i sin(chi) sin(theta) e^{i phi}: modulus squared
    sin^2(chi) sin^2(theta), phase phi + pi/2, and |grad eta|^2 = 1/p.
    """
    if grid < 2:
        raise ConfigError("--grid must be >= 2")
    chart = su2_polar_chart()
    pair = StatePair(
        np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)
    )
    chis = np.linspace(0.2, np.pi - 0.2, grid)
    thetas = np.linspace(0.2, np.pi - 0.2, grid)
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)

    rows = []
    worst_p = 0.0
    worst_eta = 0.0
    worst_grad = 0.0
    from .amplitude import principal_angle

    for chi in chis:
        for theta in thetas:
            for phi in phis:
                x = np.array([chi, theta, phi])
                amp = polar_amplitude(pair, chart.evaluate(x))
                grad = phase_gradient(pair, chart, x)
                inv_p = 1.0 / amp.p
                residual = abs(grad.phase_grad_sq - inv_p)
                rows.append(
                    (chi, theta, phi, amp.p, amp.eta, grad.phase_grad_sq, inv_p, residual)
                )
                worst_p = max(worst_p, abs(amp.p - np.sin(chi) ** 2 * np.sin(theta) ** 2))
                worst_eta = max(
                    worst_eta, abs(principal_angle(amp.eta - (phi + np.pi / 2)))
                )
                worst_grad = max(worst_grad, residual)

    if csv_path:
        write_csv(
            csv_path,
            ["chi", "theta", "phi", "p", "eta", "grad_eta_sq", "inv_p", "residual"],
            rows,
        )

    report = base_report("su2-demo", {"grid": grid}, seed=0)
    report["rows"] = len(rows)
    checks = [
        make_check("closed-form-modulus", worst_p, 1e-10),
        make_check("closed-form-phase", worst_eta, 1e-10),
        make_check("gradient-inverse-modulus", worst_grad, 1e-10),
    ]
    return finish_report(report, checks, out_path)


# ---------------------------------------------------------------------------
# superosc


def run_superosc(
    config: SweepConfig,
    samples: int,
    t_min: float,
    t_max: float,
    out_path: str | None,
    csv_path: str | None,
) -> int:
    """Aligned-generator superoscillation report for one state pair."""
    rng = np.random.default_rng(config.seed)
    pair = resolve_pair(config, rng)
    basis = build_gellmann_basis(config.n)
    try:
        gen = aligned_generator(pair, basis)
    except SunPhaseError as exc:
        raise ConfigError(f"cannot align generator: {exc}") from exc
    result = superoscillation_report(pair, gen, t_range=(t_min, t_max), samples=samples)

    if csv_path:
        rows = [
            (t, a.real, a.imag, w if d else float("nan"), int(d))
            for t, a, w, d in zip(
                result.trace.t, result.trace.amplitude, result.trace.omega, result.trace.defined
            )
        ]
        write_csv(csv_path, ["t", "re_amplitude", "im_amplitude", "omega", "defined"], rows)

    report = base_report("superosc", config.echo(), config.seed)
    report["samples"] = samples
    report["t_range"] = [t_min, t_max]
    report["omega_zero"] = result.omega_zero
    report["max_abs_eigenvalue"] = result.max_abs_eigenvalue
    report["gradient_bound"] = result.gradient_bound
    report["boundary_case"] = result.boundary
    report["superoscillatory_intervals"] = [[a, b] for a, b in result.intervals]
    report["spectrum"] = [
        {"eigenvalue": float(l), "abs_coefficient": float(abs(c))}
        for l, c in zip(result.trace.eigenvalues, result.trace.fourier_c)
    ]
    flagged = int(np.sum(~result.trace.defined))
    report["flagged_samples"] = flagged

    rebuilt = np.einsum(
        "k,sk->s",
        result.trace.fourier_c,
        np.exp(1j * np.outer(result.trace.t, result.trace.eigenvalues)),
    )
    fourier_residual = float(np.max(np.abs(rebuilt - result.trace.amplitude)))

    checks = [
        make_check(
            "superoscillatory-at-zero",
            max(0.0, result.max_abs_eigenvalue - result.omega_zero),
            1e-9,
        ),
        make_check(
            "eigenvalue-cap",
            max(0.0, result.max_abs_eigenvalue - result.gradient_bound),
            1e-9,
        ),
        make_check("fourier-reconstruction", fourier_residual, 1e-9),
    ]
    return finish_report(report, checks, out_path)


# ---------------------------------------------------------------------------
# vortex


def build_loop(kind: str, chi: float, theta: float, phi: float, samples: int, reverse: bool):
    # 64 samples guarantee unambiguous unwrapping for unit-winding loops;
    # anything coarser is refined adaptively anyway, but keep the floor
    if samples < 64:
        raise ConfigError("--samples must be >= 64")
    if kind == "phi-circle":
        phis = np.linspace(0.0, 2 * np.pi, samples + 1)
        loop = [np.array([chi, theta, p]) for p in phis]
    elif kind == "contractible":
        ts = np.linspace(0.0, 2 * np.pi, samples + 1)
        radius = 0.25
        loop = [
            np.array([chi + radius * np.cos(t), theta + radius * np.sin(t), phi])
            for t in ts
        ]
    else:
        raise ConfigError(f"unknown loop kind '{kind}'")
    if reverse:
        loop = loop[::-1]
    return loop


def run_vortex(
    kind: str,
    chi: float,
    theta: float,
    phi: float,
    samples: int,
    reverse: bool,
    expect: int | None,
    out_path: str | None,
) -> int:
    """Winding of the spin-flip amplitude phase around a loop on SU(2)."""
    chart = su2_polar_chart()
    pair = StatePair(
        np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)
    )
    loop = build_loop(kind, chi, theta, phi, samples, reverse)
    winding = vortex_winding(pair, chart, loop)

    config_echo = {
        "loop": kind,
        "chi": chi,
        "theta": theta,
        "phi": phi,
        "samples": samples,
        "reverse": reverse,
    }
    report = base_report("vortex", config_echo, seed=0)
    report["winding"] = winding
    steps = []
    from .amplitude import principal_angle

    etas = [polar_amplitude(pair, chart.evaluate(x)).eta for x in loop]
    for a, b in zip(etas, etas[1:]):
        steps.append(abs(principal_angle(b - a)))
    report["max_phase_step"] = float(max(steps))
    report["loop_points"] = len(loop)

    checks = []
    if expect is not None:
        checks.append(make_check("winding", abs(winding - expect), 0.0))
    return finish_report(report, checks, out_path)


# ---------------------------------------------------------------------------
# argument parsing


def _add_sweep_args(sub, default_points: int):
    sub.add_argument("--n", type=int, required=True, help="group dimension (>= 2)")
    sub.add_argument("--points", type=int, default=default_points)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument(
        "--pair",
        choices=["random", "spin-flip", "explicit"],
        default="random",
        help="state pair: fresh random states per point, the first two "
        "standard basis vectors, or explicit --psi-i/--psi-f",
    )
    sub.add_argument("--psi-i", help="comma-separated complex entries")
    sub.add_argument("--psi-f", help="comma-separated complex entries")
    sub.add_argument(
        "--sample-scale",
        type=float,
        default=1.0,
        help="shrink the sampling box about its center (diagnostics)",
    )
    sub.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a named check tolerance (repeatable)",
    )
    sub.add_argument("--per-point", action="store_true")
    sub.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sun-phase",
        description="Numerical verification of phase/modulus gradient "
        "identities for SU(n) transition amplitudes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    group = commands.add_parser(
        "verify-group", help="sweep the group-manifold gradient identities"
    )
    _add_sweep_args(group, default_points=200)
    group.add_argument("--chart", choices=["exp", "su2-polar", "cartan"], default="exp")

    ray = commands.add_parser(
        "verify-ray", help="sweep the ray-space identities and bridge checks"
    )
    _add_sweep_args(ray, default_points=100)
    ray.add_argument("--bridge-points", type=int, default=50)

    demo = commands.add_parser("su2-demo", help="closed-form SU(2) grid demo")
    demo.add_argument("--grid", type=int, default=20)
    demo.add_argument("--out")
    demo.add_argument("--csv")

    osc = commands.add_parser("superosc", help="aligned-generator phase trace")
    osc.add_argument("--n", type=int, required=True)
    osc.add_argument("--seed", type=int, default=0)
    osc.add_argument("--pair", choices=["random", "spin-flip", "explicit"], default="random")
    osc.add_argument("--psi-i")
    osc.add_argument("--psi-f")
    osc.add_argument("--samples", type=int, default=1024)
    osc.add_argument("--t-min", type=float, default=-np.pi)
    osc.add_argument("--t-max", type=float, default=np.pi)
    osc.add_argument("--out")
    osc.add_argument("--csv")

    vortex = commands.add_parser("vortex", help="phase winding around a loop")
    vortex.add_argument("--loop", choices=["phi-circle", "contractible"], default="phi-circle")
    vortex.add_argument("--chi", type=float, default=np.pi / 2)
    vortex.add_argument("--theta", type=float, default=0.1)
    vortex.add_argument("--phi", type=float, default=0.3)
    vortex.add_argument("--samples", type=int, default=64)
    vortex.add_argument("--reverse", action="store_true")
    vortex.add_argument("--expect", type=int)
    vortex.add_argument("--out")
    return parser


def _parse_tolerances(entries: list[str]) -> dict:
    out = {}
    for entry in entries:
        if "=" not in entry:
            raise ConfigError(f"--tol expects NAME=VALUE, got '{entry}'")
        name, _, value = entry.partition("=")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in '{entry}'") from exc
    return out


def _config_from_args(args) -> SweepConfig:
    if args.n < 2:
        raise ConfigError("--n must be >= 2")
    config = SweepConfig(
        n=args.n,
        points=getattr(args, "points", 1),
        seed=args.seed,
        pair_kind=args.pair,
        sample_scale=getattr(args, "sample_scale", 1.0),
        tolerances=_parse_tolerances(getattr(args, "tol", [])),
        per_point=getattr(args, "per_point", False),
    )
    if hasattr(args, "chart"):
        config.chart = args.chart
    if args.pair == "explicit":
        if not args.psi_i or not args.psi_f:
            raise ConfigError("--pair explicit requires --psi-i and --psi-f")
        config.psi_i = _parse_state(args.psi_i, args.n, "--psi-i")
        config.psi_f = _parse_state(args.psi_f, args.n, "--psi-f")
    return config


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "verify-group":
            return run_group_sweep(_config_from_args(args), out_path=args.out)
        if args.command == "verify-ray":
            return run_ray_sweep(
                _config_from_args(args), bridge_points=args.bridge_points, out_path=args.out
            )
        if args.command == "su2-demo":
            return run_su2_demo(args.grid, out_path=args.out, csv_path=args.csv)
        if args.command == "superosc":
            config = SweepConfig(n=args.n, seed=args.seed, pair_kind=args.pair)
            if args.pair == "explicit":
                if not args.psi_i or not args.psi_f:
                    raise ConfigError("--pair explicit requires --psi-i and --psi-f")
                config.psi_i = _parse_state(args.psi_i, args.n, "--psi-i")
                config.psi_f = _parse_state(args.psi_f, args.n, "--psi-f")
            if args.n < 2:
                raise ConfigError("--n must be >= 2")
            return run_superosc(
                config, args.samples, args.t_min, args.t_max, args.out, args.csv
            )
        if args.command == "vortex":
            return run_vortex(
                args.loop,
                args.chi,
                args.theta,
                args.phi,
                args.samples,
                args.reverse,
                args.expect,
                args.out,
            )
        raise ConfigError(f"unknown command '{args.command}'")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
