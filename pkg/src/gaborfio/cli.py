"""Experiment runner.

    gaborfio run <config.json> [--set key=value]... [--threads N] [--out DIR]

The config is a flat JSON document; ``--set`` overrides use dotted paths
(``--set model.L=128``, ``--set operator=dft``).  One experiment per process;
all randomness comes from a single counter-based Philox generator seeded by
``seed``, so identical configs produce byte-identical reports apart from the
"timings" block.

Exit codes: 0 = all pass flags true, 1 = a verification failed or the
pipeline raised, 2 = the config did not parse or validate.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import time
from pathlib import Path

DEFAULT_CONFIG = {
    "model": {"L": 64, "regime": "A", "T": None},
    "frame": {"a": None, "b": None, "window": "gaussian", "density": 4},
    "operator": "chirp:1",
    "pipeline": "decay",
    "thresholds": {"s_threshold": 3.0, "offgrid_ratio_max": 10.0},
    "seed": 0,
    "offgrid": {"s": 4.0, "n_offsets": 3},
    "sweep": {"tau_grid": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10],
              "repeats": 5, "probes": 4},
    "symbol_class": {"s": 2.0},
    "word": None,
    "output": {"matrix_csv": False},
}

PIPELINES = ("gabor-matrix", "decay", "compose", "invert", "factorize",
             "symbol-class", "sparsity-sweep", "offgrid")


def _set_path(cfg: dict, dotted: str, raw: str) -> None:
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def load_config(path: str, overrides=()) -> dict:
    from .errors import ConfigError
    try:
        with open(path) as fh:
            user = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    for section, value in user.items():
        if isinstance(value, dict) and isinstance(cfg.get(section), dict):
            cfg[section].update(value)
        else:
            cfg[section] = value
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        _set_path(cfg, *item.split("=", 1))
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    from .errors import ConfigError
    m = cfg.get("model", {})
    L = m.get("L")
    if not isinstance(L, int) or L < 8 or L % 2:
        raise ConfigError(f"model.L must be an even integer >= 8, got {L!r}")
    if m.get("regime") not in ("A", "B"):
        raise ConfigError(f"model.regime must be 'A' or 'B', got {m.get('regime')!r}")
    fr = cfg.get("frame", {})
    for key in ("a", "b"):
        v = fr.get(key)
        if v is not None and (not isinstance(v, int) or v <= 0 or L % v):
            raise ConfigError(f"frame.{key} must divide L={L}, got {v!r}")
    if cfg.get("pipeline") not in PIPELINES:
        raise ConfigError(f"pipeline must be one of {PIPELINES}, got {cfg.get('pipeline')!r}")
    if not isinstance(cfg.get("seed"), int):
        raise ConfigError("seed must be an integer")


# ---------------------------------------------------------------------------
# operator specs
# ---------------------------------------------------------------------------

def _parse_symbol(spec: str, config, rng):
    from . import operators as ops
    from .errors import ConfigError
    if spec == "ones":
        return ops.symbol_ones(config)
    if spec.startswith("random-smooth"):
        parts = spec.split(":")
        seed = int(parts[1]) if len(parts) > 1 else 0
        bandwidth = int(parts[2]) if len(parts) > 2 else 2
        import numpy as np
        local = np.random.Generator(np.random.Philox(seed))
        return ops.random_smooth_symbol(config, local, bandwidth=bandwidth)
    raise ConfigError(f"unknown symbol spec {spec!r}")


def _phase_for(config, phase_spec: str):
    """A DiscretePhase for a catalog phase name, exact where possible."""
    from . import operators as ops
    from . import phasegeom as pg
    if config.regime == "A":
        if phase_spec == "kn":
            return ops.kn_phase(config)
        head, _, arg = phase_spec.partition(":")
        if head == "chirp" and float(arg) == int(float(arg)):
            return ops.quadratic_phase(config, int(float(arg)), 1, 0)
        if head == "metaplectic":
            a, b, c, d = (float(t) for t in arg.split(","))
            M = pg.SymplecticMatrix([[a, b], [c, d]])
            phi = pg.phase_of_symplectic(M)      # raises NondegeneracyViolation at A=0
            coeffs = (c / a, 1 / a, -b / a)
            if all(x == int(x) for x in coeffs):
                return ops.quadratic_phase(config, *(int(x) for x in coeffs))
            return ops.discrete_phase_from_tame(phi, config)
    return ops.discrete_phase_from_tame(pg.tame_phase(phase_spec), config)


def _parse_atom(atom: str, config, rng):
    """One operator atom -> (OperatorMatrix, CanonicalMap)."""
    import numpy as np

    from . import operators as ops
    from . import phasegeom as pg
    from .errors import ConfigError

    I2 = pg.linear_map(np.eye(2), source="identity")
    head, _, rest = atom.partition(":")
    if head == "identity":
        return ops.identity_operator(config), I2
    if head == "dft":
        return ops.dft_operator(config), pg.linear_map([[0., 1.], [-1., 0.]], "dft",
                                                       mod_L=config.L)
    if head == "chirp":
        c = int(rest)
        return ops.chirp_operator(config, c), pg.linear_map([[1., 0.], [float(c), 1.]],
                                                            f"chirp:{c}",
                                                            mod_L=config.L)
    if head == "dilate":
        u = int(rest)
        chi = pg.linear_map([[float(u % config.L), 0.],
                             [0., float(pow(u % config.L, -1, config.L))]],
                            f"dilate:{u}", mod_L=config.L)
        return ops.dilation_operator(config, u), chi
    if head == "multiplier":
        return ops.multiplier_operator(config, float(rest)), I2
    if head == "perturb-id":
        parts = rest.split(":")
        eps = float(parts[0])
        seed = int(parts[1]) if len(parts) > 1 else 0
        local = np.random.Generator(np.random.Philox(seed))
        S = ops.kn_quantize(ops.random_smooth_symbol(config, local))
        S = ops.OperatorMatrix(S.entries / S.norm2(), config, tag="kn")
        T = ops.OperatorMatrix(np.eye(config.L) + eps * S.entries, config, tag="kn")
        return T, I2
    if head == "metaplectic":
        phi = _phase_for(config, atom)
        T = ops.fio_type1(phi, ops.symbol_ones(config))
        a, b, c, d = (float(t) for t in rest.split(","))
        return T, pg.linear_map([[a, b], [c, d]], atom)
    if head == "kn":
        if not rest.startswith("symbol="):
            raise ConfigError(f"kn atom needs symbol=..., got {atom!r}")
        return ops.kn_quantize(_parse_symbol(rest[len("symbol="):], config, rng)), I2
    if head in ("fio1", "fio2"):
        if not rest.startswith("phase="):
            raise ConfigError(f"{head} atom needs phase=...,symbol=..., got {atom!r}")
        body = rest[len("phase="):]
        phase_spec, sep, sym_spec = body.partition(",symbol=")
        if not sep:
            raise ConfigError(f"{head} atom needs ',symbol=' in {atom!r}")
        phi = _phase_for(config, phase_spec)
        sigma = _parse_symbol(sym_spec, config, rng)
        chi = phi.canonical_map()
        if head == "fio1":
            return ops.fio_type1(phi, sigma), chi
        return ops.fio_type2(phi, sigma), chi.inverse()
    raise ConfigError(f"unknown operator atom {atom!r}")


def parse_operator(spec: str, config, rng):
    """'A*B*...' -> (product OperatorMatrix, composed CanonicalMap, atom list)."""
    from . import operators as ops
    from . import phasegeom as pg
    atoms = [a.strip() for a in spec.split("*") if a.strip()]
    if not atoms:
        from .errors import ConfigError
        raise ConfigError("empty operator spec")
    parsed = [_parse_atom(a, config, rng) for a in atoms]
    T = parsed[0][0]
    chi = parsed[0][1]
    for Ti, chii in parsed[1:]:
        T = ops.compose(T, Ti)
        chi = pg.compose_maps(chi, chii)
    return T, chi, parsed


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def run_experiment(cfg: dict, out_dir: str) -> int:
    """Execute the configured pipeline; write report files; return exit code."""
    import numpy as np

    from . import algebra, gabor, gabormatrix as gm, tfcore
    from .errors import ConfigError, GaborFIOError

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {"pipeline": cfg["pipeline"], "config": cfg, "pass": False}
    timings = {}
    t_start = time.monotonic()

    try:
        m = cfg["model"]
        config = tfcore.ModelConfig(L=m["L"], regime=m["regime"],
                                    T=m.get("T") if m["regime"] == "B" else None)
        rng = np.random.Generator(np.random.Philox(cfg["seed"]))
        if cfg["frame"]["window"] != "gaussian":
            raise ConfigError(f"unknown window {cfg['frame']['window']!r}")
        g = tfcore.periodized_gaussian(config)
        if cfg["frame"]["a"] is not None and cfg["frame"]["b"] is not None:
            lat = gabor.Lattice(cfg["frame"]["a"], cfg["frame"]["b"], config)
        else:
            lat = gabor.default_lattice(config, cfg["frame"].get("density", 4))
        frame = gabor.build_frame(g, lat)
        report["frame"] = {"a": lat.a, "b": lat.b, "density": lat.density,
                           "bounds": list(frame.bounds)}

        T, chi, parsed = parse_operator(cfg["operator"], config, rng)
        thresholds = cfg["thresholds"]
        pipeline = cfg["pipeline"]

        if pipeline == "gabor-matrix":
            K = gm.gabor_matrix(T, frame, chi=chi)
            report["peak"] = float(np.abs(K.entries).max())
            report["schur_bound"] = gm.schur_bound(K)
            gm.gabor_matrix_to_csv(K, out / "matrix.csv")
            report["pass"] = True

        elif pipeline == "decay":
            K = gm.gabor_matrix(T, frame)
            prof = gm.decay_profile(K, chi)
            gm.profile_to_csv(prof, out / "profile.csv")
            report.update(s_fit=prof.s_fit, C_fit=prof.C_fit, r2=prof.r2,
                          chi=chi.source)
            report["pass"] = bool(prof.s_fit >= thresholds["s_threshold"])
            if cfg["output"].get("matrix_csv"):
                gm.gabor_matrix_to_csv(K, out / "matrix.csv")

        elif pipeline == "compose":
            if len(parsed) < 2:
                raise ConfigError("compose pipeline needs 'A*B' in operator")
            (T1, chi1), (T2, chi2) = parsed[0], parsed[1]
            for Ti, chii in parsed[2:]:
                from .operators import compose as _c
                from .phasegeom import compose_maps as _cm
                T2, chi2 = _c(T2, Ti), _cm(chi2, chii)
            rep = algebra.verify_composition(T1, T2, chi1, chi2, frame,
                                             thresholds["s_threshold"])
            (out / "report_algebra.json").write_text(rep.to_json())
            gm.profile_to_csv(rep.profile, out / "profile.csv")
            report.update(s_fit=rep.s_fit, C_fit=rep.C_fit,
                          diagnostics=rep.diagnostics)
            report["pass"] = rep.passed

        elif pipeline == "invert":
            rep = algebra.verify_inverse(T, chi, frame, thresholds["s_threshold"])
            (out / "report_algebra.json").write_text(rep.to_json())
            gm.profile_to_csv(rep.profile, out / "profile.csv")
            report.update(s_fit=rep.s_fit, C_fit=rep.C_fit,
                          diagnostics=rep.diagnostics)
            report["pass"] = rep.passed

        elif pipeline == "factorize":
            from .operators import MetaplecticWord
            word_spec = cfg.get("word") or []
            gens = []
            for tok in word_spec:
                head, _, arg = tok.partition(":")
                gens.append((head,) if not arg else (head, int(arg)))
            word = MetaplecticWord(tuple(gens), config)
            sigma1, rep = algebra.factorize_metaplectic(T, word, frame,
                                                        thresholds["s_threshold"])
            (out / "report_algebra.json").write_text(rep.to_json())
            gm.profile_to_csv(rep.profile, out / "profile.csv")
            report.update(s_fit=rep.s_fit, diagnostics=rep.diagnostics)
            report["pass"] = rep.passed

        elif pipeline == "symbol-class":
            from .operators import kn_symbol_of
            sc = gm.symbol_class_norm(kn_symbol_of(T), cfg["symbol_class"]["s"])
            report.update(norm=sc.norm, s_sym=sc.s_sym)
            report["pass"] = bool(np.isfinite(sc.norm))

        elif pipeline == "offgrid":
            og = cfg["offgrid"]
            rep = gm.offgrid_decay_check(T, frame, chi, s=og["s"],
                                         n_offsets=og["n_offsets"])
            report.update(C_lattice=rep.C_lattice, C_offgrid=rep.C_offgrid,
                          ratio=rep.ratio, offsets=rep.offsets)
            report["pass"] = bool(rep.ratio <= thresholds["offgrid_ratio_max"])

        elif pipeline == "sparsity-sweep":
            rows, ok = sparsity_sweep(cfg, frame, T, chi, rng, out)
            report["rows"] = rows
            report["pass"] = ok

        report["error"] = None
    except ConfigError:
        raise
    except GaborFIOError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["pass"] = False

    timings["total_s"] = time.monotonic() - t_start
    report["timings"] = timings
    (out / "report.json").write_text(json.dumps(report, indent=2, default=str))
    return 0 if report["pass"] else 1


def sparsity_sweep(cfg, frame, T, chi, rng, out: Path):
    """Threshold sweep: per row, the measured apply error must not exceed the
    dropped Schur mass (the gate); kept fraction and timings are reported."""
    import numpy as np

    from . import gabormatrix as gm
    from .gabor import CoefficientArray

    K = gm.gabor_matrix(T, frame, chi=chi)
    dense = K.entries
    lat = frame.lattice
    probes = [rng.normal(size=lat.size) + 1j * rng.normal(size=lat.size)
              for _ in range(cfg["sweep"]["probes"])]
    repeats = max(int(cfg["sweep"]["repeats"]), 5)
    rows = []
    all_ok = True
    for tau in cfg["sweep"]["tau_grid"]:
        Ks = gm.sparsify(K, tau)
        rel_err = 0.0
        for p in probes:
            err = np.linalg.norm(dense @ p - Ks.matrix @ p) / np.linalg.norm(p)
            rel_err = max(rel_err, float(err))
        t_dense = _median_time(lambda: dense @ probes[0], repeats)
        t_sparse = _median_time(lambda: Ks.matrix @ probes[0], repeats)
        ok = rel_err <= Ks.dropped_schur_mass + 1e-15
        all_ok &= ok
        rows.append({"tau": tau, "kept_fraction": Ks.kept_fraction,
                     "schur_residual": Ks.dropped_schur_mass,
                     "measured_rel_error": rel_err,
                     "dense_ms": t_dense * 1e3, "sparse_ms": t_sparse * 1e3})
    with open(out / "sweep.csv", "w") as fh:
        fh.write("tau,kept_fraction,schur_residual,measured_rel_error,dense_ms,sparse_ms\n")
        for r in rows:
            fh.write(f"{r['tau']:.3e},{r['kept_fraction']:.6f},"
                     f"{r['schur_residual']:.6e},{r['measured_rel_error']:.6e},"
                     f"{r['dense_ms']:.4f},{r['sparse_ms']:.4f}\n")
    return rows, all_ok


def _median_time(fn, repeats: int) -> float:
    import statistics
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gaborfio",
                                     description="Gabor-matrix FIO experiments")
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("config")
    runp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                      help="override a config entry (dotted path)")
    runp.add_argument("--threads", type=int, default=None,
                      help="cap worker threads (BLAS/FFT pools)")
    runp.add_argument("--out", default="out", help="output directory")
    args = parser.parse_args(argv)

    if args.command != "run":
        parser.print_help()
        return 2

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))

    from .errors import ConfigError
    try:
        cfg = load_config(args.config, args.set)
        return run_experiment(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
