"""Command-line front end: ``python3 -m vclab <subcommand> ...``.

Every run writes into ``<out>/<subcommand>/<timestamp>/``: CSV tables (or JSON
with ``--format json``), ``config.json`` with the resolved configuration and
``summary.txt``.  Exit codes: 0 success, 1 criterion violated (``repro``),
2 configuration error.
"""

import argparse
import json
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .core import ContractViolation
from .seeding import resolve_seed

SUBCOMMANDS = ("shatter", "vcdim", "dual", "lemma1", "cover", "ulln", "certify", "repro")


@dataclass
class ExperimentConfig:
    subcommand: str
    family: Optional[dict] = None
    seed: Optional[int] = None
    n: List[int] = field(default_factory=list)
    point_sets: int = 20
    param_budget: int = 20_000
    budget_dim: int = 8
    reps: int = 50
    eps: List[float] = field(default_factory=list)
    p: int = 1
    m: Optional[int] = None
    d: Optional[int] = None
    target: Optional[str] = None
    level: Optional[str] = None
    out: str = "runs"
    jobs: int = 1
    format: str = "csv"

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        bad = set(d) - known
        if bad:
            raise ContractViolation(f"unknown config keys: {', '.join(sorted(bad))}")
        return cls(**d)


class ConfigError(Exception):
    pass


def parse_int_list(text):
    """``"64"``, ``"8,16,32"``, ``"8:256"`` (inclusive) or ``"8:256:8"``."""
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                step = bits[2] if len(bits) == 3 else 1
                out.extend(range(bits[0], bits[1] + 1, step))
            else:
                out.append(int(part))
    except (ValueError, IndexError):
        raise ConfigError(f"cannot parse size list {text!r}") from None
    return out


def _family_from_args(args, cfg_family):
    from .families import make_family
    if args.family is None:
        if cfg_family is None:
            return None
        return cfg_family
    p = Path(args.family)
    if p.suffix == ".json" and p.exists():
        return json.loads(p.read_text())
    fixed = {}
    for key in ("k", "N", "m", "d", "variant", "G"):
        v = getattr(args, key, None)
        if v is not None:
            fixed[key] = v
    desc = {"family": args.family, "fixed": fixed}
    make_family(desc)  # validate early
    return desc


def build_config(args) -> ExperimentConfig:
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    base["subcommand"] = args.cmd
    cfg = ExperimentConfig.from_dict(base)
    cfg.family = _family_from_args(args, cfg.family)
    cfg.seed = resolve_seed(args.seed if args.seed is not None else cfg.seed)
    for name in ("point_sets", "param_budget", "budget_dim", "reps", "p", "m", "d", "jobs", "format", "out",
                 "level"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "n", None):
        cfg.n = parse_int_list(args.n)
    if getattr(args, "eps", None):
        try:
            cfg.eps = [float(e) for e in args.eps.split(",")]
        except ValueError:
            raise ConfigError(f"cannot parse radii {args.eps!r}") from None
    if getattr(args, "target", None):
        cfg.target = args.target
    return cfg


def output_dir(cfg: ExperimentConfig) -> Path:
    base = Path(cfg.out) / cfg.subcommand
    stamp = time.strftime("%Y%m%dT%H%M%S")
    d = base / stamp
    i = 1
    while d.exists():
        d = base / f"{stamp}-{i}"
        i += 1
    d.mkdir(parents=True)
    return d


def _write_table(out: Path, name, header, rows, fmt):
    from .criteria import write_csv
    if fmt == "json":
        path = out / f"{name}.json"
        path.write_text(json.dumps([dict(zip(header, r)) for r in rows], indent=2, default=_plain))
        return path
    return write_csv(out, f"{name}.csv", header, rows)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _need_family(cfg):
    from .families import make_family
    if cfg.family is None:
        raise ConfigError(f"{cfg.subcommand} needs --family (or a 'family' entry in --config)")
    return make_family(cfg.family)


# ---------------------------------------------------------------------------
# subcommands

def cmd_shatter(cfg, out):
    from .shatter import fit_density, shatter_profile
    fam = _need_family(cfg)
    grid = cfg.n or [8, 16, 32, 64]
    prof = shatter_profile(fam, grid, cfg.seed, point_sets=cfg.point_sets, param_budget=cfg.param_budget,
                           jobs=cfg.jobs)
    _write_table(out, "shatter", ["n", "delta_hat", "method"], prof.csv_rows(), cfg.format)
    lines = [f"{fam.name}: n={e.n} delta_hat={e.delta_hat} ({e.method})" for e in prof.entries]
    if len(grid) >= 4 and max(grid) >= 10 * min(grid):
        expo, const, r2 = fit_density(prof)
        lines.append(f"fitted density exponent {expo:.3f} (r2 {r2:.3f})")
    (out / "profile.json").write_text(prof.to_json())
    return 0, lines


def cmd_vcdim(cfg, out):
    from .shatter import vc_dim
    fam = _need_family(cfg)
    res = vc_dim(fam, cfg.budget_dim, cfg.seed, param_budget=cfg.param_budget)
    rows = [] if res.witness is None else [tuple(p) for p in res.witness.points]
    _write_table(out, "witness", [f"x{j}" for j in range(fam.point_dim)], rows, cfg.format)
    return 0, [f"{fam.name}: vc_dim {res.label} ({res.method})"]


def cmd_dual(cfg, out):
    from .shatter import dual_shatter
    fam = _need_family(cfg)
    ms = cfg.n or ([cfg.m] if cfg.m else [1, 2, 4, 8, 16])
    rows = [(m, dual_shatter(fam, cfg.seed, m)) for m in ms]
    _write_table(out, "dual", ["m", "atoms_lower_bound"], rows, cfg.format)
    return 0, [f"{fam.name}: m={m} atoms>={a}" for m, a in rows]


def cmd_lemma1(cfg, out):
    from .dual_interval import lemma1_counts
    from .families import tlambda_family
    from .seeding import derive_rng
    fam = tlambda_family()
    sets = cfg.point_sets
    rows, lines = [], []
    for n in cfg.n or [2, 5, 10, 50, 100, 200]:
        pts = [fam.sample_points(derive_rng(cfg.seed, "lemma1", n, j), n) for j in range(sets)]
        counts, _ = lemma1_counts(pts)
        rows.extend((n, j, c, n + 1) for j, c in enumerate(counts))
        lines.append(f"n={n}: max traces {max(counts)} (bound {n + 1}), violations {sum(c > n + 1 for c in counts)}")
    _write_table(out, "lemma1", ["n", "set", "count", "bound"], rows, cfg.format)
    return 0, lines


def cmd_cover(cfg, out):
    from .criteria import cover_curve
    from .entropy import SATURATION_FRACTION, certificate_compare, fit_cover_exponent
    fam = _need_family(cfg)
    if not fam.is_function_class:
        raise ConfigError(f"{fam.name} has no evaluator; cover needs a function class")
    k_in = fam.input_dim

    def q_sampler(rng):
        return fam.sample_points(rng, 200)[:, :k_in]

    curve = cover_curve(fam, cfg.seed, cfg.m or 1500, q_sampler)
    if cfg.eps:
        from .entropy import EmpiricalMeasure, entropy_curve, max_over_measures
        from .seeding import derive_rng
        P = fam.sample_params(derive_rng(cfg.seed, "cover-params", fam.name), cfg.m or 1500)
        curve = max_over_measures(
            entropy_curve(fam, P, EmpiricalMeasure(q_sampler(derive_rng(cfg.seed, "cover-Q", fam.name, j))),
                          eps_rel=cfg.eps, p=cfg.p) for j in range(3))
    _write_table(out, "cover", ["epsilon", "n_cover", "n_pack_lower"], curve.csv_rows(), cfg.format)
    lines = [f"{fam.name}: {len(curve.entries)} radii, envelope norm {curve.envelope_norm:.4g}"]
    try:
        fit = fit_cover_exponent(curve, max_fraction=SATURATION_FRACTION)
    except ContractViolation as exc:
        lines.append(f"no fit: {exc}")
        return 0, lines
    lines.append(f"B_hat {fit.B_hat:.3f} (r2 {fit.r2:.3f}); better form: {fit.better}")
    d = cfg.d if cfg.d is not None else fam.density_bound
    if d is not None:
        rep = certificate_compare(curve, d, fit=fit)
        (out / "certificate_check.json").write_text(rep.to_json())
        lines.append(f"certificate d={d}: {rep.verdict}")
        if rep.violations:
            return 1, lines
    return 0, lines


def cmd_ulln(cfg, out):
    from .seeding import derive_rng
    from .ulln import DataLaw, fit_rate, link_param_grid, quantile_trend, run_ulln, summary_json, tlambda_grid
    fam = _need_family(cfg)
    if fam.kind == "tlambda":
        law, grid = DataLaw("uniform", (0.5,), (2.0,)), tlambda_grid(0.01)
    elif fam.kind == "piecewise_link" and fam.info["d"] == 2:
        law, grid = DataLaw("uniform", (-1.0, -1.0), (1.0, 1.0)), link_param_grid(fam.info["k"], 16)
    else:
        d = fam.input_dim
        law = DataLaw("uniform", (-1.0,) * d, (1.0,) * d)
        grid = fam.sample_params(derive_rng(cfg.seed, "ulln-grid", fam.name), cfg.m or 200)
    n_grid = cfg.n or [100, 316, 1000, 3162, 10000]
    run = run_ulln(fam, grid, law, n_grid, cfg.reps, cfg.seed, jobs=cfg.jobs)
    _write_table(out, "ulln", ["n", "rep", "sup_dev"], run.csv_rows(), cfg.format)
    lines = [f"{fam.name}: n={n} median sup_dev {m:.4g}" for n, m in zip(run.n_grid, run.medians())]
    if len(n_grid) >= 5 and max(n_grid) >= 100 * min(n_grid):
        fit = fit_rate(run)
        (out / "summary.json").write_text(summary_json(run, fit))
        lines.append(f"alpha {fit.alpha:.3f}, ratio non-increasing: {fit.ratio_nonincreasing}, "
                     f"0.9-quantile decreases: {quantile_trend(run)[0]}")
    return 0, lines


def cmd_certify(cfg, out):
    from .dsl import certify, resolve_formula
    if not cfg.target:
        raise ConfigError("certify needs a formula file or shipped formula name")
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        f = resolve_formula(cfg.target, level=cfg.level)
    cert = certify(f)
    text = cert.to_json()
    (out / "certificate.json").write_text(text + "\n")
    print(text)
    return 0, [f"{cert.formula_id}: d={cert.d} at {cert.level}"]


def cmd_repro(cfg, out):
    from .criteria import CRITERIA, run_criterion
    if not cfg.target:
        raise ConfigError(f"repro needs a criterion id: {', '.join(CRITERIA)} or all")
    ids = list(CRITERIA) if cfg.target == "all" else [cfg.target]
    if any(i not in CRITERIA for i in ids):
        raise ConfigError(f"unknown criterion {cfg.target!r}; choose from {', '.join(CRITERIA)} or all")
    lines, ok = [], True
    for cid in ids:
        res = run_criterion(cid, cfg.seed, out / cid if len(ids) > 1 else out, cfg.jobs)
        lines.append(res.line())
        ok &= res.passed
    return (0 if ok else 1), lines


COMMANDS = {"shatter": cmd_shatter, "vcdim": cmd_vcdim, "dual": cmd_dual, "lemma1": cmd_lemma1,
            "cover": cmd_cover, "ulln": cmd_ulln, "certify": cmd_certify, "repro": cmd_repro}


def make_parser():
    ap = argparse.ArgumentParser(prog="vclab", description="Shatter functions, VC-density and metric entropy.")
    ap.add_argument("--version", action="version", version=f"vclab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        if name in ("certify", "repro"):
            sp.add_argument("target", help="formula path or shipped name" if name == "certify" else
                            "criterion id or 'all'")
        sp.add_argument("--family", help="family name or path to a JSON descriptor")
        sp.add_argument("--config", help="JSON file with ExperimentConfig fields")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n", help="sizes: 64, 8,16,32 or 8:256[:step]")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--k", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--G", type=int)
        sp.add_argument("--variant", choices=("upper", "lower", "all"))
        sp.add_argument("--point-sets", dest="point_sets", type=int)
        sp.add_argument("--param-budget", dest="param_budget", type=int)
        sp.add_argument("--budget-dim", dest="budget_dim", type=int)
        sp.add_argument("--reps", type=int)
        sp.add_argument("--eps", help="comma-separated relative radii")
        sp.add_argument("--p", type=int, choices=(1, 2))
        sp.add_argument("--level", choices=("R_alg", "R_exp", "R_an_exp", "R_an_Pfaff"))
    return ap


def run(argv=None) -> int:
    from .dsl import DslError
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        out = output_dir(cfg)
        (out / "config.json").write_text(cfg.to_json() + "\n")
        code, lines = COMMANDS[cfg.subcommand](cfg, out)
    except (ConfigError, ContractViolation, DslError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    print(f"output: {out}")
    return code


def main():
    sys.exit(run())
