"""Command line front end.

Exit codes: 0 every claim verified, 1 some claim falsified, 2 some claim
inconclusive, 3 bad configuration or usage.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import List, Optional

from . import __version__, linalg
from .certify import (
    FALSIFIED,
    INCONCLUSIVE,
    VERIFIED,
    ambient_h0,
    certify_bookkeeping,
    certify_composition,
    certify_homogeneity,
    certify_rank,
    certify_simplicity,
    certify_stability,
    combine,
)
from .cohom import LineBundleSum, euler_characteristic, sum_cohomology
from .monad import PROFILES, ProfileError, build_monad, kernel_invariants
from .oracle import DEFAULT_BUDGET, OracleRefused, h0_wedge_kernel
from .picard import Polarization, SpaceSpec
from .polyalg import dump_matrix

EXIT_CODES = {VERIFIED: 0, FALSIFIED: 1, INCONCLUSIVE: 2}
EXIT_USAGE = 3
SAFE_INT = 2 ** 53

DEFAULTS = {
    "alpha": None, "profile": "paper", "a": None, "overrides": None, "prime": linalg.DEFAULT_PRIME,
    "seed": 0, "trials": 100, "budget": DEFAULT_BUDGET, "max_q": None,
}
KNOWN_FIELDS = {"s", "n", "k"} | set(DEFAULTS)


class ConfigError(ValueError):
    def __init__(self, field: str, msg: str):
        super().__init__(f"config field '{field}': {msg}")
        self.field = field


def _int(cfg, name, lo=None):
    v = cfg.get(name)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(name, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(name, f"must be >= {lo}, got {v}")
    return v


def _int_list(cfg, name, length, lo=None):
    v = cfg.get(name)
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise ConfigError(name, f"expected a list of integers, got {v!r}")
    if len(v) != length:
        raise ConfigError(name, f"has length {len(v)}, expected s = {length}")
    if lo is not None and any(x < lo for x in v):
        raise ConfigError(name, f"entries must be >= {lo}, got {v}")
    return list(v)


def validate_config(raw) -> dict:
    """Check a raw config mapping and fill in defaults; nothing is computed here."""
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("<root>", "config must be a non-empty JSON object")
    unknown = sorted(set(raw) - KNOWN_FIELDS)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    for req in ("s", "n", "k"):
        if req not in raw:
            raise ConfigError(req, "missing")
    cfg = {**DEFAULTS, **raw}
    s = _int(cfg, "s", 1)
    cfg["n"] = _int_list(cfg, "n", s, 1)
    cfg["alpha"] = [1] * s if cfg["alpha"] is None else _int_list(cfg, "alpha", s, 1)
    _int(cfg, "k", 0)
    if cfg["profile"] not in PROFILES:
        raise ConfigError("profile", f"expected one of {list(PROFILES)}, got {cfg['profile']!r}")
    if cfg["profile"] == "homogeneous" and s != 1:
        raise ConfigError("profile", "homogeneous profile needs s = 1")
    if cfg["a"] is not None:
        a = _int_list(cfg, "a", s)
        if any(a):
            raise ConfigError("a", "only zero exponent shifts are supported")
    prime = _int(cfg, "prime", 2)
    if prime >= 2 ** 31:
        raise ConfigError("prime", "must be below 2^31")
    _int(cfg, "seed")
    _int(cfg, "trials", 1)
    _int(cfg, "budget", 1)
    if cfg["max_q"] is not None:
        _int(cfg, "max_q", 1)
    if cfg["overrides"] is not None:
        ov = cfg["overrides"]
        if not isinstance(ov, dict) or set(ov) - {"source", "middle", "target"}:
            raise ConfigError("overrides", "expected an object with keys among source/middle/target")
        for key, parts in ov.items():
            try:
                LineBundleSum((t, m) for t, m in parts)
                if any(len(t) != 2 * s for t, _ in parts):
                    raise ValueError(f"twists must have length {2 * s}")
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"overrides.{key}", str(exc)) from None
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from None
    if not text.strip():
        raise ConfigError("<root>", "config file is empty")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return validate_config(raw)


def build_from_config(cfg: dict):
    space = SpaceSpec(tuple(cfg["n"]))
    pol = Polarization(tuple(cfg["alpha"]))
    overrides = None
    if cfg["overrides"]:
        overrides = {key: LineBundleSum((t, m) for t, m in parts) for key, parts in cfg["overrides"].items()}
    try:
        md = build_monad(space, pol, cfg["k"], cfg["profile"], overrides=overrides, exponent_shifts=cfg["a"])
    except (ProfileError, ValueError) as exc:
        field = "overrides" if overrides and "override" in str(exc) else "profile"
        raise ConfigError(field, str(exc)) from None
    return md


# -- json -----------------------------------------------------------------------

def jsonable(obj):
    """Recursively convert to JSON types; integers beyond 2^53 become decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > SAFE_INT else obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(cfg: dict) -> str:
    canon = json.dumps(jsonable(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# -- pipeline -------------------------------------------------------------------

def run_instance(cfg: dict, jobs: int = 1) -> dict:
    md = build_from_config(cfg)
    opts = dict(trials=cfg["trials"], prime=cfg["prime"], seed=cfg["seed"])
    certs = [
        certify_composition(md),
        certify_homogeneity(md),
        certify_rank(md, **opts),
        certify_bookkeeping(md),
    ]
    stab = certify_stability(md, budget=cfg["budget"], max_q=cfg["max_q"], jobs=jobs, **opts)
    certs += [stab, certify_simplicity(md, stability=stab)]
    status = combine([c.status for c in certs])
    return {
        "tool": {"name": "monadforge", "version": __version__},
        "input_sha256": config_hash(cfg),
        "config": cfg,
        "status": status,
        "exit_code": EXIT_CODES[status],
        "certificates": [c.to_dict() for c in certs],
    }


def _step_summary(values: dict) -> str:
    keep = []
    for key in ("h0", "h1", "h2", "rank_K", "rank_E", "degree", "slope", "mismatches",
                "undecided_count", "computed", "closed_form", "k", "normalized_degree",
                "composition_zero", "rank_structural", "rank_randomized"):
        if key in values:
            keep.append(f"{key}={json.dumps(jsonable(values[key]))}")
    if "region" in values:
        keep.append(f"region_size={values['region']['size']}")
    if "witness" in values:
        keep.append(f"witness={json.dumps(jsonable(values['witness']), sort_keys=True)}")
    if "bundle" in values:
        keep.append(f"bundle={values['bundle']}")
    return ", ".join(keep)


def render_report(run: dict) -> str:
    """Markdown view of a run; every number shown is read from the JSON."""
    cfg = run["config"]
    lines = [
        f"# monadforge report ({run['tool']['version']})",
        "",
        f"- instance: s={cfg['s']}, n={cfg['n']}, alpha={cfg['alpha']}, k={cfg['k']}, profile={cfg['profile']}",
        f"- input sha256: `{run['input_sha256']}`",
        f"- overall: **{run['status']}** (exit {run['exit_code']})",
        "",
        "| claim | status |",
        "|---|---|",
    ]
    lines += [f"| {c['claim']} | {c['status']} |" for c in run["certificates"]]
    for c in run["certificates"]:
        lines += ["", f"## {c['claim']}: {c['status']}", ""]
        for step in c["evidence"]:
            detail = _step_summary(step["values"])
            lines.append(f"- [{step['status']}] {step['statement']} ({step['rule']})"
                         + (f"; {detail}" if detail else ""))
        if c["supplementary"]:
            lines += ["", "Supplementary:", ""]
            for step in c["supplementary"]:
                detail = _step_summary(step["values"])
                lines.append(f"- [{step['status']}] {step['statement']} ({step['rule']})"
                             + (f"; {detail}" if detail else ""))
    return "\n".join(lines) + "\n"


def grid_configs(base: dict) -> List[dict]:
    out = []
    for s in (1, 2):
        for n in product((1, 2), repeat=s):
            for alpha in product((1, 2), repeat=s):
                for k in (1, 2):
                    for profile in PROFILES:
                        if profile == "homogeneous" and s != 1:
                            continue
                        cfg = dict(base, s=s, n=list(n), alpha=list(alpha), k=k, profile=profile)
                        out.append(validate_config({key: v for key, v in cfg.items() if v is not None}))
    return out


def _grid_row(cfg: dict) -> dict:
    run = run_instance(cfg)
    md = build_from_config(cfg)
    inv = kernel_invariants(md)
    return {
        "instance": {key: cfg[key] for key in ("s", "n", "alpha", "k", "profile")},
        "status": run["status"],
        "claims": {c["claim"]: c["status"] for c in run["certificates"]},
        "rank_K": inv.rank_K,
        "rank_E": inv.rank_E,
        "deg_K": inv.K.degree,
        "slope_K": str(inv.K.slope),
    }


def render_grid(grid: dict) -> str:
    rows = grid["instances"]
    claims = list(rows[0]["claims"]) if rows else []
    lines = [f"# monadforge grid ({grid['tool']['version']})", "",
             f"overall: **{grid['status']}** (exit {grid['exit_code']})", "",
             "| s | n | alpha | k | profile | rank K | deg K | " + " | ".join(claims) + " |",
             "|" + "---|" * (8 + len(claims) - 1)]
    for r in rows:
        i = r["instance"]
        lines.append(f"| {i['s']} | {i['n']} | {i['alpha']} | {i['k']} | {i['profile']} | "
                     f"{r['rank_K']} | {r['deg_K']} | " + " | ".join(r["claims"][c] for c in claims) + " |")
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------

def _resolved(args) -> dict:
    cfg = load_config(args.config) if args.config else {}
    if not cfg:
        raise ConfigError("--config", "required")
    for flag, key in (("profile", "profile"), ("prime", "prime"), ("seed", "seed"), ("trials", "trials"),
                      ("max_q", "max_q"), ("budget", "budget")):
        v = getattr(args, flag, None)
        if v is not None:
            cfg[key] = v
    seed = _env_seed()
    if seed is not None:
        cfg["seed"] = seed
    return validate_config(cfg)


def _env_seed() -> Optional[int]:
    env = os.environ.get("MONADFORGE_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigError("MONADFORGE_SEED", f"not an integer: {env!r}") from None


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_certify(args) -> int:
    cfg = _resolved(args)
    t0 = time.perf_counter()
    run = run_instance(cfg, jobs=args.jobs)
    # wall time goes to stderr only, so the certificate stays byte-reproducible
    print(f"certify: {run['status']} in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    _emit(dumps(run), args.out)
    if args.report:
        _emit(render_report(jsonable(run)), args.report)
    return run["exit_code"]


def cmd_certify_grid(args) -> int:
    base = {"prime": args.prime, "seed": args.seed, "trials": args.trials,
            "budget": args.budget, "max_q": args.max_q}
    if _env_seed() is not None:
        base["seed"] = _env_seed()
    cfgs = grid_configs(base)
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_grid_row, cfgs))
    else:
        rows = [_grid_row(c) for c in cfgs]
    status = combine([r["status"] for r in rows])
    grid = {"tool": {"name": "monadforge", "version": __version__}, "status": status,
            "exit_code": EXIT_CODES[status], "instances": rows}
    print(f"certify-grid: {len(rows)} instances, {status} in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    _emit(dumps(grid), args.out)
    if args.report:
        _emit(render_grid(jsonable(grid)), args.report)
    return grid["exit_code"]


def _parse_ints(text: str, field: str) -> List[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ConfigError(field, f"expected comma-separated integers, got {text!r}") from None


def cmd_cohomology(args) -> int:
    dims = _parse_ints(args.n, "--n")
    if not dims or any(d < 1 for d in dims):
        raise ConfigError("--n", "projective dimensions must be >= 1")
    space = SpaceSpec(tuple(dims))
    twist = _parse_ints(args.twist, "--twist")
    if len(twist) != space.nslots:
        raise ConfigError("--twist", f"has length {len(twist)}, expected {space.nslots}")
    S = LineBundleSum([(twist, 1)])
    table = sum_cohomology(space, S)
    if args.q is not None:
        if not 0 <= args.q <= space.D:
            raise ConfigError("--q", f"must lie in 0..{space.D}")
        print(f"q{args.q}: {table[args.q]}")
    else:
        for q in range(space.D + 1):
            print(f"q{q}: {table[q]}")
    print(f"chi: {euler_characteristic(space, S)}")
    return 0


def cmd_matrices(args) -> int:
    md = build_from_config(_resolved(args))
    text = dump_matrix("a_mat", md.a_mat, args.format) + dump_matrix("b_mat", md.b_mat, args.format)
    _emit(text, args.out)
    return 0


def cmd_sections(args) -> int:
    cfg = _resolved(args)
    md = build_from_config(cfg)
    B = _parse_ints(args.twist, "--twist")
    if len(B) != md.space.nslots:
        raise ConfigError("--twist", f"has length {len(B)}, expected {md.space.nslots}")
    rank_k = md.middle.rank - md.target.rank
    if not 1 <= args.power <= rank_k:
        raise ConfigError("--power", f"must lie in 1..rank(K) = {rank_k}")
    amb = ambient_h0(md, args.power, B)
    if amb == 0:
        print(f"h0(wedge^{args.power} K{tuple(B)}) = 0")
        print("path: ambient (no sections of the middle term)")
        return 0
    try:
        res = h0_wedge_kernel(md, args.power, B, budget=cfg["budget"], prime=cfg["prime"])
    except OracleRefused as exc:
        print(f"undecided: {exc}")
        return EXIT_CODES[INCONCLUSIVE]
    print(f"h0(wedge^{args.power} K{tuple(B)}) = {res.value}")
    print(f"path: elimination ({res.method}); basis sizes {res.domain_size} -> {res.codomain_size}; rank {res.rank}")
    return 0 if res.exact else EXIT_CODES[INCONCLUSIVE]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monadforge", description="Exact checks for banded monads on products of projective spaces.")
    p.add_argument("--version", action="version", version=f"monadforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp, config=True):
        if config:
            sp.add_argument("--config", help="instance JSON")
            sp.add_argument("--profile", choices=PROFILES)
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--report", help="write a Markdown report here")
        sp.add_argument("--prime", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--max-q", dest="max_q", type=int)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("certify", help="run every check on one instance")
    run_flags(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("certify-grid", help="sweep s<=2, n_i<=2, alpha_i<=2, k<=2")
    run_flags(sp, config=False)
    sp.set_defaults(func=cmd_certify_grid)

    sp = sub.add_parser("cohomology", help="cohomology table of one line bundle")
    sp.add_argument("--n", required=True, help="projective dimensions n_1,...,n_s")
    sp.add_argument("--twist", required=True, help="2s comma-separated integers")
    sp.add_argument("--q", type=int)
    sp.set_defaults(func=cmd_cohomology)

    sp = sub.add_parser("matrices", help="dump both monad matrices")
    sp.add_argument("--config", required=True)
    sp.add_argument("--profile", choices=PROFILES)
    sp.add_argument("--format", choices=("txt", "csv"), default="txt")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_matrices)

    sp = sub.add_parser("sections", help="h0 of an exterior power of the kernel, twisted")
    sp.add_argument("--config", required=True)
    sp.add_argument("--profile", choices=PROFILES)
    sp.add_argument("--twist", required=True)
    sp.add_argument("--power", type=int, default=1)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--prime", type=int)
    sp.set_defaults(func=cmd_sections)
    return p


VECTOR_FLAGS = ("--twist", "--n")


def _glue_vectors(argv: List[str]) -> List[str]:
    # "--twist -2,-2" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VECTOR_FLAGS:
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = _glue_vectors(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would collide with "inconclusive"
        return 0 if exc.code == 0 else EXIT_USAGE
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
