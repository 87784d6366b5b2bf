"""Command-line front end.

Exit codes: 0 success, 1 a checked inequality failed, 2 invalid input,
3 bit-budget abort.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import os
import platform
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from . import __version__, kernels
from .abcdiag import AbcTriple, abc_quality, conductor_reading, granville_scan
from .dynamics import (Hypothesis, Poly, bad_reduction_primes, classify_zero, has_simple_roots,
                       orbit, precondition_report, s_f)
from .errors import BitsizeExceeded, PowerOrbitsError
from .exactnum import PrimeSet, format_rational, parse_rational
from .heights import canonical_height, height_bounds, naive_height
from .powerrel import RelationHit, power_representations
from .search import WORKERS_ENV, pell_family, search_tilde_v, search_u, search_v

log = logging.getLogger("powerorbits")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class RunConfig:
    command: str = ""
    poly: str | None = None
    s: str = ""
    bound: int | None = None
    m: int | None = None
    n_max: int | None = None
    k_max: int | None = None
    eps: float | None = None
    homogenization: str | None = None
    bit_budget: int = 10**6
    workers: int = 1
    out_dir: str | None = None

    NON_SEMANTIC = ("workers", "out_dir")

    def to_dict(self) -> dict:
        return {k: v for k, v in sorted(dataclasses.asdict(self).items()) if v is not None}

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        data = tomllib.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def config_hash(self) -> str:
        sem = {k: v for k, v in self.to_dict().items() if k not in self.NON_SEMANTIC}
        return hashlib.sha256(tomli_w.dumps(sem).encode()).hexdigest()


# ---------------------------------------------------------------- outputs

def _write(out: Path, name: str, text: str, written: dict):
    path = out / name
    path.write_text(text, encoding="ascii")
    written[name] = hashlib.sha256(text.encode()).hexdigest()


def _finish(cfg: RunConfig, out: Path, written: dict, t0: float):
    _write(out, "config.toml", cfg.to_toml(), written)
    manifest = {
        "config_hash": cfg.config_hash(),
        "config": cfg.to_dict(),
        "versions": {
            "powerorbits": __version__,
            "python": platform.python_version(),
            "kernel_backend": kernels.BACKEND,
        },
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "outputs": dict(sorted(written.items())),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="ascii")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir or os.path.join("runs", cfg.command))
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands

def _poly(cfg) -> Poly:
    if not cfg.poly:
        raise ValueError("--poly is required")
    return Poly.parse(cfg.poly)


def cmd_height(args, cfg):
    alpha = parse_rational(args.alpha)
    print(f"h({format_rational(alpha)}) = {fmt(naive_height(alpha))}")
    if cfg.poly:
        f = _poly(cfg)
        hb = height_bounds(f)
        est = canonical_height(f, alpha, args.tol)
        print(f"c_up = {fmt(hb.c_up)}  c_low = {fmt(hb.c_low)}  c1 = {fmt(hb.c1)}")
        print(f"canonical height = {fmt(est.value)} +/- {fmt(est.error)} (n = {est.iterations})")
    return EXIT_OK


def cmd_orbit(args, cfg):
    f = _poly(cfg)
    for i, x in enumerate(orbit(f, parse_rational(args.alpha), args.n, cfg.bit_budget)):
        print(f"{i}\t{format_rational(x)}\t{fmt(naive_height(x))}")
    return EXIT_OK


def cmd_classify_zero(args, cfg):
    cz = classify_zero(_poly(cfg), cfg.bit_budget)
    print(f"{cz.kind.value}: {cz.describe()}")
    return EXIT_OK


def cmd_check_conditions(args, cfg):
    rep = precondition_report(_poly(cfg), Hypothesis.parse(args.theorem), cfg.m, cfg.bit_budget)
    print(json.dumps(rep.as_dict(), indent=2))
    return EXIT_OK


def cmd_reduction(args, cfg):
    f = _poly(cfg)
    sr = has_simple_roots(f)
    print(json.dumps({
        "polynomial": str(f),
        "bad_reduction_primes": list(bad_reduction_primes(f)),
        "S_f": list(s_f(f, PrimeSet.parse(cfg.s))),
        "discriminant": format_rational(sr.discriminant),
        "simple_roots": sr.ok,
    }, indent=2))
    return EXIT_OK


def cmd_power_test(args, cfg):
    beta = parse_rational(args.beta)
    reps = power_representations(beta, PrimeSet.parse(cfg.s))
    if not reps:
        print(f"{format_rational(beta)}: no representation a^l with a in R_S")
    for w in reps:
        tag = " (trivial)" if w.trivial else ""
        print(f"ell={w.ell} a={format_rational(w.a)}{tag}")
    return EXIT_OK


def _search_outputs(cfg, report, t0, extra=None):
    out = _out_dir(cfg)
    written = {}
    _write(out, "hits.jsonl", report.hits_jsonl(), written)
    _write(out, "report.json", report.to_json(), written)
    _write(out, "stabilization.csv", report.stabilization_csv(), written)
    for name, text in (extra or {}).items():
        _write(out, name, text, written)
    _finish(cfg, out, written, t0)
    tally = report.tally()
    print(f"{report.kind}-search f={report.polynomial} S={{{report.S}}} B={report.B}: "
          f"{tally['nontrivial']} nontrivial hits ({tally['hits']} total, {tally['skipped']} skipped) -> {out}")


def _need(value, flag):
    if value is None:
        raise ValueError(f"{flag} is required")
    return value


def cmd_search_u(args, cfg, t0):
    report = search_u(_poly(cfg), PrimeSet.parse(cfg.s), _need(cfg.bound, "--bound"), cfg.workers, cfg.bit_budget)
    _search_outputs(cfg, report, t0)
    return EXIT_OK


def _fill_conductor(f, S, hits, eps, budget):
    ok = True
    for h in hits:
        if h.kind == "V" and h.nontrivial and h.witness.ell >= 2:
            r = conductor_reading(f, S, h, eps, budget)
            h.diagnostics["conductor"] = r.as_dict()
            ok &= r.holds
    return ok


def cmd_search_v(args, cfg, t0):
    f, S = _poly(cfg), PrimeSet.parse(cfg.s)
    report = search_v(f, S, _need(cfg.bound, "--bound"), _need(cfg.m, "--m"), cfg.workers, cfg.bit_budget)
    ok = _fill_conductor(f, S, report.hits, cfg.eps if cfg.eps is not None else 0.5, cfg.bit_budget)
    _search_outputs(cfg, report, t0)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_search_tilde_v(args, cfg, t0):
    report = search_tilde_v(_poly(cfg), PrimeSet.parse(cfg.s), _need(cfg.bound, "--bound"),
                            _need(cfg.n_max, "--n-max"), _need(cfg.k_max, "--k-max"),
                            cfg.workers, cfg.bit_budget)
    _search_outputs(cfg, report, t0)
    return EXIT_OK


def cmd_pell_family(args, cfg, t0):
    g = Poly.parse(args.g) if args.g else None
    f, items = pell_family(args.count, g, args.variant)
    out = _out_dir(cfg)
    written = {}
    _write(out, "hits.jsonl", "".join(h.to_json() + "\n" for _, h in items), written)
    _finish(cfg, out, written, t0)
    print(f"f = {f}")
    for pair, h in items:
        print(f"r={pair.r} s={pair.s} r^2-2s^2={pair.r**2 - 2 * pair.s**2} "
              f"ell={h.witness.ell} a={format_rational(h.witness.a)} replay={h.replay(f)}")
    return EXIT_OK


def cmd_abc_quality(args, cfg):
    t = AbcTriple(args.a, args.b, args.c)
    print(fmt(abc_quality(t)))
    return EXIT_OK


def cmd_granville_scan(args, cfg, t0):
    f = _poly(cfg)
    table = granville_scan(f, PrimeSet.parse(cfg.s), _need(cfg.bound, "--bound"),
                           cfg.eps if cfg.eps is not None else 0.5, cfg.homogenization or "d-1")
    out = _out_dir(cfg)
    written = {}
    _write(out, "granville.csv", table.to_csv(), written)
    _finish(cfg, out, written, t0)
    print(f"granville scan f={f}: {len(table.rows)} rows, max gap {fmt(table.max_gap)} -> {out}")
    return EXIT_OK


def cmd_conductor_check(args, cfg, t0):
    f, S = _poly(cfg), PrimeSet.parse(cfg.s)
    eps = cfg.eps if cfg.eps is not None else 0.5
    if args.hits:
        path = Path(args.hits)
        if not path.exists():
            raise FileNotFoundError(f"missing input: {path}")
        hits = [RelationHit.from_dict(json.loads(line)) for line in path.read_text().splitlines() if line.strip()]
        for h in hits:
            if not h.replay(f):
                raise ValueError(f"hit at alpha={format_rational(h.alpha)} does not replay under f = {f}")
    else:
        hits = search_v(f, S, _need(cfg.bound, "--bound"), _need(cfg.m, "--m"), cfg.workers, cfg.bit_budget).hits
    rows = []
    ok = True
    for h in hits:
        if not (h.kind == "V" and h.nontrivial and h.witness.ell >= 2):
            continue
        r = conductor_reading(f, S, h, eps, cfg.bit_budget)
        ok &= r.holds
        rows.append({"alpha": format_rational(h.alpha), "n": h.n, "ell": h.witness.ell,
                     "a": format_rational(h.witness.a), **r.as_dict(), "holds": r.holds})
    out = _out_dir(cfg)
    written = {}
    _write(out, "conductor.json", json.dumps(rows, indent=2) + "\n", written)
    _finish(cfg, out, written, t0)
    print(f"{len(rows)} V-hits checked, all inequalities hold: {ok}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_plot(args, cfg):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    for name in args.input:
        path = Path(name)
        if not path.exists():
            raise FileNotFoundError(f"missing input: {path}")
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            header = reader.fieldnames or []
        fig, ax = plt.subplots(figsize=(6, 4))
        target = out / (path.stem + ".png")
        if not rows and header and not ({"cumulative_nontrivial_hits", "gap"} & set(header)):
            plt.close(fig)
            raise ValueError(f"{path}: unrecognised CSV columns {list(header)}")
        if not rows:
            print(f"warning: {path} has no rows; writing an empty plot", file=sys.stderr)
            ax.text(0.5, 0.5, "no data", ha="center", va="center", transform=ax.transAxes)
        elif "cumulative_nontrivial_hits" in header:
            xs = [int(r["bound"]) for r in rows]
            ys = [int(r["cumulative_nontrivial_hits"]) for r in rows]
            ax.step(xs, ys, where="post")
            ax.set_xlabel("height bound B")
            ax.set_ylabel("cumulative nontrivial hits")
            ax.set_title("stabilization (evidence, not proof)")
        elif "gap" in header:
            hs = [float(r["height"]) for r in rows]
            gaps = [float(r["gap"]) for r in rows]
            order = sorted(range(len(rows)), key=lambda i: hs[i])
            env, best = [], float("-inf")
            for i in order:
                best = max(best, gaps[i])
                env.append(best)
            ax.scatter(hs, gaps, s=4, alpha=0.5, label="gap")
            ax.plot([hs[i] for i in order], env, color="C3", label="running max")
            ax.set_xlabel("h(alpha)")
            ax.set_ylabel("lhs - radical")
            ax.legend()
        else:
            plt.close(fig)
            raise ValueError(f"{path}: unrecognised CSV columns {list(header)}")
        fig.tight_layout()
        fig.savefig(target, dpi=100)
        plt.close(fig)
        print(f"wrote {target}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

COMMANDS = {
    "height": (cmd_height, False),
    "orbit": (cmd_orbit, False),
    "classify-zero": (cmd_classify_zero, False),
    "check-conditions": (cmd_check_conditions, False),
    "reduction": (cmd_reduction, False),
    "power-test": (cmd_power_test, False),
    "search-u": (cmd_search_u, True),
    "search-v": (cmd_search_v, True),
    "search-tilde-v": (cmd_search_tilde_v, True),
    "pell-family": (cmd_pell_family, True),
    "abc-quality": (cmd_abc_quality, False),
    "granville-scan": (cmd_granville_scan, True),
    "conductor-check": (cmd_conductor_check, True),
    "plot": (cmd_plot, False),
}

_CONFIG_FLAGS = ("poly", "s", "bound", "m", "n_max", "k_max", "eps", "homogenization",
                 "bit_budget", "workers", "out_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powerorbits", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        p.add_argument("--config", help="TOML run config; flags override it")
        if "poly" in flags:
            p.add_argument("--poly", help='"X^3-X^2+1" or coefficient list "1,0,-1,1"')
        if "s" in flags:
            p.add_argument("--s", help='prime set, e.g. "2,3"')
        if "bound" in flags:
            p.add_argument("--bound", type=int, help="height bound B")
        if "eps" in flags:
            p.add_argument("--eps", type=float)
        if "search" in flags:
            p.add_argument("--workers", type=int, help=f"worker processes (or ${WORKERS_ENV})")
            p.add_argument("--out-dir")
        p.add_argument("--bit-budget", type=int)

    p = sub.add_parser("height", help="naive and canonical heights")
    common(p, "poly")
    p.add_argument("--alpha", required=True)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("orbit", help="print an orbit with heights")
    common(p, "poly")
    p.add_argument("--alpha", required=True)
    p.add_argument("--n", type=int, default=5)

    p = sub.add_parser("classify-zero", help="periodic / strictly preperiodic / wandering")
    common(p, "poly")

    p = sub.add_parser("check-conditions", help="theorem hypotheses for f")
    common(p, "poly")
    p.add_argument("--theorem", required=True, help="U, Vm, V0 or abc")
    p.add_argument("--m", type=int)

    p = sub.add_parser("reduction", help="bad reduction primes, S_f, discriminant")
    common(p, "poly", "s")

    p = sub.add_parser("power-test", help="representations beta = a^l, a in R_S")
    common(p, "s")
    p.add_argument("--beta", required=True)

    p = sub.add_parser("search-u", help="scan U(Q, f, S) up to height B")
    common(p, "poly", "s", "bound", "search")

    p = sub.add_parser("search-v", help="scan V_m(Q, f, S) up to height B")
    common(p, "poly", "s", "bound", "eps", "search")
    p.add_argument("--m", type=int)

    p = sub.add_parser("search-tilde-v", help="scan the (n, k) grid of V-tilde")
    common(p, "poly", "s", "bound", "search")
    p.add_argument("--n-max", type=int)
    p.add_argument("--k-max", type=int)

    p = sub.add_parser("pell-family", help="Pell-equation families with verified hits")
    common(p, "search")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--variant", default="U", choices=["U", "V", "u", "v"])
    p.add_argument("--g", help="polynomial g for the U family (default 1)")

    p = sub.add_parser("abc-quality", help="log c / log rad(abc)")
    common(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=int, required=True)

    p = sub.add_parser("granville-scan", help="Granville-type gap table")
    common(p, "poly", "s", "bound", "eps", "search")
    p.add_argument("--homogenization", choices=["d-1", "d-2"])

    p = sub.add_parser("conductor-check", help="conductor-versus-height chain on V-hits")
    common(p, "poly", "s", "bound", "eps", "search")
    p.add_argument("--m", type=int)
    p.add_argument("--hits", help="hits.jsonl from search-v; otherwise a search is run")

    p = sub.add_parser("plot", help="render stabilization / Granville CSVs")
    p.add_argument("input", nargs="+")
    p.add_argument("--out-dir")
    return parser


def make_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = RunConfig.from_toml(Path(args.config).read_text())
    cfg.command = args.command
    for name in _CONFIG_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "workers", None) is None and os.environ.get(WORKERS_ENV):
        cfg.workers = int(os.environ[WORKERS_ENV])
    if cfg.s:
        cfg.s = str(PrimeSet.parse(cfg.s))
    return cfg


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    func, takes_clock = COMMANDS[args.command]
    t0 = time.perf_counter()
    try:
        cfg = make_config(args)
        return func(args, cfg, t0) if takes_clock else func(args, cfg)
    except BitsizeExceeded as exc:
        print(f"error: {exc}; lower the bound or raise --bit-budget", file=sys.stderr)
        return EXIT_BUDGET
    except (PowerOrbitsError, ValueError, FileNotFoundError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
