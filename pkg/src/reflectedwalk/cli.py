"""Batch front-end: run selected methods over a grid and cross-check them.

The run configuration is a flat key-value text file (``key = value`` per
line, ``#`` comments).  Recognized keys:

    family    deterministic | bernoulli | binomial | poisson | geometric | explicit
    s         positive integer
    c / p / n / lam / probs   family parameters (probs: space-separated)
    tail_tol  tail truncation tolerance (default 1e-14, capped there)
    methods   comma-separated subset of dp, spitzer, product, pollaczek
    n_max, m_max   grid bounds (defaults 12, 12)
    u_radius  inversion circle radius for transform methods (default 0.5)
    v         operating cap on |u| for the outer-radius certificate (default 0.75)
    tolerance           pairwise agreement tolerance (default 1e-9)
    tol_functional, tol_numerator, tol_coeff, tol_logres   per-check overrides
    format    csv | json (default csv)
    output    destination path (CLI flag overrides)
    verbose   true | false

Exit status is 0 iff every agreement pair and every structural check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import contour, dist as dist_mod, kernel, oracle, series

DEFAULT_METHODS = ("dp",)
ALL_METHODS = ("dp", "spitzer", "product", "pollaczek")


class ConfigError(ValueError):
    """Config file failed to parse or validate."""


@dataclass
class RunConfig:
    family: str
    s: int
    params: dict = field(default_factory=dict)
    tail_tol: float = dist_mod.DEFAULT_TAIL_TOL
    methods: tuple = DEFAULT_METHODS
    n_max: int = 12
    m_max: int = 12
    u_radius: float = 0.5
    v: float = 0.75
    tolerance: float = 1e-9
    tol_functional: float = 1e-11
    tol_numerator: float = 1e-9
    tol_coeff: float = 1e-10
    tol_logres: float = 1e-8
    format: str = "csv"
    output: str | None = None
    verbose: bool = False

    def build_distribution(self) -> dist_mod.IncrementDistribution:
        return dist_mod.make_family(
            self.family, self.s, tail_tol=self.tail_tol, **self.params
        )


@dataclass
class PairResult:
    method_a: str
    method_b: str
    max_deviation: float
    argmax_cell: tuple
    tolerance: float
    passed: bool


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool


@dataclass
class AgreementReport:
    pairs: list
    checks: list
    environment: dict

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.pairs) and all(c.passed for c in self.checks)


@dataclass
class RunResult:
    tables: dict
    report: AgreementReport


def _parse_bool(raw: str, lineno: int) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"line {lineno}: expected a boolean, got {raw!r}")


def parse_config(text: str) -> RunConfig:
    """Parse the flat key-value grammar into a validated RunConfig."""
    values: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = (raw, lineno)

    def pop(key, default=None):
        return values.pop(key, (default, None))

    family, lineno = pop("family")
    if family is None:
        raise ConfigError("missing required key 'family'")
    s_raw, lineno = pop("s")
    if s_raw is None:
        raise ConfigError("missing required key 's'")
    try:
        s = int(s_raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: field 's': not an integer: {s_raw!r}")

    params = {}
    for key, caster in (("c", int), ("p", float), ("n", int), ("lam", float)):
        raw, lineno = pop(key)
        if raw is not None:
            try:
                params[key] = caster(raw)
            except ValueError:
                raise ConfigError(f"line {lineno}: field {key!r}: bad value {raw!r}")
    raw, lineno = pop("probs")
    if raw is not None:
        try:
            params["probs"] = [float(tok) for tok in raw.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"line {lineno}: field 'probs': bad value {raw!r}")

    cfg = RunConfig(family=family, s=s, params=params)
    float_keys = {
        "tail_tol": "tail_tol",
        "u_radius": "u_radius",
        "v": "v",
        "tolerance": "tolerance",
        "tol_functional": "tol_functional",
        "tol_numerator": "tol_numerator",
        "tol_coeff": "tol_coeff",
        "tol_logres": "tol_logres",
    }
    for key, attr in float_keys.items():
        raw, lineno = pop(key)
        if raw is not None:
            try:
                setattr(cfg, attr, float(raw))
            except ValueError:
                raise ConfigError(f"line {lineno}: field {key!r}: bad value {raw!r}")
    for key in ("n_max", "m_max"):
        raw, lineno = pop(key)
        if raw is not None:
            try:
                setattr(cfg, key, int(raw))
            except ValueError:
                raise ConfigError(f"line {lineno}: field {key!r}: bad value {raw!r}")
    raw, lineno = pop("methods")
    if raw is not None:
        methods = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
        for m in methods:
            if m not in ALL_METHODS:
                raise ConfigError(f"line {lineno}: unknown method {m!r}")
        if not methods:
            raise ConfigError(f"line {lineno}: field 'methods': need at least one")
        cfg.methods = methods
    raw, lineno = pop("format")
    if raw is not None:
        if raw not in ("csv", "json"):
            raise ConfigError(f"line {lineno}: format must be csv or json")
        cfg.format = raw
    raw, lineno = pop("output")
    if raw is not None:
        cfg.output = raw
    raw, lineno = pop("verbose")
    if raw is not None:
        cfg.verbose = _parse_bool(raw, lineno)
    if values:
        key, (_, lineno) = next(iter(values.items()))
        raise ConfigError(f"line {lineno}: unknown key {key!r}")

    if not 0 < cfg.tail_tol <= dist_mod.MAX_TAIL_TOL:
        raise ConfigError(
            f"tail_tol {cfg.tail_tol!r} exceeds the cap {dist_mod.MAX_TAIL_TOL}"
        )
    if not 0 < cfg.u_radius < 1:
        raise ConfigError("u_radius must lie in (0, 1)")
    if cfg.n_max < 0 or cfg.m_max < 0:
        raise ConfigError("n_max and m_max must be >= 0")
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _next_pow2(n: int) -> int:
    p = 16
    while p < n:
        p *= 2
    return p


def _invert_transform(evaluator, d, cfg: RunConfig) -> oracle.DistributionTable:
    """Recover P(M_n = m) by Cauchy extraction in u then in z.

    evaluator(u, z_nodes) returns F(u, z) on the z grid for one u node.
    The z circle has radius 1 with enough nodes to cover the full support
    of M_{n_max}, so the z inversion is alias-free; the u circle's aliasing
    is bounded by u_radius^{n_nodes} / (1 - u_radius).
    """
    n_max, m_max = cfg.n_max, cfg.m_max
    nu = _next_pow2(max(2 * (n_max + 1), 64))
    full_support = n_max * d.support_growth
    nz = _next_pow2(full_support + 1)
    r_u = cfg.u_radius
    u_nodes = r_u * np.exp(2j * np.pi * np.arange(nu) / nu)
    z_nodes = np.exp(2j * np.pi * np.arange(nz) / nz)
    samples = np.empty((nu, nz), dtype=complex)
    for i, u in enumerate(u_nodes):
        samples[i] = evaluator(u, z_nodes)
    # coefficient of u^n: (1/nu) sum_i F(u_i, z) u_i^{-n}
    n_idx = np.arange(n_max + 1)
    u_inv = (u_nodes[None, :] ** (-n_idx[:, None])) / nu
    pgfs = u_inv @ samples  # (n_max+1, nz) samples of E(z^{M_n})
    m_idx = np.arange(m_max + 1)
    z_inv = (z_nodes[None, :] ** (-m_idx[:, None])) / nz
    probs = np.real(pgfs @ z_inv.T)
    return oracle.DistributionTable(
        probs=probs,
        method="",
        complete_rows=oracle.complete_row_flags(d, n_max, m_max),
        overflow=np.zeros(n_max + 1),
    )


def _spitzer_table(d, cfg: RunConfig) -> oracle.DistributionTable:
    f = series.spitzer_series(d, order_cap=max(cfg.n_max, 1), degree_cap=cfg.m_max)
    probs = f.as_matrix()[: cfg.n_max + 1]
    return oracle.DistributionTable(
        probs=probs,
        method="spitzer",
        complete_rows=oracle.complete_row_flags(d, cfg.n_max, cfg.m_max),
        overflow=np.zeros(cfg.n_max + 1),
    )


def _compute_tables(d, cfg: RunConfig, methods) -> dict:
    tables = {}
    if "dp" in methods:
        tables["dp"] = oracle.lindley_dp(d, cfg.n_max, cfg.m_max)
    if "spitzer" in methods:
        tables["spitzer"] = _spitzer_table(d, cfg)
    if "product" in methods:

        def product_evaluator(u, z_nodes):
            roots = kernel.find_kernel_roots(d, u)
            return kernel.product_eval(d, u, z_nodes, roots)

        t = _invert_transform(product_evaluator, d, cfg)
        tables["product"] = oracle.DistributionTable(
            t.probs, "product-inversion", t.complete_rows, t.overflow
        )
    if "pollaczek" in methods:
        cert = contour.choose_outer_radius(d, cfg.v)
        quad = contour.CircleQuadrature()

        def pollaczek_evaluator(u, z_nodes):
            return contour.pollaczek_eval(d, u, z_nodes, cert, quad)

        t = _invert_transform(pollaczek_evaluator, d, cfg)
        tables["pollaczek"] = oracle.DistributionTable(
            t.probs, "pollaczek-inversion", t.complete_rows, t.overflow
        )
    return tables


def _compare_tables(tables: dict, methods, tol: float) -> list:
    pairs = []
    for i, a in enumerate(methods):
        for b in methods[i + 1 :]:
            ta, tb = tables[a], tables[b]
            both = ta.complete_rows & tb.complete_rows
            dev = np.abs(ta.probs - tb.probs)
            dev[~both] = 0.0
            cell = np.unravel_index(int(np.argmax(dev)), dev.shape)
            max_dev = float(dev[cell])
            pairs.append(
                PairResult(
                    method_a=a,
                    method_b=b,
                    max_deviation=max_dev,
                    argmax_cell=(int(cell[0]), int(cell[1])),
                    tolerance=tol,
                    passed=max_dev <= tol,
                )
            )
    return pairs


def _structural_checks(d, cfg: RunConfig, dp_table) -> list:
    checks = []
    # one-step functional equation on a small (n, z) grid of complete rows
    res = 0.0
    z_grid = (0.3, 0.7, 1.0)
    for n in range(dp_table.n_max):
        if not (dp_table.complete_rows[n] and dp_table.complete_rows[n + 1]):
            break
        for z in z_grid:
            res = max(res, oracle.functional_equation_check(d, dp_table, n, z))
    checks.append(
        CheckResult("functional-equation", res, cfg.tol_functional, res <= cfg.tol_functional)
    )
    # numerator polynomial annihilated by the kernel roots
    res = 0.0
    for u in (0.25, 0.5):
        roots = kernel.find_kernel_roots(d, u)
        res = max(res, oracle.numerator_check(d, u, roots, tol=cfg.tol_numerator))
    checks.append(
        CheckResult("numerator", res, cfg.tol_numerator, res <= cfg.tol_numerator)
    )
    # Cauchy coefficient identity on a small (l, k) grid
    cert = contour.choose_outer_radius(d, cfg.v)
    quad = contour.CircleQuadrature()
    res = 0.0
    for l in (1, 2, 4):
        for k in (1, 3):
            integral, pmf = contour.verify_coeff_identity(d, l, k, cert, quad)
            res = max(res, abs(integral - pmf))
    checks.append(CheckResult("coefficient-identity", res, cfg.tol_coeff, res <= cfg.tol_coeff))
    # logarithmic residue of the kernel at u = 0.5
    u = 0.5
    roots = kernel.find_kernel_roots(d, u)
    z = 0.5 * (roots.max_modulus + 1.0)
    a = 0.5 * (roots.max_modulus + z)
    if roots.max_modulus < a < z:
        lhs, rhs = kernel.root_logresidue_check(d, u, z, a, nodes=2048)
        res = abs(lhs - rhs)
    else:  # pragma: no cover - radii always order for valid inputs
        res = float("inf")
    checks.append(CheckResult("log-residue", res, cfg.tol_logres, res <= cfg.tol_logres))
    return checks


def run(config: RunConfig) -> RunResult:
    """Execute the configured methods and assemble the agreement report."""
    d = config.build_distribution()
    methods = tuple(dict.fromkeys(config.methods))
    comparisons = len(methods) > 1 or any(m != "dp" for m in methods)
    if comparisons and "dp" not in methods:
        methods = ("dp",) + methods
    tables = _compute_tables(d, config, methods)
    pairs = _compare_tables(tables, methods, config.tolerance) if comparisons else []
    checks = _structural_checks(d, config, tables["dp"]) if comparisons else []
    cert_info = {}
    if "pollaczek" in methods or comparisons:
        try:
            cert = contour.choose_outer_radius(d, config.v)
            cert_info = {"b": cert.b, "v": cert.v, "margin": cert.margin}
        except contour.RadiusSearchError as exc:
            cert_info = {"error": str(exc)}
    env = {
        "family": d.family,
        "s": d.s,
        "j_max": d.j_max,
        "truncation_defect": d.truncation_defect,
        "n_max": config.n_max,
        "m_max": config.m_max,
        "u_radius": config.u_radius,
        "radius_certificate": cert_info,
        "methods": list(methods),
    }
    return RunResult(tables=tables, report=AgreementReport(pairs, checks, env))


def _format_float(x: float) -> str:
    return repr(float(x))


def render_csv(result: RunResult) -> str:
    lines = ["n,m,method,probability"]
    for method in sorted(result.tables):
        table = result.tables[method]
        for n in range(table.n_max + 1):
            if not table.complete_rows[n]:
                continue
            for m in range(table.m_max + 1):
                lines.append(f"{n},{m},{method},{_format_float(table.probs[n, m])}")
    return "\n".join(lines) + "\n"


def render_json(result: RunResult) -> str:
    payload = {
        "tables": {
            method: {
                "method": table.method,
                "n_max": table.n_max,
                "m_max": table.m_max,
                "probs": [[_format_float(x) for x in row] for row in table.probs],
                "complete_rows": [bool(b) for b in table.complete_rows],
                "overflow": [_format_float(x) for x in table.overflow],
            }
            for method, table in sorted(result.tables.items())
        },
        "report": {
            "pairs": [
                {
                    "methods": [p.method_a, p.method_b],
                    "max_deviation": _format_float(p.max_deviation),
                    "argmax_cell": list(p.argmax_cell),
                    "tolerance": _format_float(p.tolerance),
                    "passed": p.passed,
                }
                for p in result.report.pairs
            ],
            "checks": [
                {
                    "name": c.name,
                    "residual": _format_float(c.residual),
                    "tolerance": _format_float(c.tolerance),
                    "passed": c.passed,
                }
                for c in result.report.checks
            ],
            "environment": json.loads(json.dumps(result.report.environment, sort_keys=True)),
            "all_passed": result.report.all_passed,
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_report_text(report: AgreementReport, verbose: bool = False) -> str:
    lines = []
    for p in report.pairs:
        status = "PASS" if p.passed else "FAIL"
        lines.append(
            f"[{status}] {p.method_a} vs {p.method_b}: max |dP| = {p.max_deviation:.3e} "
            f"at (n, m) = {p.argmax_cell} (tol {p.tolerance:.1e})"
        )
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(
            f"[{status}] {c.name}: residual = {c.residual:.3e} (tol {c.tolerance:.1e})"
        )
    if verbose:
        lines.append(f"environment: {json.dumps(report.environment, sort_keys=True)}")
    if not lines:
        lines.append("no comparisons requested")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="reflectedwalk",
        description="Exact distribution of the reflected lattice walk by "
        "four cross-validated methods.",
    )
    parser.add_argument("--config", required=True, help="path to the run config")
    parser.add_argument("--output", help="destination path for the tables")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--methods", help="comma-separated method list override")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.format:
        cfg.format = args.format
    if args.output:
        cfg.output = args.output
    if args.verbose:
        cfg.verbose = True
    if args.methods:
        methods = tuple(tok.strip() for tok in args.methods.split(",") if tok.strip())
        for m in methods:
            if m not in ALL_METHODS:
                print(f"config error: unknown method {m!r}", file=sys.stderr)
                return 2
        cfg.methods = methods

    try:
        result = run(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 2

    rendered = render_csv(result) if cfg.format == "csv" else render_json(result)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    print(render_report_text(result.report, cfg.verbose))
    return 0 if result.report.all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
