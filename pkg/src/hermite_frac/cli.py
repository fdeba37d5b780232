"""Command-line front end.

Subcommands
-----------
expand         Hermite coefficients of a named test function.
apply          apply H^sigma / H^(-sigma) / a Riesz transform to a named
               function by the spectral route, the pointwise kernel route,
               or both (with the max route difference and a pass/fail gate).
kernel-eval    tabulate one of the kernels along a z-grid.
verify-lemma   run the bound-fit campaign of one computational lemma (5.1-5.10).
verify-theorem run the norm-ratio sweep of one smoothing theorem case.
report         merge prior JSON artifacts into one summary table and render
               the matplotlib figures next to it.

Exit codes: 0 all checks passed, 1 a numerical check failed, 2 bad usage or
inadmissible parameters.  Identical configuration and seed produce
byte-identical reports.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DomainError, NumericalError, PreconditionError
from .fractional import (KernelSpec, MultiplierSpec, frac_pointwise,
                         fracint_pointwise, kernel_eval_batch, multiplier_apply)
from .functions import parse_family
from .hermite import default_rule, expand, synthesize_many
from .lab import (LEMMA_IDS, SCHAUDER_CASES, lemma_campaign, schauder_report,
                  schauder_signature)
from .quadrature import QuadratureSpec
from .reporting import (bound_fit_figure, dump_json, ratio_grid_figure,
                        value_table_figure, write_csv, write_json)
from .riesz import riesz_pointwise, riesz_spectral

OPS = ("Hsigma", "Hinv", "Ri", "Rij", "Riadj")
THREADS_ENV = "HERMITE_FRAC_THREADS"


@dataclass(frozen=True)
class CampaignConfig:
    """Fully resolved run configuration; embedded in every report."""

    command: str
    n: int = 1
    sigma: float = 0.5
    alpha: float = 0.8
    k: int = 1
    op: str = "Hsigma"
    fn: str = "hermite:2"
    route: str = "both"
    kernel: str = "F_sigma"
    index: int = 1
    jindex: int = 1
    lemma: str = ""
    theorem: str = ""
    x: float = 0.0
    grid_min: float = -3.0
    grid_max: float = 3.0
    grid_count: int = 25
    tol: float = 1e-5
    samples: int = 2000
    family_size: int = 12
    seed: int = 0
    threads: int = 1
    panels: int = 200
    pv_delta: float = 1e-3
    box: float = 12.0
    grid_step: float = 0.05
    out: str = "hermite_frac_report"
    fmt: str = "json"
    figures: bool = True
    indir: str = "."

    def quad_spec(self) -> QuadratureSpec:
        return QuadratureSpec(panels=self.panels, pv_delta=self.pv_delta,
                              box=self.box, grid_step=self.grid_step)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "CampaignConfig":
        fields = {f.name for f in dataclasses.fields(CampaignConfig)}
        unknown = set(d) - fields
        if unknown:
            raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
        return CampaignConfig(**d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermite-frac",
                                description="fractional harmonic-oscillator calculus")
    p.add_argument("--config", help="JSON file with defaults for any flag")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"))
        sp.add_argument("--panels", type=int)
        sp.add_argument("--pv-delta", dest="pv_delta", type=float)
        sp.add_argument("--box", type=float)
        sp.add_argument("--grid-step", dest="grid_step", type=float)
        sp.add_argument("--figures", dest="figures", action="store_true", default=None)
        sp.add_argument("--no-figures", dest="figures", action="store_false", default=None)

    sp = sub.add_parser("expand", help="Hermite coefficients of a test function")
    common(sp)
    sp.add_argument("--fn")
    sp.add_argument("--max-degree", dest="k", type=int)

    sp = sub.add_parser("apply", help="apply an operator along a 1-D grid")
    common(sp)
    sp.add_argument("--op", choices=OPS)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--fn")
    sp.add_argument("--route", choices=("spectral", "pointwise", "both"))
    sp.add_argument("--index", type=int)
    sp.add_argument("--jindex", type=int)
    sp.add_argument("--grid-min", dest="grid_min", type=float)
    sp.add_argument("--grid-max", dest="grid_max", type=float)
    sp.add_argument("--grid-count", dest="grid_count", type=int)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("kernel-eval", help="tabulate a kernel along a z-grid")
    common(sp)
    sp.add_argument("--kernel")
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--x", type=float)
    sp.add_argument("--grid-min", dest="grid_min", type=float)
    sp.add_argument("--grid-max", dest="grid_max", type=float)
    sp.add_argument("--grid-count", dest="grid_count", type=int)

    sp = sub.add_parser("verify-lemma", help="bound-fit campaign for one lemma")
    common(sp)
    sp.add_argument("lemma", choices=LEMMA_IDS)
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("verify-theorem", help="norm-ratio sweep for one case")
    common(sp)
    sp.add_argument("theorem", choices=tuple(list(SCHAUDER_CASES) + ["R"]))
    sp.add_argument("--family-size", dest="family_size", type=int)

    sp = sub.add_parser("report", help="merge artifacts and render figures")
    common(sp)
    sp.add_argument("--in", dest="indir")
    return p


def resolve_config(args: argparse.Namespace) -> CampaignConfig:
    base = CampaignConfig(command=args.command).to_dict()
    if getattr(args, "config", None):
        base.update(json.loads(Path(args.config).read_text()))
    for key, val in vars(args).items():
        if key == "config" or val is None:
            continue
        base[key] = val
    base["command"] = args.command
    if "threads" not in {k for k, v in vars(args).items() if v is not None} \
            and os.environ.get(THREADS_ENV):
        base["threads"] = int(os.environ[THREADS_ENV])
    return CampaignConfig.from_dict(base)


# ---------------------------------------------------------------------------
# subcommand implementations


def _single_function(cfg: CampaignConfig):
    fam = parse_family(cfg.fn, cfg.n)
    return fam[0]


def run_expand(cfg: CampaignConfig) -> int:
    u = _single_function(cfg)
    N = cfg.k if cfg.k > 1 else 32
    c = expand(u, cfg.n, N, default_rule(N))
    rows = [[",".join(map(str, nu.components)), nu.order, v]
            for nu, v in sorted(c.items(), key=lambda kv: (kv[0].order, kv[0].components))]
    out = Path(cfg.out)
    write_csv(out.with_suffix(".csv"), ["nu", "order", "coefficient"], rows)
    write_json(out.with_suffix(".json"),
               {"config": cfg.to_dict(),
                "coefficients": {" ".join(map(str, nu.components)): v for nu, v in c.items()}})
    print(f"wrote {out.with_suffix('.csv')} ({len(rows)} coefficients)")
    return 0


def _apply_routes(cfg: CampaignConfig, xs: np.ndarray):
    u = _single_function(cfg)
    spec = cfg.quad_spec()
    spectral = pointwise = None
    if cfg.route in ("spectral", "both"):
        c = expand(u, cfg.n, 64 if cfg.n == 1 else 32)
        if cfg.op == "Hsigma":
            oc = multiplier_apply(MultiplierSpec(cfg.sigma), c)
        elif cfg.op == "Hinv":
            oc = multiplier_apply(MultiplierSpec(-cfg.sigma), c)
        elif cfg.op == "Ri":
            oc = riesz_spectral("R_i", (cfg.index,), c)
        elif cfg.op == "Rij":
            oc = riesz_spectral("R_ij", (cfg.index, cfg.jindex), c)
        else:
            oc = riesz_spectral("R_i_star", (cfg.index,), c)
        spectral = synthesize_many(oc, xs.reshape(-1, 1) if cfg.n == 1 else xs)
    if cfg.route in ("pointwise", "both"):
        vals = []
        for x in xs:
            if cfg.op == "Hsigma":
                if cfg.sigma == 0.0:
                    vals.append(float(u(x)))
                else:
                    vals.append(frac_pointwise(u, cfg.sigma, x, spec))
            elif cfg.op == "Hinv":
                vals.append(fracint_pointwise(u, cfg.sigma, x, spec))
            elif cfg.op == "Ri":
                vals.append(riesz_pointwise("R_i", (cfg.index,), u, x, spec))
            elif cfg.op == "Rij":
                vals.append(riesz_pointwise("R_ij", (cfg.index, cfg.jindex), u, x, spec))
            else:
                vals.append(riesz_pointwise("R_i_star", (cfg.index,), u, x, spec))
        pointwise = np.array(vals)
    return u, spectral, pointwise


def run_apply(cfg: CampaignConfig) -> int:
    if cfg.op in ("Hsigma",) and cfg.sigma == 0.0:
        pass  # H^0 = identity, handled below
    elif cfg.op in ("Hsigma",) and not 0.0 < cfg.sigma < 1.0:
        raise PreconditionError(f"apply --op Hsigma needs sigma in [0,1), got {cfg.sigma}")
    elif cfg.op == "Hinv" and not 0.0 < cfg.sigma <= 1.0:
        raise PreconditionError(f"apply --op Hinv needs sigma in (0,1], got {cfg.sigma}")
    xs = np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_count)
    if cfg.op == "Hsigma" and cfg.sigma == 0.0:
        u = _single_function(cfg)
        same = np.asarray(u(xs), dtype=float)
        spectral = pointwise = same
    else:
        u, spectral, pointwise = _apply_routes(cfg, xs)
    header = ["x"]
    cols = [xs]
    if spectral is not None:
        header.append("spectral")
        cols.append(spectral)
    if pointwise is not None:
        header.append("pointwise")
        cols.append(pointwise)
    diff = None
    if spectral is not None and pointwise is not None:
        diff = float(np.max(np.abs(spectral - pointwise)))
        header.append("abs_diff")
        cols.append(np.abs(spectral - pointwise))
    rows = [list(r) for r in zip(*cols)]
    out = Path(cfg.out)
    write_csv(out.with_suffix(".csv"), header, rows)
    report = {"config": cfg.to_dict(), "max_route_difference": diff,
              "passed": diff is None or diff <= cfg.tol}
    write_json(out.with_suffix(".json"), report)
    if cfg.figures:
        value_table_figure(rows, header, out.with_suffix(".png"),
                           f"{cfg.op} of {cfg.fn} ({cfg.route})")
    if diff is not None:
        print(f"max route difference: {diff:.3e} (tol {cfg.tol:g})")
        if diff > cfg.tol:
            print("FAIL: routes disagree beyond tolerance", file=sys.stderr)
            return 1
    print(f"wrote {out.with_suffix('.csv')}")
    return 0


def run_kernel_eval(cfg: CampaignConfig) -> int:
    from .riesz import riesz_kernel_eval
    zs = np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_count)
    zs = zs[np.abs(zs - cfg.x) > 1e-9]
    spec = cfg.quad_spec()
    if cfg.kernel in ("F_sigma", "F_2k_sigma", "F_neg2k_sigma", "F_neg_sigma"):
        ks = KernelSpec(cfg.kernel, cfg.sigma, dimension=cfg.n, k=cfg.k, quad=spec)
        vals = kernel_eval_batch(ks, np.array([cfg.x] * cfg.n), zs.reshape(-1, 1))
    else:
        vals = np.array([riesz_kernel_eval(cfg.kernel, (cfg.index, cfg.jindex),
                                           np.array([cfg.x] * cfg.n),
                                           np.array([z] * cfg.n), spec) for z in zs])
    rows = [[z, v] for z, v in zip(zs, vals)]
    out = Path(cfg.out)
    write_csv(out.with_suffix(".csv"), ["z", cfg.kernel], rows)
    write_json(out.with_suffix(".json"), {"config": cfg.to_dict(),
                                          "count": len(rows)})
    if cfg.figures:
        value_table_figure(rows, ["z", cfg.kernel], out.with_suffix(".png"),
                           f"{cfg.kernel}(x={cfg.x}, z)")
    print(f"wrote {out.with_suffix('.csv')}")
    return 0


def run_verify_lemma(cfg: CampaignConfig) -> int:
    reports = lemma_campaign(cfg.lemma, samples=cfg.samples, seed=cfg.seed,
                             n=cfg.n, spec=cfg.quad_spec(), threads=cfg.threads)
    ok = all(r.passed for r in reports)
    payload = {"config": cfg.to_dict(), "lemma": cfg.lemma,
               "passed": ok, "fits": [dataclasses.asdict(r) for r in reports]}
    out = Path(cfg.out)
    write_json(out.with_suffix(".json"), payload)
    rows = [[r.name, r.constant, r.stability_ratio if r.stability_ratio is not None else "",
             r.stability_pass, r.samples] for r in reports]
    write_csv(out.with_suffix(".csv"),
              ["name", "constant", "stability_ratio", "stability_pass", "samples"], rows)
    for r in reports:
        flag = "pass" if r.passed else "FAIL"
        print(f"[{flag}] {r.name}: C*={r.constant:.6g} stability={r.stability_ratio}")
    if not ok:
        print("FAIL: a bound fit was unstable or non-finite", file=sys.stderr)
        return 1
    return 0


def run_verify_theorem(cfg: CampaignConfig) -> int:
    cases = ("R_i", "R_ij", "R_i_star") if cfg.theorem == "R" else (cfg.theorem,)
    alphas = np.linspace(0.15, 0.95, 5)
    sigmas = np.linspace(0.1, 0.9, 5)
    entries = []
    for case in cases:
        for alpha in alphas:
            sig_list = [None] if case.startswith("R") else sigmas
            for sigma in sig_list:
                try:
                    schauder_signature(case, float(alpha),
                                       None if sigma is None else float(sigma))
                except PreconditionError:
                    continue
                rep = schauder_report(case, float(alpha),
                                      None if sigma is None else float(sigma),
                                      family_size=cfg.family_size, seed=cfg.seed)
                entries.append({"case": case, "alpha": float(alpha),
                                "sigma": None if sigma is None else float(sigma),
                                "constant": rep.constant,
                                "stability_ratio": rep.stability_ratio,
                                "stability_pass": rep.stability_pass})
    ok = bool(entries) and all(e["stability_pass"] for e in entries)
    out = Path(cfg.out)
    write_json(out.with_suffix(".json"),
               {"config": cfg.to_dict(), "theorem": cfg.theorem, "passed": ok,
                "ratios": entries})
    write_csv(out.with_suffix(".csv"),
              ["case", "alpha", "sigma", "ratio", "stability_ratio", "stability_pass"],
              [[e["case"], e["alpha"], e["sigma"] if e["sigma"] is not None else "",
                e["constant"], e["stability_ratio"], e["stability_pass"]] for e in entries])
    if cfg.figures:
        ratio_grid_figure(entries, out.with_suffix(".png"),
                          f"norm ratios, case {cfg.theorem}")
    for e in entries:
        flag = "pass" if e["stability_pass"] else "FAIL"
        print(f"[{flag}] {e['case']} alpha={e['alpha']:.2f} sigma={e['sigma']}: "
              f"ratio={e['constant']:.4g}")
    return 0 if ok else 1


def run_report(cfg: CampaignConfig) -> int:
    indir = Path(cfg.indir)
    artifacts = sorted(indir.glob("*.json"))
    if not artifacts:
        raise PreconditionError(f"no JSON artifacts found under {indir}")
    fits, ratios, rows = [], [], []
    all_pass = True
    for art in artifacts:
        data = json.loads(art.read_text())
        passed = data.get("passed")
        if passed is False:
            all_pass = False
        kind = data.get("lemma") or data.get("theorem") \
            or data.get("config", {}).get("command", "artifact")
        rows.append([art.name, str(kind), passed if passed is not None else ""])
        fits.extend(data.get("fits", []))
        ratios.extend(data.get("ratios", []))
    out = Path(cfg.out)
    write_csv(out.with_suffix(".csv"), ["artifact", "kind", "passed"], rows)
    write_json(out.with_suffix(".json"),
               {"config": cfg.to_dict(), "artifacts": [a.name for a in artifacts],
                "passed": all_pass, "fit_count": len(fits), "ratio_count": len(ratios)})
    if cfg.figures:
        figdir = out.parent / (out.name + "_figures")
        if fits:
            bound_fit_figure(fits, figdir / "bound_fits.png")
        if ratios:
            ratio_grid_figure(ratios, figdir / "norm_ratios.png", "norm ratios")
    print(f"merged {len(artifacts)} artifacts; all passed: {all_pass}")
    return 0 if all_pass else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.command == "expand":
            return run_expand(cfg)
        if cfg.command == "apply":
            return run_apply(cfg)
        if cfg.command == "kernel-eval":
            return run_kernel_eval(cfg)
        if cfg.command == "verify-lemma":
            return run_verify_lemma(cfg)
        if cfg.command == "verify-theorem":
            return run_verify_theorem(cfg)
        if cfg.command == "report":
            return run_report(cfg)
        parser.error(f"unknown command {cfg.command}")
    except (PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 2


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
