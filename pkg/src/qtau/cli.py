"""Command-line interface.

Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from gmpy2 import mpq

from .cache import CACHE_ENV, CacheStore
from .config import CampaignConfig, model_step, parse_rational
from .errors import UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# defaults sized so each campaign finishes in seconds to minutes
DEFAULT_CAPS = {
    "mm": 18, "bgw-q": 14, "c2": 12, "c3": 12, "perpart": 15, "virasoro": 12,
    "cauchy": 12, "hook": 16, "operators": 10, "hirota-bkp": 6, "hirota-kp": 4,
}
Q_CAMPAIGNS = {"mm", "bgw-q", "c2", "c3", "perpart", "cauchy", "hook"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=1, help="worker processes for Q-function tables")
    p.add_argument("--cache-dir", type=Path, default=None,
                   help=f"persistent Q-function cache (default: ${CACHE_ENV})")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="qtau", description="Schur Q-function expansions of KW and BGW tau-functions.")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    part = sub.add_parser("partitions", help="strict partitions")
    psub = part.add_subparsers(dest="action", required=True, parser_class=_Parser)
    pl = psub.add_parser("list", parents=[common])
    pl.add_argument("--weight", type=int, required=True)

    qs = sub.add_parser("qschur", help="Schur Q-functions")
    qsub = qs.add_subparsers(dest="action", required=True, parser_class=_Parser)
    qc = qsub.add_parser("compute", parents=[common])
    qc.add_argument("--lambda", dest="lam", required=True, help="parts, e.g. 4,2")
    qc.add_argument("--max-weight", type=int, default=None)
    qc.add_argument("--normalization", choices=["mac", "mm"], default="mac")
    qc.add_argument("--json", type=Path, default=None, help="also write the polynomial as JSON")
    qe = qsub.add_parser("eval", parents=[common])
    qe.add_argument("--lambda", dest="lam", required=True)
    qe.add_argument("--point", required=True, help="delta1, delta3over3 or @file.json")
    qe.add_argument("--normalization", choices=["mac", "mm"], default="mm")

    tau = sub.add_parser("tau", help="tau-function series")
    tsub = tau.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("cutjoin", "hypergeom", "qexpand"):
        tp = tsub.add_parser(name, parents=[common])
        tp.add_argument("--model", choices=["kw", "bgw"], required=True)
        tp.add_argument("--max-weight", type=int, default=None)
        tp.add_argument("--log", action="store_true", help="print log of the series")
        tp.add_argument("--json", type=Path, default=None)
        tp.add_argument("--csv", type=Path, default=None,
                        help="coefficient table; a PNG of term counts is written alongside")
        tp.add_argument("--no-plot", action="store_true")
        if name == "cutjoin":
            tp.add_argument("--order", type=int, default=None)
            tp.add_argument("--bkp-b", default=None,
                            help="KW only: exp(hbar(W1 + t1^3/144 + b t3)).1 instead")
        if name in ("cutjoin", "hypergeom"):
            g = tp.add_mutually_exclusive_group()
            g.add_argument("--nu", default=None, help="BGW parameter nu = N^2 as p/q")
            g.add_argument("--nu-symbolic", action="store_true")
        if name == "hypergeom":
            g = tp.add_mutually_exclusive_group()
            g.add_argument("--beta", default=None, help="KW normalization beta as p/q")
            g.add_argument("--beta-symbolic", action="store_true")

    ver = sub.add_parser("verify", parents=[common], help="run a verification campaign")
    ver.add_argument("campaign", choices=sorted(DEFAULT_CAPS))
    ver.add_argument("--max-weight", type=int, default=None)
    ver.add_argument("--hbar-order", type=int, default=None)
    ver.add_argument("--model", choices=["kw", "bgw"], default=None,
                     help="virasoro and hirota campaigns; both models when omitted")
    ver.add_argument("--report", type=Path, default=None,
                     help="JSON report; CSV and PNG are written alongside")
    ver.add_argument("--no-plot", action="store_true")

    b = sub.add_parser("bench", parents=[common], help="Q-function construction benchmark")
    b.add_argument("--min-weight", type=int, default=4)
    b.add_argument("--max-weight", type=int, default=16)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--report", type=Path, default=None, help="JSON report; PNG alongside")
    b.add_argument("--no-plot", action="store_true")
    return parser


# -- helpers -------------------------------------------------------------------

def _partition(text: str):
    from .partitions import parse_partition

    try:
        return parse_partition(text)
    except ValueError as exc:
        raise UsageError(f"bad partition {text!r}: {exc}") from None


def _point(text: str) -> dict:
    from .qschur import DELTA1, DELTA3_OVER_3

    if text == "delta1":
        return DELTA1
    if text == "delta3over3":
        return DELTA3_OVER_3
    if text.startswith("@"):
        try:
            raw = json.loads(Path(text[1:]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read point file: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("point file must map odd indices to rationals")
        point = {}
        for k, v in raw.items():
            try:
                k = int(k)
            except ValueError:
                raise UsageError(f"point index {k!r} is not an integer") from None
            if k <= 0 or k % 2 == 0:
                raise UsageError(f"point index {k} must be odd and positive")
            point[k] = parse_rational(str(v), f"t_{k}")
        return point
    raise UsageError("--point must be delta1, delta3over3 or @file.json")


def _setup(args) -> CampaignConfig:
    cfg = CampaignConfig(
        command=f"{args.group} {getattr(args, 'action', None) or getattr(args, 'campaign', '')}".strip(),
        model=getattr(args, "model", None),
        max_weight=getattr(args, "max_weight", None),
        hbar_order=getattr(args, "hbar_order", None) if hasattr(args, "hbar_order") else getattr(args, "order", None),
        nu=getattr(args, "nu", None),
        nu_symbolic=getattr(args, "nu_symbolic", False),
        beta=getattr(args, "beta", None),
        cache_dir=getattr(args, "cache_dir", None),
        report=getattr(args, "report", None),
        threads=getattr(args, "threads", 1),
        plot=not getattr(args, "no_plot", False),
    ).validate()
    if cfg.cache_dir is not None:
        from .qschur import set_default_store

        set_default_store(CacheStore(cfg.cache_dir))
    return cfg


def _flush_cache():
    from .qschur import default_table

    store = default_table().store
    if store is not None:
        store.flush()


def _emit_series(series, args, title: str):
    from .polyring import poly_log
    from .report import write_coefficient_csv

    shown = poly_log(series) if args.log else series
    print(shown)
    if args.json is not None:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps(shown.to_json(), indent=1) + "\n")
    if args.csv is not None:
        write_coefficient_csv(shown, args.csv)
        if not args.no_plot:
            from .plotting import figure_path, plot_series

            plot_series(shown, figure_path(args.csv), title)


# -- commands ----------------------------------------------------------------------

def cmd_partitions(args) -> int:
    from .partitions import enumerate_strict

    if args.weight < 0:
        raise UsageError("--weight must be >= 0")
    print(" / ".join(str(p) for p in enumerate_strict(args.weight)))
    return EXIT_OK


def cmd_qschur(args) -> int:
    from .qschur import q_function, specialized
    from .scalars import format_scalar

    cfg = _setup(args)
    lam = _partition(args.lam)
    if args.action == "compute":
        cap = lam.weight if cfg.max_weight is None else cfg.max_weight
        q = q_function(lam, cap, args.normalization)
        print(q.poly)
        if args.json is not None:
            args.json.write_text(json.dumps(q.poly.to_json(f"Q[{lam}]"), indent=1) + "\n")
    else:
        spec = specialized(_point(args.point))
        value = spec.mm(lam) if args.normalization == "mm" else spec.mac(lam)
        print(format_scalar(value))
    _flush_cache()
    return EXIT_OK


def cmd_tau(args) -> int:
    from .operators import build_W1_family, exp_action
    from .qschur import DELTA1, DELTA3_OVER_3, build_levels, default_table
    from .tau import bgw_r, kw_r, q_expansion_bgw, q_expansion_mm, tau_cutjoin, tau_hypergeometric

    cfg = _setup(args)
    step = model_step(cfg.model)
    if args.action == "cutjoin":
        order, cap = cfg.resolve_orders()
        if args.bkp_b is not None:
            if cfg.model != "kw":
                raise UsageError("--bkp-b applies to the KW operator only")
            b = parse_rational(args.bkp_b, "--bkp-b")
            series = exp_action(build_W1_family(b, cap), order, cap)
        else:
            series = tau_cutjoin(cfg.model, order, nu=cfg.nu_value() if cfg.model == "bgw" else 0, cap=cap)
        title = f"cut-and-join {cfg.model}"
    else:
        if cfg.max_weight is None:
            raise UsageError("--max-weight is required")
        cap = cfg.max_weight
        build_levels(default_table(), cap, cfg.threads)
        if args.action == "qexpand":
            series = q_expansion_mm(cap) if cfg.model == "kw" else q_expansion_bgw(cap)
            title = f"Q-expansion {cfg.model}"
        else:
            if cfg.model == "kw":
                series = tau_hypergeometric(kw_r(cfg.beta_value()), DELTA3_OVER_3, cap,
                                            hbar_cap=mpq(cap, step))
            else:
                series = tau_hypergeometric(bgw_r(cfg.nu_value()), DELTA1, cap)
            title = f"hypergeometric {cfg.model} (times t/2)"
    _emit_series(series, args, title)
    _flush_cache()
    return EXIT_OK


def _hirota_tau(model: str, cap: int, kind: str):
    from .polyring import rescale_times
    from .tau import tau_cutjoin

    step = model_step(model)
    if kind == "bkp":
        return rescale_times(tau_cutjoin(model, cap // step, cap=cap), mpq(1, 2))
    return tau_cutjoin(model, (cap + 1) // step, cap=cap + 1)


def run_campaign(cfg: CampaignConfig, campaign: str):
    """Run one campaign and return its VerificationReport."""
    from .hirota import verify_hirota_bkp, verify_hirota_kp
    from .operators import verify_operator_identity
    from .qschur import build_levels, default_table, verify_cauchy, verify_hook
    from .report import VerificationReport
    from .tau import verify_conjecture, verify_perpart_relation, verify_virasoro

    cap = DEFAULT_CAPS[campaign] if cfg.max_weight is None else cfg.max_weight
    start = time.perf_counter()
    if campaign in Q_CAMPAIGNS:
        build_levels(default_table(), cap, cfg.threads)
    if campaign in ("mm", "bgw-q", "c2", "c3"):
        report = verify_conjecture(campaign, cap)
    elif campaign == "perpart":
        report = verify_perpart_relation(cap)
    elif campaign == "cauchy":
        report = verify_cauchy(cap)
    elif campaign == "hook":
        report = verify_hook(cap)
    elif campaign == "operators":
        report = verify_operator_identity(cap)
    else:
        models = [cfg.model] if cfg.model else ["bgw", "kw"]
        report = VerificationReport(campaign, {"max_weight": cap, "models": models})
        t0 = time.perf_counter()
        for model in models:
            if campaign == "virasoro":
                part = verify_virasoro(model, cap)
            elif campaign == "hirota-bkp":
                part = verify_hirota_bkp(_hirota_tau(model, cap, "bkp"), cap, cfg.hbar_order)
            else:
                part = verify_hirota_kp(_hirota_tau(model, cap, "kp"), cap, cfg.hbar_order)
            report.extend(part, prefix=f"{model}: ")
        if cfg.hbar_order is not None:
            report.parameters["hbar_order"] = cfg.hbar_order
        report.timing["seconds"] = round(time.perf_counter() - t0, 3)
    report.parameters.setdefault("max_weight", cap)
    report.timing["wall_seconds"] = round(time.perf_counter() - start, 3)
    return report


def cmd_verify(args) -> int:
    cfg = _setup(args)
    report = run_campaign(cfg, args.campaign)
    _flush_cache()
    print(report.summary())
    if cfg.report is not None:
        report.write(cfg.report)
        report.write_csv(cfg.report.with_suffix(".csv"))
        if cfg.plot:
            from .plotting import figure_path, plot_report

            plot_report(report, figure_path(cfg.report))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args) -> int:
    from .bench import run_bench

    cfg = _setup(args)
    result = run_bench(args.max_weight, args.min_weight, cfg.threads, cfg.cache_dir, args.repeats)
    print(f"{'weight':>6} {'parts':>6} {'terms':>8} {'cold s':>9} {'warm s':>9} {'assembly s':>10}")
    for lv in result["levels"]:
        print(f"{lv['weight']:>6} {lv['partitions']:>6} {lv['terms']:>8} {lv['cold_seconds']:>9.4f} "
              f"{lv['warm_seconds']:>9.4f} {lv['assembly_seconds']:>10.4f}")
    t = result["totals"]
    print(f"cold {t['cold_seconds']:.3f} s ({t['cold_pfaffian_evaluations']} Pfaffians), "
          f"warm {t['warm_seconds']:.3f} s ({t['warm_pfaffian_evaluations']} Pfaffians), "
          f"speedup {t['speedup']}")
    if cfg.report is not None:
        cfg.report.parent.mkdir(parents=True, exist_ok=True)
        cfg.report.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
        if cfg.plot:
            from .plotting import figure_path, plot_bench

            plot_bench(result, figure_path(cfg.report))
    return EXIT_OK if t["warm_pfaffian_evaluations"] == 0 else EXIT_FAIL


COMMANDS = {
    "partitions": cmd_partitions,
    "qschur": cmd_qschur,
    "tau": cmd_tau,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.group](args)
    except UsageError as exc:
        print(f"qtau: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
