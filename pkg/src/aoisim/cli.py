"""Batch experiment driver.

Subcommands: gen-trace, run, opt, ratio, verify-bounds, yao.  All randomness
flows from the explicit --seed (split deterministically per replication), so
every table is byte-reproducible.  Exit status: 0 on success, 1 on a failed
bound/invariant check, 2 on input or guard errors.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis
from .adversaries import gen_iid_trace, gen_yao_trace, make_adversary, mobility_random_walk, mobility_static
from .model import (
    InputError,
    SimulationError,
    SystemConfig,
    read_trace,
    run_simulation,
    write_runlog,
    write_trace,
)
from .oracle import opt_exact_dp, opt_single_good, replay_schedule
from .policies import POLICY_NAMES, make_policy


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aoisim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-trace", help="generate a trace file")
    g.add_argument("--kind", required=True, choices=["yao", "iid", "blocking", "relocating"])
    g.add_argument("-N", "--users", type=int, required=True)
    g.add_argument("-M", "--stations", type=int, default=1)
    g.add_argument("-T", "--horizon", type=int, required=True)
    g.add_argument("--seed", type=int, default=None, help="mandatory for stochastic kinds")
    g.add_argument("--mobility", choices=["static", "walk"], default="static",
                   help="location process for --kind iid")
    g.add_argument("--good-prob", type=float, default=None,
                   help="per-user Good probability for --kind iid (default 1/N)")
    g.add_argument("--policy", choices=POLICY_NAMES, default="cma",
                   help="policy the adaptive kinds play against")
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="simulate a policy on a trace")
    r.add_argument("--trace", required=True)
    r.add_argument("--policy", choices=POLICY_NAMES, default="cma")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="write the run log as CSV")

    o = sub.add_parser("opt", help="offline optimal cost (or certified lower bound)")
    o.add_argument("--trace", required=True)
    o.add_argument("--method", choices=["dp", "single-good", "certificate"], default="dp")
    o.add_argument("--out", help="write the optimal schedule's run log as CSV")

    q = sub.add_parser("ratio", help="policy cost / OPT cost on a trace")
    q.add_argument("--trace", required=True)
    q.add_argument("--policy", choices=POLICY_NAMES, default="cma")
    q.add_argument("--opt-method", choices=["dp", "single-good", "certificate"], default="dp")
    q.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify-bounds", help="super-interval checks on a max-age run")
    v.add_argument("--trace", required=True)

    y = sub.add_parser("yao", help="single-Good distribution experiment")
    y.add_argument("-N", "--users", type=int, required=True)
    y.add_argument("-T", "--horizon", type=int, default=100000)
    y.add_argument("--replications", type=int, default=20)
    y.add_argument("--seed", type=int, required=True)
    y.add_argument("--policy", choices=POLICY_NAMES, default="cma")

    return p


def _cmd_gen_trace(args) -> int:
    cfg = SystemConfig(args.users, args.stations, args.horizon)
    stochastic = args.kind in ("yao", "iid") or args.mobility == "walk" or args.policy == "random"
    if stochastic and args.seed is None:
        raise InputError("--seed is mandatory for stochastic components")
    if args.kind == "yao":
        trace = gen_yao_trace(cfg, args.seed)
    elif args.kind == "iid":
        prob = args.good_prob if args.good_prob is not None else 1.0 / cfg.num_users
        mobility = (
            mobility_random_walk(cfg, args.seed + 1)
            if args.mobility == "walk"
            else mobility_static(cfg)
        )
        trace = gen_iid_trace(cfg, [prob] * cfg.num_users, args.seed, mobility)
    else:
        adversary = make_adversary(args.kind, cfg)
        log = run_simulation(cfg, adversary, make_policy(args.policy), seed=args.seed or 0)
        trace = log.realized_trace()
    write_trace(trace, args.out)
    print(f"wrote {args.out} kind={args.kind} N={cfg.num_users} M={cfg.num_stations} T={cfg.horizon}")
    return 0


def _cmd_run(args) -> int:
    trace = read_trace(args.trace)
    log = run_simulation(trace.config, trace, make_policy(args.policy), seed=args.seed)
    if args.out:
        write_runlog(log, args.out)
    print(
        f"policy={args.policy} cost={log.cumulative_cost} "
        f"average_age={float(log.average_age_cost):.6f}"
    )
    return 0


def _cmd_opt(args) -> int:
    trace = read_trace(args.trace)
    if args.method == "dp":
        result = opt_exact_dp(trace)
        print(f"method=dp cost={result.cost} states={result.states_explored}")
    elif args.method == "single-good":
        result = opt_single_good(trace)
        print(f"method=single-good cost={result.cost}")
    else:
        bound, intervals, _ = analysis.certified_opt_lower_bound(trace)
        print(f"method=certificate lower_bound={bound} intervals={len(intervals)}")
        return 0
    if args.out:
        write_runlog(replay_schedule(trace, result.schedule), args.out)
    return 0


def _cmd_ratio(args) -> int:
    trace = read_trace(args.trace)
    result = analysis.empirical_eta(args.policy, [trace], args.opt_method, seed=args.seed)
    r = result.worst
    print("trace,policy,policy_cost,opt_method,opt_value,ratio")
    print(f"{r.trace_digest},{args.policy},{r.policy_cost},{r.method},{r.opt_value},{r.ratio:.6f}")
    return 0


def _cmd_verify_bounds(args) -> int:
    trace = read_trace(args.trace)
    log = run_simulation(trace.config, trace, make_policy("cma"))
    intervals = analysis.decompose_super_intervals(log)
    rows = analysis.per_interval_cma_bound(intervals, log)
    print("interval,start,end,length,max_user,complete,measured_cost,nominal_bound,bound,ok")
    ok = True
    for row in rows:
        iv = row.interval
        print(
            f"{iv.index},{iv.start},{iv.end},{iv.length},{iv.max_user + 1},"
            f"{int(iv.complete)},{row.measured_cost},{row.nominal_bound:.1f},{row.bound:.1f},{int(row.ok)}"
        )
        ok &= row.ok
    recency = analysis.verify_max_user_recency(intervals, log)
    print(f"recency_ok={int(recency.ok)} used_virtual_success={int(recency.used_virtual_success)}")
    from .oracle import opt_lower_bound_superintervals

    certificate = opt_lower_bound_superintervals(intervals)
    ceiling = analysis.total_cma_bound(intervals, trace.config.num_users)
    ratio_cert = log.cumulative_cost / certificate
    print(
        f"cma_cost={log.cumulative_cost} total_bound={ceiling:.1f} "
        f"opt_certificate={certificate} certified_ratio={ratio_cert:.6f}"
    )
    ok &= recency.ok and ratio_cert <= 2 * trace.config.num_users
    print(f"all_ok={int(ok)}")
    return 0 if ok else 1


def _cmd_yao(args) -> int:
    n = args.users
    opt_est, hist = analysis.estimate_opt_stationary(n, args.horizon, args.replications, args.seed)
    pol_est = analysis.estimate_policy_time_avg_max(
        args.policy, n, args.horizon, args.replications, args.seed
    )
    print("quantity,n,horizon,replications,mean,half_width")
    for est in (opt_est, pol_est):
        print(
            f"{est.tag},{est.num_users},{est.horizon},{est.replications},"
            f"{est.mean:.6f},{est.half_width:.6f}"
        )
    floor = analysis.yao_ratio_floor(n, pol_est, opt_est)
    print(f"empirical-ratio-floor,{n},{args.horizon},{args.replications},{floor:.6f},")
    if n >= 3:
        print(f"analytic-ratio-floor,{n},,,{analysis.analytic_ratio_floor(n):.6f},")
    tv = analysis.tv_distance_geometric(hist, n)
    print(f"opt-age-tv-to-geometric,{n},{args.horizon},{args.replications},{tv:.6f},")
    return 0


_COMMANDS = {
    "gen-trace": _cmd_gen_trace,
    "run": _cmd_run,
    "opt": _cmd_opt,
    "ratio": _cmd_ratio,
    "verify-bounds": _cmd_verify_bounds,
    "yao": _cmd_yao,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
