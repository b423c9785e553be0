#!/usr/bin/env python3
"""Long-running soak campaign over the deque and the scheduler.

Alternates seeded deque stress runs with random-DAG pool runs until the
requested round count (or forever with --rounds 0), failing fast on the
first violation. Useful under a reduced interpreter switch interval:

    python scripts/stress_campaign.py --rounds 20 --switch-interval 1e-6
"""

import argparse
import sys
import time

from stealpool.verify import dag_campaign, deque_stress


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=10, help="0 means run until interrupted")
    parser.add_argument("--items", type=int, default=500_000)
    parser.add_argument("--thieves", type=int, default=4)
    parser.add_argument("--owner-pops", type=int, default=20_000)
    parser.add_argument("--dags-per-round", type=int, default=100)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--seed0", type=int, default=0)
    parser.add_argument("--switch-interval", type=float, default=None)
    args = parser.parse_args(argv)

    if args.switch_interval is not None:
        sys.setswitchinterval(args.switch_interval)

    round_no = 0
    t_start = time.perf_counter()
    while args.rounds == 0 or round_no < args.rounds:
        seed = args.seed0 + round_no
        report = deque_stress(args.owner_pops, args.thieves, args.items, seed)
        if not report.ok:
            print(f"round {round_no}: DEQUE VIOLATION {report.violations}")
            return 1
        results = dag_campaign(args.dags_per_round, 64, 0.15, args.threads,
                               seed0=seed * args.dags_per_round)
        bad = [r for r in results if not r.ok]
        if bad:
            print(f"round {round_no}: DAG VIOLATION {bad[0].violations} (seed {bad[0].seed})")
            return 1
        round_no += 1
        elapsed = time.perf_counter() - t_start
        print(f"round {round_no}: ok "
              f"(deque retries={report.retries}, growths={report.buffer_growths}; "
              f"{args.dags_per_round} dags clean; {elapsed:.1f}s elapsed)",
              flush=True)
    print("campaign clean")
    return 0


if __name__ == "__main__":
    sys.exit(main())
