"""Instances where lockstep forward search loses to plain backward reachability.

Player-1 sources choose between a trap and a long line to the target. After
the trap is removed every source lost an edge, so the lockstep search walks
the line once per source; the dovetailed solver stays within twice the
cheaper of the two. usage: python3 scripts/dovetail_motivation.py
"""
import argparse

from asbuchi.generators import line_trap_mdp
from asbuchi.symbolic import smdv_symb_impr_algo, symb_classical, symb_impr_algo


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,200,400,800")
    ap.add_argument("--sources", default="2,8,32")
    args = ap.parse_args()
    print("| n | sources | classical | lockstep | dovetailed | bound |")
    print("|---|---|---|---|---|---|")
    for n in map(int, args.sizes.split(",")):
        for k in map(int, args.sources.split(",")):
            if n < k + 3:
                continue
            g = line_trap_mdp(n, k)
            c, i, s = (f(g, g.target).ledger.image_steps for f in (symb_classical, symb_impr_algo, smdv_symb_impr_algo))
            print(f"| {n} | {k} | {c} | {i} | {s} | {min(2 * c, 2 * i) + 3 * g.m} |")


if __name__ == "__main__":
    main()
