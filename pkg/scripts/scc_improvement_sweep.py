"""Mean image steps of prior vs improved SCC decomposition across layer sizes.

Shows how the gain of the truncated skeleton depends on SCC size at a fixed
state count. usage: python3 scripts/scc_improvement_sweep.py --n 10000 --seeds 3
"""
import argparse
import statistics

from asbuchi import SymbolicEngine
from asbuchi.generators import GenParams, gen_layered_scc_graph
from asbuchi.scc import improved_scc_find, scc_find


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--layer-sizes", default="1,5,50,300,500,1000")
    args = ap.parse_args()
    print("| layer size | SCCs | prior | improved | improvement % |")
    print("|---|---|---|---|---|")
    for size in map(int, args.layer_sizes.split(",")):
        prior, impr = [], []
        for seed in range(args.seeds):
            p = GenParams(n=args.n, layers=max(1, args.n // size), intra_degree=1.0, inter_density=1.0, seed=seed)
            g, truth = gen_layered_scc_graph(p)
            for fn, acc in ((scc_find, prior), (improved_scc_find, impr)):
                e = SymbolicEngine(g)
                fn(e)
                acc.append(e.ledger.image_steps)
        a, b = statistics.fmean(prior), statistics.fmean(impr)
        print(f"| {size} | {len(truth)} | {a:.1f} | {b:.1f} | {100 * (a - b) / a:.2f} |")


if __name__ == "__main__":
    main()
