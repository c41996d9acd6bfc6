"""Real vs random clustering and path length for ring lattices with
increasing rewiring probability."""

import argparse

from dappnet.nullmodels import RandomizationConfig, ring_lattice_rewired, small_world_comparison


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--realizations", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'p':>6} {'C_real':>8} {'C_rand':>8} {'L_real':>8} {'L_rand':>8}")
    for p in (0.0, 0.01, 0.05, 0.1, 0.3, 1.0):
        g = ring_lattice_rewired(args.n, args.k, p, args.seed)
        sw = small_world_comparison(g, RandomizationConfig(seed=args.seed, n_realizations=args.realizations))
        print(f"{p:6.2f} {sw.real_clustering:8.3f} {sw.random_clustering_mean:8.3f} "
              f"{sw.real_avg_path:8.3f} {sw.random_avg_path_mean:8.3f}")


if __name__ == "__main__":
    main()
