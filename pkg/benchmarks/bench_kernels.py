"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py --repeat 5
"""
import argparse

from robust_lotsize import bench


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rows = bench.run(repeat=args.repeat, seed=args.seed)
    header = f"{'workload':<38}{'python [s]':>12}{'cython [s]':>12}{'speedup':>9}  agree"
    print(header)
    print("-" * len(header))
    for row in rows:
        py = row["python"]["seconds"]
        cy = row.get("cython", {}).get("seconds")
        cy_txt = f"{cy:12.4f}" if cy is not None else f"{'n/a':>12}"
        speed = f"{row['speedup']:8.1f}x" if "speedup" in row else f"{'n/a':>9}"
        print(f"{row['workload']:<38}{py:12.4f}{cy_txt}{speed}  {row.get('agree', '-')}")


if __name__ == "__main__":
    main()
