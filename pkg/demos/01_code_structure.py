"""Build the dense domain-wall colour code and compare it with the plain colour code.

Run: python3 demos/01_code_structure.py
"""
from __future__ import annotations

from collections import Counter

from dwcode import count_short_pure_logicals, make_code, measure_kappa, min_weight_pure_logical, verify_distance


def describe(code, d):
    weights = Counter(int(w) for w in (code.gx | code.gz).sum(axis=1))
    print(f"{code.family:>6}  n={code.n:<3d} k={code.k}  stabilizer weights {dict(sorted(weights.items()))}")
    print(f"        distance {d} verified: {bool(verify_distance(code, d))}")
    for t in ("X", "Z"):
        print(f"        pure-{t} logicals of weight <= {d}: {count_short_pure_logicals(code, t, d)}")


def main():
    d = 5
    css, x3z3 = make_code("css", d=d), make_code("x3z3", d=d)
    describe(css, d)
    describe(x3z3, d)
    print(f"\nHadamard mask of the X3Z3 code: {''.join(map(str, x3z3.mask))}")
    print(f"domain walls per unit distance: {measure_kappa(x3z3.lattice, x3z3.mask)}")
    # bulk checks carry three X and three Z
    bulk = (x3z3.gx | x3z3.gz).sum(axis=1) == 6
    print(f"bulk checks: {int(bulk.sum())}, X part {set(x3z3.gx[bulk].sum(1).tolist())}, Z part {set(x3z3.gz[bulk].sum(1).tolist())}")

    # on the torus, pure-Z logicals are short: they run along one domain
    per = make_code("x3z3-periodic", L=6)
    Z = min_weight_pure_logical(per, "Z")
    print(f"\nperiodic X3Z3 L=6: n={per.n}, k={per.k}, lightest pure-Z logical weight {Z.weight}")

    cop = make_code("x3z3-coprime", k=1)
    X = min_weight_pure_logical(cop, "X")
    print(f"co-prime X3Z3 (6 x 11): n={cop.n}, lightest pure-X logical weight {X.weight} = n/3")


if __name__ == "__main__":
    main()
