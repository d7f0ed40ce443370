# Exact matching expectations
#
# Every quantity here is an average over all M! environments, computed in
# rational arithmetic.

from digraph_spectra.degrees import regular, validate
from digraph_spectra.oracle import (F_value, F_value_by_expansion, entry_functional,
                                    exact_expectation, family_sweep, parse_proto_path,
                                    small_sequences, tech_bound_check)

seq = validate([2, 3], [3, 2])
for i in range(2):
    for j in range(2):
        print(f"E[P({i},{j})] =", exact_expectation(seq, entry_functional(seq, i, j)))

# A centered couple repeated twice: (1/M)(1 - 1/M) / d^2.

two = regular(2, 2)
pp = parse_proto_path("p=2; (0,0,+)/(0,0,-) (0,0,+)/(0,0,-)", two)
print("F =", F_value(two, pp), " by expansion:", F_value_by_expansion(two, pp))
chk = tech_bound_check(two, pp, c=2.0)
print(f"bound {chk.rhs:.4f}, ratio {chk.ratio:.4f}, in regime {chk.in_regime}")

# The whole family of proto-paths up to length 2 for every sequence with M <= 4.

for s in small_sequences(4):
    sw = family_sweep(s, 2, [2.0])
    print(s.types(), len(sw), "proto-paths,", sw.violations(2.0).size, "violations")
