"""
Token shares and pairwise keys
==============================

The registration centre draws a bivariate polynomial and hands each
participant two univariate restrictions of it. Any two participants then
agree on a key without talking to each other.
"""

from gkalab import SchemeParams, derive_pairwise_key, mrc_setup

params = SchemeParams(p=1009, n=6, t=2, h=4)
master, tokens = mrc_setup(params, seed=2024)

print("master coefficients (rows: powers of x, columns: powers of y)")
for row in master.F.coeffs:
    print("   ", row)

###############################################################################
# Each token holds ``s_y`` with h slots and ``s_x`` with t slots.
tok = tokens[2]
print(tok.to_json())

###############################################################################
# Both ends of a pair reach the same value, and it equals F(x_lo, x_hi).
for i, j in [(1, 3), (2, 6), (4, 5)]:
    a = derive_pairwise_key(tokens[i - 1], j).k
    b = derive_pairwise_key(tokens[j - 1], i).k
    print(f"k_{i},{j}: U_{i} -> {a}   U_{j} -> {b}   F(x_{i}, x_{j}) = {master.F(i, j)}")
