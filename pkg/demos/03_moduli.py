"""
Counting moduli
===============

Tangent space of the constraint variety minus the gauge orbit, compared with
the closed-form dimension of each block family.
"""
from tlrefl.kfactory import Nilpotent, TwoEigen, moduli_dim, numeric_moduli_check, sample_subblock

cases = [Nilpotent(2, 1, True), Nilpotent(4, 1, True), Nilpotent(4, 2, True),
         TwoEigen(3, 1), TwoEigen(4, 1), TwoEigen(5, 2), TwoEigen(6, 1)]

print(f"{'family':<16}{'real params':>12}{'rank J':>8}{'gauge':>7}{'moduli':>8}{'formula':>9}")
for template in cases:
    r = numeric_moduli_check(sample_subblock(template, seed=3))
    print(f"{template.label():<16}{r['real_params']:>12}{r['jacobian_rank']:>8}{r['gauge_dim_real']:>7}"
          f"{r['moduli_complex']:>8g}{r['expected_complex']:>9}")

# m' and s - m' describe the same space
print([moduli_dim("TwoEigen", s=7, m_prime=m) for m in range(1, 7)])

# The disjoint-support nilpotent sample is a special point: the count is off
special = numeric_moduli_check(sample_subblock(Nilpotent(4, 1), seed=3))
print("canonical Nilpotent(4,1):", special["moduli_complex"], "vs", special["expected_complex"])
