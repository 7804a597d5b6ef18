"""
Coder agreement statistics
==========================

When several experts code the same ads, their consistency bounds what any
classifier can be expected to achieve.  Agreement is compared at digit
prefixes (1 digit = major group, 6 digits = exact occupation): deeper
prefixes can only agree less.  Cohen's kappa corrects the raw rate for
chance agreement.
"""

import numpy as np

from hiertax import CoderTable, agreement_rate, cohens_kappa

rng = np.random.default_rng(42)

# ----------------------------------------------------------------------
# Simulate two experts: they usually share the major group, sometimes
# diverge deeper down - the typical pattern in double-coded samples.

def random_code():
    return (f"{rng.integers(1, 9)}{rng.integers(1, 9)}{rng.integers(1, 9)}"
            f"{rng.integers(1, 9)}{rng.integers(10, 99)}")

coder_a, coder_b = [], []
for _ in range(98):
    a = random_code()
    agree_depth = rng.choice((0, 1, 2, 4, 6), p=(0.10, 0.05, 0.10, 0.15, 0.60))
    if agree_depth == 6:
        b = a
    else:
        b = a[:agree_depth] + random_code()[agree_depth:]
        if b == a:
            b = str((int(a[0]) % 8) + 1) + a[1:]
    coder_a.append(a)
    coder_b.append(b)

table = CoderTable(coder_a=tuple(coder_a), coder_b=tuple(coder_b))

print("agreement between the two coders (95% Wilson CI):")
for digits in (1, 2, 4, 6):
    point, (lo, hi) = agreement_rate(table, digits)
    print(f"  {digits} digit(s): {point:5.1f}%  ({lo:5.1f}, {hi:5.1f})")

print("\nCohen's kappa at 1 digit:", round(cohens_kappa(table, 1), 3))
print("Cohen's kappa at 6 digits:", round(cohens_kappa(table, 6), 3))

# ----------------------------------------------------------------------
# Weighted tables: survey sampling weights enter both the rate and kappa.

weights = tuple(float(w) for w in rng.uniform(0.5, 3.0, size=98))
weighted = CoderTable(coder_a=tuple(coder_a), coder_b=tuple(coder_b), weights=weights)
point, ci = agreement_rate(weighted, 1)
print(f"\nweighted 1-digit agreement: {point:.1f}%  CI {tuple(round(x, 1) for x in ci)}")

# Two coders guessing independently: kappa collapses to about zero even
# though the raw rate stays well above it.
guess_a = tuple(str(rng.integers(1, 5)) for _ in range(5000))
guess_b = tuple(str(rng.integers(1, 5)) for _ in range(5000))
independent = CoderTable(coder_a=guess_a, coder_b=guess_b, digit_levels=(1,))
print("\nindependent guessing: rate "
      f"{agreement_rate(independent, 1)[0]:.1f}%, "
      f"kappa {cohens_kappa(independent, 1):+.3f}")
