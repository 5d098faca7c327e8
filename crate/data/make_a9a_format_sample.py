"""Writes a synthetic 100-row file in the a9a LIBSVM encoding.

a9a one-hot encodes 14 attribute groups into binary features 1..123; each
row activates one feature per group (a group is skipped when the attribute
is missing). The rows here are drawn from a fixed-seed generator, not taken
from the real dataset.
"""
import random

GROUPS = [
    range(1, 6), range(6, 14), range(14, 19), range(19, 35), range(35, 40),
    range(40, 47), range(47, 61), range(61, 67), range(67, 72), range(72, 74),
    range(74, 76), range(76, 78), range(78, 83), range(83, 124),
]
MAY_BE_MISSING = {1, 6}

rng = random.Random(20240601)
lines = []
for _ in range(100):
    idx = []
    for g, group in enumerate(GROUPS):
        if g in MAY_BE_MISSING and rng.random() < 0.06:
            continue
        idx.append(rng.choice(list(group)))
    score = (idx[0] - 3) * 0.4 + sum(1 for i in idx if i in (39, 42, 75)) - 1.2
    label = "+1" if rng.random() < 1 / (1 + 2.718281828 ** (-score)) else "-1"
    lines.append(label + " " + " ".join(f"{i}:1" for i in sorted(idx)))

with open("a9a_format_sample.txt", "w") as f:
    f.write("\n".join(lines) + "\n")
