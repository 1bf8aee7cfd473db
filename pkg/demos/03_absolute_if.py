"""Absolute individual fairness on exact rational distribution tables.

A predictor is fair in this sense when it never separates two individuals
whose true-outcome distributions agree. The check can run pairwise or by
comparing the two induced partitions.

Run: python3 demos/03_absolute_if.py
"""
from fractions import Fraction as F

from ifgerry import DistributionTable, check_aif_direct, check_aif_via_mss, partition_by_distribution

half = F(1, 2)
fy = DistributionTable(("no", "yes"), {"ann": (half, half), "bo": (half, half), "cy": (F(1), F(0))})
merge = DistributionTable(("no", "yes"), {"ann": (F(1), F(0)), "bo": (F(1), F(0)), "cy": (F(1), F(0))})
split = DistributionTable(("no", "yes"), {"ann": (F(0), F(1)), "bo": (F(1), F(0)), "cy": (F(1), F(0))})

print("true-outcome partition:", partition_by_distribution(fy).to_json())
for name, fyh in (("merge", merge), ("split", split)):
    v = check_aif_direct(fy, fyh)
    print(f"{name}: direct={v.fair} witness={v.witness} via partitions={check_aif_via_mss(fy, fyh)}")
