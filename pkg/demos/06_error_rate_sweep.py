"""Small error-rate sweep over the number of elements, written as CSV.

Run: python demos/06_error_rate_sweep.py [out.csv]
"""
import sys

from mimocs.experiments import ExperimentConfig, records_table, run, write_records_csv

cfg = ExperimentConfig(protocol="nonuniform", Z=50, K=3, trials=50,
                       mn_list=[(3, 3), (4, 4), (5, 5), (6, 6)],
                       methods="beamform;omp;lasso;mbmp:d=2,2,1", base_seed=11)
records = run(cfg)
for method, rates in records_table(records).items():
    print(f"{method:14s}" + "  ".join(f"MN={mn}: {r:.2f}" for mn, r in rates.items()))
if len(sys.argv) > 1:
    write_records_csv(sys.argv[1], records)
