#!/usr/bin/env python3
# Copyright 2026 The fmqubos Authors
#
#    Licensed under the Apache License, Version 2.0 (the "License");
#    you may not use this file except in compliance with the License.
#    You may obtain a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS,
#    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#    See the License for the specific language governing permissions and
#    limitations under the License.

"""Rewrite a dose-response table into the canonical record CSV.

Source tables differ between releases, so the column mapping is given on the
command line. Concentrations are mapped to 0-based level indices by ranking
the distinct concentrations of each drug (per drug, across the file).

    convert_records.py source.csv out.csv \
        --drug-a DrugRow --drug-b DrugCol --cell-line CellLine \
        --conc-a ConcRow --conc-b ConcCol --response Inhibition
"""

import argparse
import csv
import sys
from collections import defaultdict

HEADER = ["drug_a", "drug_b", "cell_line", "conc_a_level", "conc_b_level", "response"]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("source")
    p.add_argument("output")
    for name in ("drug-a", "drug-b", "cell-line", "conc-a", "conc-b", "response"):
        p.add_argument("--" + name, required=True, help="source column name")
    args = p.parse_args(argv)

    with open(args.source, newline="") as f:
        rows = list(csv.DictReader(f))

    concs = defaultdict(set)
    for r in rows:
        concs[r[args.drug_a]].add(float(r[args.conc_a]))
        concs[r[args.drug_b]].add(float(r[args.conc_b]))
    level = {d: {c: i for i, c in enumerate(sorted(cs))} for d, cs in concs.items()}

    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(HEADER)
        for r in rows:
            a, b = r[args.drug_a], r[args.drug_b]
            w.writerow([a, b, r[args.cell_line], level[a][float(r[args.conc_a])],
                        level[b][float(r[args.conc_b])], r[args.response]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
