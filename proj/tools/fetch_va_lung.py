#!/usr/bin/env python3
"""Convert the Veterans' Administration lung cancer trial (ARFF, as distributed
by StatLib) into time,event,group CSV files for `maxlrt test`.

Writes <outdir>/va_lung_prior_therapy.csv (group 1: prior therapy) and
<outdir>/va_lung_age65.csv (group 1: aged 65 or over, which gives the 93/44 split). Survival is in days.
"""
import argparse
import csv
import sys
import urllib.request

URL = "http://lib.stat.cmu.edu/datasets/veteran"


def read_arff(lines):
    header, rows, in_data = [], [], False
    for line in lines:
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.lower().startswith("@attribute"):
            header.append(line.split()[1])
        elif line.lower().startswith("@data"):
            in_data = True
        elif in_data:
            rows.append(dict(zip(header, next(csv.reader([line])))))
    return rows


def write(path, rows, group_of):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["time", "event", "group"])
        for r in rows:
            w.writerow([r["Survival_in_days"], int(r["Status"] == "dead"), group_of(r)])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--arff", help="local ARFF file (downloaded when omitted)")
    ap.add_argument("--outdir", default="data")
    args = ap.parse_args()

    if args.arff:
        with open(args.arff) as f:
            lines = f.readlines()
    else:
        with urllib.request.urlopen(URL) as resp:
            lines = resp.read().decode().splitlines()
    rows = read_arff(lines)
    if not rows or "Prior_therapy" not in rows[0]:
        sys.exit("unexpected file layout: expected the ARFF attributes of the VA lung trial")

    write(f"{args.outdir}/va_lung_prior_therapy.csv", rows, lambda r: int(r["Prior_therapy"] == "yes"))
    write(f"{args.outdir}/va_lung_age65.csv", rows, lambda r: int(float(r["Age_in_years"]) >= 65))
    prior = sum(r["Prior_therapy"] == "yes" for r in rows)
    older = sum(float(r["Age_in_years"]) >= 65 for r in rows)
    print(f"{len(rows)} subjects; prior therapy {len(rows) - prior}/{prior}; age>=65 {len(rows) - older}/{older}")


if __name__ == "__main__":
    main()
