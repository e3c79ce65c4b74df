"""Builds data/breastcancer.csv and data/haberman.csv from pip-installable copies of the UCI data.

    pip install rdatasets imbalanced-databases
    python scripts/make_datasets.py

breastcancer: the Wisconsin (original) breast cancer data as shipped in R's MASS::biopsy;
the 16 rows with a missing BareNuclei value are dropped, leaving 683.
haberman: the Haberman survival data (306 rows) from the KEEL repository copy;
Died = 1 when the patient died within 5 years.
"""
import csv
import io
import pathlib
import zipfile

import imbalanced_databases
import rdatasets

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"

BREAST_COLUMNS = [
    "ClumpThickness", "UniformityOfCellSize", "UniformityOfCellShape",
    "MarginalAdhesion", "SingleEpithelialCellSize", "BareNuclei",
    "BlandChromatin", "NormalNucleoli", "Mitoses",
]


def breastcancer():
    df = rdatasets.data("MASS", "biopsy").dropna()
    with open(OUT / "breastcancer.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(BREAST_COLUMNS + ["Malignant"])
        for _, row in df.iterrows():
            w.writerow([int(row[f"V{k}"]) for k in range(1, 10)]
                       + [1 if row["class"] == "malignant" else 0])
    return len(df)


def haberman():
    root = pathlib.Path(imbalanced_databases.__file__).parent
    text = (root / "data" / "haberman" / "haberman.dat").read_text()
    rows = []
    in_data = False
    for line in io.StringIO(text):
        line = line.strip()
        if not line:
            continue
        if line.lower() == "@data":
            in_data = True
            continue
        if in_data:
            age, year, nodes, cls = [t.strip() for t in line.split(",")]
            rows.append([int(age), int(year), int(nodes), 1 if cls == "positive" else 0])
    with open(OUT / "haberman.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Age", "Year", "Nodes", "Died"])
        w.writerows(rows)
    return len(rows)


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    print("breastcancer", breastcancer())
    print("haberman", haberman())
