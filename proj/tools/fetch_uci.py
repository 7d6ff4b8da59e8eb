#!/usr/bin/env python3
"""Download the UCI household power consumption data into data/.

Usage: python3 tools/fetch_uci.py [--dest DIR]

The acceptance_power test looks for data/household_power_consumption.txt,
or for the path in LSTCN_POWER_CSV.
"""

import argparse
import io
import pathlib
import urllib.request
import zipfile

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00235/household_power_consumption.zip"
NAME = "household_power_consumption.txt"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    root = pathlib.Path(__file__).resolve().parent.parent
    parser.add_argument("--dest", type=pathlib.Path, default=root / "data")
    args = parser.parse_args()

    args.dest.mkdir(parents=True, exist_ok=True)
    target = args.dest / NAME
    if target.exists():
        print(f"{target} already present")
        return
    print(f"downloading {URL}")
    with urllib.request.urlopen(URL) as resp:
        payload = resp.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        zf.extract(NAME, args.dest)
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
