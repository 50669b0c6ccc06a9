#!/usr/bin/env python3
"""Download the UCI classification datasets used by the acceptance suite.

Writes data/banknote.csv and data/hill_valley_noise.csv (header row, target
column "class"). Existing files are left alone unless --force is given.
"""

import argparse
import csv
import io
import pathlib
import sys
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu"

BANKNOTE = [
    f"{UCI}/ml/machine-learning-databases/00267/data_banknote_authentication.txt",
    f"{UCI}/static/public/267/banknote+authentication.zip",
]
HILL_VALLEY = [
    (
        f"{UCI}/ml/machine-learning-databases/hill-valley/Hill_Valley_with_noise_Training.data",
        f"{UCI}/ml/machine-learning-databases/hill-valley/Hill_Valley_with_noise_Testing.data",
    ),
    f"{UCI}/static/public/166/hill+valley.zip",
]


def fetch(url):
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def member(blob, suffix):
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        for name in zf.namelist():
            if name.endswith(suffix):
                return zf.read(name)
    raise KeyError(suffix)


def parse_rows(text, skip_header):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    return rows[1:] if skip_header else rows


def banknote_rows():
    errors = []
    for url in BANKNOTE:
        try:
            blob = fetch(url)
            if url.endswith(".zip"):
                blob = member(blob, "data_banknote_authentication.txt")
            return parse_rows(blob.decode(), skip_header=False)
        except Exception as exc:  # try the next mirror
            errors.append(f"{url}: {exc}")
    raise RuntimeError("banknote download failed:\n  " + "\n  ".join(errors))


def hill_valley_rows():
    errors = []
    for source in HILL_VALLEY:
        try:
            if isinstance(source, tuple):
                parts = [fetch(u).decode() for u in source]
            else:
                blob = fetch(source)
                parts = [
                    member(blob, "Hill_Valley_with_noise_Training.data").decode(),
                    member(blob, "Hill_Valley_with_noise_Testing.data").decode(),
                ]
            rows = []
            for text in parts:
                rows.extend(parse_rows(text, skip_header=True))
            return rows
        except Exception as exc:
            errors.append(f"{source}: {exc}")
    raise RuntimeError("hill valley download failed:\n  " + "\n  ".join(errors))


def write(path, header, rows, force):
    if path.exists() and not force:
        print(f"{path} exists, skipping")
        return
    with path.open("w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c.strip() for c in row])
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default=pathlib.Path(__file__).resolve().parent.parent / "data",
                        type=pathlib.Path)
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args()
    args.data_dir.mkdir(parents=True, exist_ok=True)

    status = 0
    try:
        write(args.data_dir / "banknote.csv", ["variance", "skewness", "curtosis", "entropy", "class"],
              banknote_rows(), args.force)
    except RuntimeError as exc:
        print(exc, file=sys.stderr)
        status = 1
    try:
        write(args.data_dir / "hill_valley_noise.csv", [f"X{i}" for i in range(1, 101)] + ["class"],
              hill_valley_rows(), args.force)
    except RuntimeError as exc:
        print(exc, file=sys.stderr)
        status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
