#!/usr/bin/env python3
"""Write a small 5-field record fixture and its summary tally.

Usage: corpus_oracle.py <fixture.jsonl> <tally.json>
"""
import json
import random
import statistics
import sys

FIELDS = {
    "LifeSciBiomed": ["Mycology", "Ecology", "Ornithology"],
    "Multidisciplinary": ["Multidisciplinary Sciences"],
    "PhysicalSci": ["Geology", "Astronomy & Astrophysics"],
    "SocialSci": ["Economics", "Psychology, Social"],
    "Technology": ["Acoustics", "Computer Science, Artificial Intelligence"],
}


def main():
    rng = random.Random(77)
    records = []
    for i in range(90):
        field = rng.choice(sorted(FIELDS))
        subject = rng.choice(FIELDS[field])
        c3 = rng.choice([0, 0, 1, 2, 5, 9])
        c5 = c3 + rng.choice([0, 0, 3, 7])
        ct = c5 + rng.choice([0, 4, 20])
        rec = {
            "id": f"F{i:03d}", "doi": None if i % 4 == 0 else f"10.1000/{i}",
            "title": f"Title {i}", "abstract": "word " * rng.randint(150, 320),
            "pub_year": rng.randint(1994, 2024), "author_count": rng.choice([0, 1, 2, 3, 4, 7, 15]),
            "primary_subject": subject,
            "cit3": c3 if i % 9 else None, "cit5": c5, "cit_total": ct,
        }
        if field == "Multidisciplinary" and i % 2 == 0:
            rec["primary_subject"] = "Underwater Basketweaving"
            field = None
        records.append((rec, field))

    with open(sys.argv[1], "w", encoding="utf-8", newline="\n") as fh:
        for rec, _ in records:
            fh.write(json.dumps(rec) + "\n")

    def stats(rows):
        out = {"n": len(rows)}
        a = [r["author_count"] for r in rows]
        out["authors"] = {
            "mean": statistics.fmean(a) if a else None,
            "median": statistics.median(a) if a else None,
            "max": max(a) if a else None,
            "sd": statistics.stdev(a) if len(a) > 1 else None,
            "zeros": a.count(0),
        }
        for key in ["cit3", "cit5", "cit_total"]:
            v = [r[key] for r in rows if r[key] is not None]
            out[key] = {
                "n": len(v),
                "mean": statistics.fmean(v) if v else None,
                "median": statistics.median(v) if v else None,
                "sd": statistics.stdev(v) if len(v) > 1 else None,
                "zeros": v.count(0),
                "zeros_percent": 100.0 * v.count(0) / len(v) if v else None,
            }
        return out

    tally = {f: stats([r for r, g in records if g == f]) for f in FIELDS}
    tally["All"] = stats([r for r, _ in records])
    tally["unmapped"] = sum(1 for _, g in records if g is None)
    tally["spaces"] = [r["abstract"].count(" ") for r, _ in records]
    with open(sys.argv[2], "w", encoding="utf-8") as fh:
        json.dump(tally, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
