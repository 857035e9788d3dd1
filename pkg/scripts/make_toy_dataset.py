"""Regenerate the bundled toy bibliographic dataset (seeded, deterministic).

    python3 scripts/make_toy_dataset.py [--out src/objsum/data/toy/tuples]
"""

from __future__ import annotations

import argparse
import csv
import random
from pathlib import Path

CONFERENCES = ["SIGCOMM", "SIGMOD", "VLDB", "ICDE", "KDD", "SIGGRAPH", "INFOCOM", "PODS"]
YEARS = list(range(1994, 2004))

FAMOUS = ["Christos Faloutsos", "Michalis Faloutsos", "Petros Faloutsos"]
OTHERS = [
    "Rakesh Agrawal", "Nick Roussopoulos", "Timos Sellis", "Pravin Bhagwat", "Dimitris Metaxas",
    "Carlton Niblack", "Dragutin Petkovic", "Peter Yanker", "Anindo Banerjee", "Rajesh Pankaj",
    "Aiguo Fei", "Michiel van de Panne", "Demetri Terzopoulos", "Ibrahim Kamel", "King-Ip Lin",
    "Flip Korn", "Agma Traina", "Caetano Traina", "Spiros Papadimitriou", "Jimeng Sun",
    "Hanghang Tong", "Deepayan Chakrabarti", "Jure Leskovec", "Yiannis Kotidis", "Evangelos Milios",
    "Srinivasan Seshan", "Thomas Karagiannis", "Georgos Siganos", "Marina Papatriantafilou",
    "Anastassia Ailamaki", "Lipyeow Lim", "Ming-Syan Chen", "Hosagrahar Jagadish", "Walid Aref",
    "Beng Chin Ooi", "Kian-Lee Tan", "Divesh Srivastava", "Nikos Mamoulis", "Yufei Tao",
    "Dimitris Papadias", "Panos Kalnis", "Eamonn Keogh",
]

WORDS_A = ["Fast", "Efficient", "Scalable", "Robust", "Adaptive", "Approximate", "Incremental",
           "Distributed", "Optimal", "Online"]
WORDS_B = ["Indexing", "Mining", "Clustering", "Routing", "Sampling", "Querying", "Ranking",
           "Summarization", "Compression", "Animation"]
WORDS_C = ["Time Sequences", "Spatial Data", "Large Graphs", "the Internet Topology", "Data Streams",
           "Multimedia Databases", "Wireless Networks", "Relational Databases", "Character Motion",
           "Power-law Networks"]

FIXED_PAPERS = [
    ("On Power-law Relationships of the Internet Topology", FAMOUS, "SIGCOMM", 1999),
    ("Fast Subsequence Matching in Time-Series Databases", ["Christos Faloutsos", "Yiannis Kotidis"],
     "SIGMOD", 1994),
    ("The QBIC Project: Querying Images by Content", ["Christos Faloutsos", "Carlton Niblack",
                                                    "Dragutin Petkovic", "Peter Yanker"], "SIGMOD", 1995),
    ("Composable Controllers for Physics-Based Character Animation",
     ["Petros Faloutsos", "Michiel van de Panne", "Demetri Terzopoulos"], "SIGGRAPH", 2001),
    ("QoS Routing in Mobile Ad-hoc Networks", ["Michalis Faloutsos", "Anindo Banerjee", "Rajesh Pankaj"],
     "INFOCOM", 2000),
]


def generate(seed: int = 7, n_papers: int = 90) -> dict[str, list[dict[str, str]]]:
    rng = random.Random(seed)
    authors = FAMOUS + OTHERS
    author_id = {name: str(i) for i, name in enumerate(authors, start=1)}
    conf_id = {name: str(i) for i, name in enumerate(CONFERENCES, start=1)}
    years, year_id = [], {}
    for conf in CONFERENCES:
        for y in rng.sample(YEARS, 4) + ([1999, 2001, 1994, 1995, 2000] if conf in
                                         ("SIGCOMM", "SIGMOD", "SIGGRAPH", "INFOCOM") else []):
            if (conf, y) not in year_id:
                year_id[conf, y] = str(len(years) + 1)
                years.append({"id": year_id[conf, y], "year": str(y), "conference_id": conf_id[conf]})
    venues = sorted(year_id)

    papers, writes = [], []

    def add_paper(title, names, venue):
        pid = str(len(papers) + 1)
        yid = year_id.get(venue, "") if venue else ""
        papers.append({"id": pid, "title": title, "year_id": yid})
        for name in names:
            writes.append({"id": str(len(writes) + 1), "author_id": author_id[name], "paper_id": pid})
        return pid

    for title, names, conf, y in FIXED_PAPERS:
        add_paper(title, names, (conf, y))
    # Productive authors write more: weights fall off with list position.
    weights = [8.0, 5.0, 4.0] + [1.0 / (1 + 0.1 * i) for i in range(len(OTHERS))]
    seen_titles = {p["title"] for p in papers}
    while len(papers) < n_papers:
        title = f"{rng.choice(WORDS_A)} {rng.choice(WORDS_B)} of {rng.choice(WORDS_C)}"
        if title in seen_titles:
            continue
        seen_titles.add(title)
        k = rng.choice([1, 2, 2, 3, 3, 4])
        names = []
        while len(names) < k:
            name = rng.choices(authors, weights)[0]
            if name not in names:
                names.append(name)
        venue = rng.choice(venues) if rng.random() < 0.95 else None
        add_paper(title, names, venue)

    cites, pairs = [], set()
    popularity = [1.0] * len(papers)
    for i in range(len(papers)):
        for _ in range(rng.choice([0, 1, 2, 2, 3, 4])):
            j = rng.choices(range(len(papers)), popularity)[0]
            if j == i or (i, j) in pairs:
                continue
            pairs.add((i, j))
            popularity[j] += 1.0
            cites.append({"id": str(len(cites) + 1), "citing_id": papers[i]["id"], "cited_id": papers[j]["id"]})

    return {
        "Author": [{"id": author_id[a], "name": a} for a in authors],
        "Paper": papers,
        "Writes": writes,
        "Cites": cites,
        "Year": years,
        "Conference": [{"id": conf_id[c], "name": c} for c in CONFERENCES],
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "src/objsum/data/toy/tuples")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for rel, rows in generate(args.seed).items():
        with open(args.out / f"{rel}.csv", "w", newline="", encoding="utf-8") as fh:
            out = csv.DictWriter(fh, fieldnames=list(rows[0]))
            out.writeheader()
            out.writerows(rows)
        print(f"{rel}: {len(rows)} rows")


if __name__ == "__main__":
    main()
