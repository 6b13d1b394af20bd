#!/usr/bin/env python3
"""Convert an id-linked derivational lexicon export to the native forest TSV.

Word-formation lexicons are commonly distributed as one node per line with
numeric ids: the node id in one column, the lemma in another, and the parent
node's id (empty for roots) in a third. This script flattens that into the
toolkit's ``lemma<TAB>parent-lemma`` format. Column positions are flags, so a
layout change in the upstream release only needs different arguments, not a
code change; the defaults fit the DeriNet 2.0 column order.

Usage:
    python scripts/derinet_to_forest.py nodes.tsv > forest.tsv
    python scripts/derinet_to_forest.py --id-col 0 --lemma-col 2 --parent-col 6 nodes.tsv
"""

from __future__ import annotations

import argparse
import sys


def convert(lines, id_col: int, lemma_col: int, parent_col: int, out) -> int:
    ids_to_lemma: dict[str, str] = {}
    rows: list[tuple[str, str]] = []
    for line in lines:
        line = line.rstrip("\n")
        if not line:
            continue
        cols = line.split("\t")
        node_id = cols[id_col]
        lemma = cols[lemma_col]
        parent_id = cols[parent_col] if parent_col < len(cols) else ""
        ids_to_lemma[node_id] = lemma
        rows.append((lemma, parent_id))
    written = 0
    for lemma, parent_id in rows:
        if parent_id:
            parent = ids_to_lemma.get(parent_id)
            if parent is None:
                raise SystemExit(f"parent id {parent_id!r} of lemma {lemma!r} is not in the file")
            out.write(f"{lemma}\t{parent}\n")
        else:
            out.write(f"{lemma}\n")
        written += 1
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("nodes", help="node table (TSV), one node per line")
    parser.add_argument("--id-col", type=int, default=0, help="column holding the node id")
    parser.add_argument("--lemma-col", type=int, default=2, help="column holding the lemma")
    parser.add_argument("--parent-col", type=int, default=6,
                        help="column holding the parent node id (empty = root)")
    args = parser.parse_args(argv)
    with open(args.nodes, encoding="utf-8") as handle:
        written = convert(handle, args.id_col, args.lemma_col, args.parent_col, sys.stdout)
    print(f"wrote {written} forest rows", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
