#!/usr/bin/env python3
# Copyright 2026-present the vidsearch authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Expected `search` TSV for the 3-record CLI fixture, from the oracle embedder.

Run from the repository root:  python3 tests/oracles/cli_golden.py
"""

import base64
import json
from pathlib import Path

from make_fixtures import DATA, dot, embed_frames, embed_text, index_text, sample_indices

QUERIES = {
    "cli_search_harbor.tsv": ("violet lantern harbor", 3, 0.5),
    "cli_search_market_vision.tsv": ("fruit market", 2, 0.8),
}


def load_frames(rec, base):
    out = []
    for f in rec["frames"]:
        if f.startswith("base64:"):
            out.append(base64.b64decode(f[len("base64:"):]))
        else:
            out.append((base / f).read_bytes())
    return out


def main():
    base = DATA / "cli"
    glossary = json.loads((base / "glossary.json").read_text())
    records = [json.loads(l) for l in (base / "manifest.jsonl").read_text().splitlines() if l.strip()]
    docs = []
    for rec in records:
        blobs = load_frames(rec, base)
        sampled = [blobs[i] for i in sample_indices(len(blobs), 48)]
        ef, efm = embed_frames(sampled, 256) if sampled else ([0.0] * 256, True)
        ea, eam = embed_text(index_text(rec, glossary), 256)
        docs.append((rec["video_id"], ef, efm, ea, eam))
    for name, (query, k, alpha) in QUERIES.items():
        eq, _ = embed_text(query, 256)
        rows = []
        for vid, ef, efm, ea, eam in docs:
            v = 0.0 if efm else dot(ef, eq)
            a = 0.0 if eam else dot(ea, eq)
            rows.append((-(alpha * v + (1.0 - alpha) * a), vid, v, a))
        rows.sort()
        lines = ["rank\tvideo_id\tfused\tvision\taudio"]
        for i, (neg, vid, v, a) in enumerate(rows[:k]):
            lines.append("%d\t%s\t%.6f\t%.6f\t%.6f" % (i + 1, vid, -neg, v, a))
        (DATA / "golden" / name).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
