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
"""Randomized nDCG@10 / Recall@10 cases from a set-intersection oracle.

Run from the repository root:  python3 tests/oracles/metric_cases.py
"""

import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "metric_cases.json"


def dcg(grades, gain):
    total = 0.0
    for i, g in enumerate(grades):
        total += gain(g) / math.log2(i + 2)
    return total


def main():
    rng = random.Random(4242)
    cases = []
    for n in range(200):
        pool = ["d%02d" % i for i in range(50)]
        ranking = rng.sample(pool, rng.choice([50, 50, 50, 7, 3]))
        judged = rng.sample(pool, rng.randint(1, 12))
        rels = {d: rng.choice([0, 1, 1, 2, 3]) for d in judged}
        if not any(g > 0 for g in rels.values()):
            rels[judged[0]] = 1
        gain_name = "linear" if n % 10 == 9 else "exp"
        gain = (lambda g: float(g)) if gain_name == "linear" else (lambda g: 2.0 ** g - 1.0)
        top = ranking[:10]
        ideal = sorted(rels.values(), reverse=True)[:10]
        ndcg = dcg([rels.get(d, 0) for d in top], gain) / dcg(ideal, gain)
        relevant = {d for d, g in rels.items() if g > 0}
        recall = len(relevant & set(top)) / len(relevant)
        cases.append({"ranking": ranking, "rels": rels, "gain": gain_name, "ndcg@10": ndcg, "recall@10": recall})
    OUT.write_text(json.dumps(cases, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
