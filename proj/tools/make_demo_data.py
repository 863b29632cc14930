#!/usr/bin/env python3
"""Regenerates the synthetic demo dataset under data/demo/.

Every value here is synthetic. The dataset only exercises the pipeline end to
end; it is not the published study data. Output is deterministic (fixed seed,
stdlib RNG) and committed, so running this script is only needed after
changing it.
"""

import csv
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "demo"
rng = random.Random(20230320)

DIMS = [("ux", "User experience"), ("pq", "Product quality"), ("sp", "Social promotion")]
INDICES = [
    ("ux.availability", "Availability", "ux"),
    ("ux.perceptibility", "Perceptibility", "ux"),
    ("ux.cost", "Cost consideration", "ux"),
    ("ux.service", "Service experience", "ux"),
    ("pq.security", "Security", "pq"),
    ("pq.innovation", "Innovation", "pq"),
    ("sp.ethics", "Ethics", "sp"),
    ("sp.social_integration", "Social integration", "sp"),
]
ITEMS = [
    ("ux.availability.learnability", "Function is easy to learn", "ux.availability"),
    ("ux.availability.operability", "Easy to operate", "ux.availability"),
    ("ux.perceptibility.audio_visual", "Audio-visual effect", "ux.perceptibility"),
    ("ux.perceptibility.interactive_feedback", "Interactive feedback", "ux.perceptibility"),
    ("ux.cost.direct", "Direct cost", "ux.cost"),
    ("ux.cost.indirect", "Indirect cost", "ux.cost"),
    ("ux.service.needs_values", "Needs and values considered", "ux.service"),
    ("ux.service.after_sales", "After-sales service", "ux.service"),
    ("pq.security.information", "Information security", "pq.security"),
    ("pq.security.stability", "System stability", "pq.security"),
    ("pq.innovation.functional", "Functional innovation", "pq.innovation"),
    ("pq.innovation.incentive", "Incentive mechanism", "pq.innovation"),
    ("sp.ethics.service", "Service", "sp.ethics"),
    ("sp.ethics.customization", "Special customization", "sp.ethics"),
    ("sp.social_integration.policy_awareness", "Policy awareness", "sp.social_integration"),
    ("sp.social_integration.integration", "Social integration", "sp.social_integration"),
]
BONUS = [("bonus.compliance", "Compliance"), ("bonus.sociability", "Sociability")]
# Pool-only candidates that the round-1 screening is expected to drop.
DISTRACTORS = [
    ("ux.availability.theme_count", "Number of colour themes", "ux.availability", 1.9, 0.8),
    ("pq.innovation.ar_features", "Augmented-reality features", "pq.innovation", 2.6, 1.3),
    ("sp.ethics.gamified_ads", "Gamified advertising", "sp.ethics", 2.2, 1.0),
]

CORE_IDS = [d[0] for d in DIMS] + [i[0] for i in INDICES] + [i[0] for i in ITEMS]


def write(name, header, rows):
    path = OUT / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def tree_rows(extra):
    rows = [[i, n, "dimension", "", "false"] for i, n in DIMS]
    rows += [[i, n, "index", p, "false"] for i, n, p in INDICES]
    rows += [[i, n, "item", p, "false"] for i, n, p in ITEMS]
    rows += [[i, n, "item", p, "false"] for i, n, p, *_ in extra]
    rows += [[i, n, "dimension", "", "true"] for i, n in BONUS]
    return sorted(rows)


def clip(v, lo, hi):
    return max(lo, min(hi, v))


def rating(mu, sigma, hi=5):
    return clip(int(round(rng.gauss(mu, sigma))), 1, hi)


def main():
    header = ["id", "name", "level", "parent_id", "bonus"]
    write("pool.csv", header, tree_rows(DISTRACTORS))
    write("indicators.csv", header, tree_rows([]))

    # 25 experts; group sizes follow the panel composition 3/8/9/3/2.
    groups = (["decision_maker"] * 3 + ["technology_developer"] * 8 + ["social_technology_researcher"] * 9
              + ["technology_implementer"] * 3 + ["other"] * 2)
    fam_levels = ["very_familiar", "familiar", "moderate", "unfamiliar", "very_unfamiliar"]
    impacts = ["large", "medium", "small"]
    experts = []
    for k, g in enumerate(groups, start=1):
        fam = rng.choices(fam_levels, weights=[4, 6, 3, 1, 0.2])[0]
        basis = [rng.choices(impacts, weights=[6, 3, 1])[0] for _ in range(4)]
        experts.append([f"e{k:02d}", g, fam] + basis)
    write("experts.csv", ["id", "group", "familiarity", "basis_theory", "basis_practice", "basis_peer",
                          "basis_intuition"], experts)
    expert_ids = [e[0] for e in experts]

    core_mu = {i: rng.uniform(4.1, 4.8) for i in CORE_IDS}

    # Round 1: full pool.
    pool_ids = sorted(CORE_IDS + [d[0] for d in DISTRACTORS])
    distractor = {d[0]: (d[3], d[4]) for d in DISTRACTORS}
    rows = []
    for e in expert_ids:
        row = [e]
        for i in pool_ids:
            mu, sd = distractor.get(i, (core_mu.get(i, 4.5), 0.7))
            row.append(rating(mu, sd))
        rows.append(row)
    write("ratings_round1.csv", ["expert_id"] + pool_ids, rows)

    # Rounds 2 and 3: final indicator set; consensus tightens, five experts
    # do not return the round-3 questionnaire.
    final_ids = sorted(CORE_IDS)
    for rnd, sd, silent in ((2, 0.55, set()), (3, 0.45, {"e04", "e09", "e15", "e21", "e24"})):
        rows = []
        for e in expert_ids:
            if e in silent:
                rows.append([e] + [""] * len(final_ids))
            else:
                rows.append([e] + [rating(core_mu[i], sd) for i in final_ids])
        write(f"ratings_round{rnd}.csv", ["expert_id"] + final_ids, rows)

    # Pairwise matrices, one per sibling group, mildly inconsistent.
    def pairwise(name, ids, scores):
        n = len(ids)
        scale = [1 / 9, 1 / 8, 1 / 7, 1 / 6, 1 / 5, 1 / 4, 1 / 3, 1 / 2, 1, 2, 3, 4, 5, 6, 7, 8, 9]
        labels = ["1/9", "1/8", "1/7", "1/6", "1/5", "1/4", "1/3", "1/2", "1", "2", "3", "4", "5", "6", "7",
                  "8", "9"]
        m = [["1"] * n for _ in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                ratio = scores[a] / scores[b] * rng.uniform(0.85, 1.15)
                k = min(range(len(scale)), key=lambda t: abs(scale[t] - ratio) / scale[t])
                m[a][b] = labels[k]
                m[b][a] = labels[len(scale) - 1 - k]
        write(f"pairwise/{name}.csv", ["id"] + ids, [[ids[a]] + m[a] for a in range(n)])
        return f"pairwise/{name}.csv"

    files = [pairwise("dimensions", [d[0] for d in DIMS], [5, 3, 2])]
    for dim, _ in DIMS:
        ids = [i for i, _, p in INDICES if p == dim]
        files.append(pairwise(dim, ids, [rng.uniform(1, 4) for _ in ids]))
    for idx, _, _ in INDICES:
        ids = [i for i, _, p in ITEMS if p == idx]
        files.append(pairwise(idx, ids, [rng.uniform(1, 3) for _ in ids]))

    # Consumer responses: 26 older users, one latent attitude each.
    questions = [f"q{k}" for k in range(1, 22)]
    q_bias = [rng.uniform(-0.6, 0.4) for _ in questions]
    rows = []
    for r in range(1, 27):
        theta = rng.gauss(0, 0.8)
        answers = [clip(int(round(2.7 + theta + b + rng.gauss(0, 0.6))), 0, 4) for b in q_bias]
        rows.append([f"r{r:02d}"] + answers)
    rows[6][9] = ""
    rows[17][20] = ""
    write("responses.csv", ["respondent_id"] + questions, rows)

    write("expert_bonus.csv", ["expert_id", "compliance", "sociability"],
          [[f"e{k:02d}", clip(int(round(rng.gauss(3.2, 0.7))), 0, 4), clip(int(round(rng.gauss(2.8, 0.8))), 0, 4)]
           for k in range(1, 7)])

    item_ids = [i for i, _, _ in ITEMS]
    rows = []
    for r in range(1, 14):
        rows.append([f"v{r:02d}"] + [clip(int(round(rng.gauss(6.4, 0.8))), 1, 7) for _ in item_ids])
    write("importance.csv", ["rater_id"] + item_ids, rows)

    config = {
        "stages": ["round-stats", "screen", "weights", "reliability", "validity", "score"],
        "scale_max": 5,
        "correct_ties": True,
        "experts": "experts.csv",
        "rounds": [
            {"round": 1, "ratings": "ratings_round1.csv", "indicators": "pool.csv"},
            {"round": 2, "ratings": "ratings_round2.csv", "indicators": "indicators.csv"},
            {"round": 3, "ratings": "ratings_round3.csv", "indicators": "indicators.csv"},
        ],
        "weights": {"tree": "indicators.csv", "pairwise": files, "importance_round": 2, "method": "combined"},
        "reliability": {"responses": "responses.csv", "instrument": "default"},
        "validity": {"importance": "importance.csv", "relevance_floor": 5},
        "score": {"responses": "responses.csv", "bonus": "expert_bonus.csv", "cap": 10},
    }
    (OUT / "pipeline.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
