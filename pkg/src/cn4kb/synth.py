"""Seeded generator of small, internally consistent eight-table dumps.

The output exercises every branch of the indicator taxonomies: mismatched
and missing frames, surfaces pointing at other or unreferenced concepts,
shared, foreign and dangling raw assertions, score disagreements, plus
planted contradictions and small negative-polarity cliques.

    python3 -m cn4kb.synth --out fixtures/mini --seed 0
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .ingest import ROW_TYPES, RawTables, TableKind, write_tables

RELATIONS = [
    ("IsA", "{1} is a kind of {2}"), ("AtLocation", "{1} is found at {2}"),
    ("UsedFor", "{1} is used for {2}"), ("CapableOf", "{1} can {2}"),
    ("HasProperty", "{1} is {2}"), ("Desires", "{1} wants {2}"),
    ("LocatedNear", "{1} is near {2}"), ("PartOf", "{1} is part of {2}"),
    ("HasA", "{1} has {2}"), ("Causes", "{1} causes {2}"),
]
FREQUENCIES = [("", 5), ("always", 10), ("often", 7), ("usually", 8), ("sometimes", 4),
               ("rarely", 2), ("not", -5), ("never", -10), ("seldom", -2)]
WORDS = ("apple bird car dog eat fish game house ink jar key lamp man note oven pen queen "
         "road sun tree umbrella van water box yard zoo city river book chair door "
         "music paper glass stone rain snow fire light sound table cat").split()
FOREIGN_WORDS = "gou mao shu shui huo shan ren che".split()


@dataclass
class SyntheticDump:
    tables: RawTables
    contradictions: list = field(default_factory=list)  # (concept1_id, concept2_id, relation_id)


class _Ids:
    """Increasing IDs with random gaps; some skipped IDs are kept as dangling targets."""

    def __init__(self, rng, start=1):
        self.rng = rng
        self.next = start
        self.skipped = []

    def __call__(self) -> int:
        if self.rng.random() < 0.15:
            self.skipped.append(self.next)
            self.next += 1 + int(self.rng.integers(3))
        i = self.next
        self.next += 1
        return i


def generate(seed: int = 0, n_concepts: int = 150, n_assertions: int = 800,
             n_foreign: int = 40, n_raised: int = 6, contradictions: int = 3,
             negative_cliques=(5, 4, 4), tricky_text: bool = True) -> SyntheticDump:
    rng = np.random.default_rng(seed)
    A, C, R, F, FR, S, RA, SE = (ROW_TYPES[k] for k in (
        TableKind.ASSERTION, TableKind.CONCEPT, TableKind.RELATION, TableKind.FREQUENCY,
        TableKind.FRAME, TableKind.SURFACEFORM, TableKind.RAWASSERTION, TableKind.SENTENCE))
    t = RawTables()
    ids = {k: _Ids(rng) for k in TableKind}
    stamp = "2007-05-01 12:00:00"

    rel_ids = []
    for name, desc in RELATIONS:
        rid = ids[TableKind.RELATION]()
        rel_ids.append(rid)
        t.relations.append(R(rid, name, desc))
    freq_ids, freq_value = [], {}
    for text, value in FREQUENCIES:
        fid = ids[TableKind.FREQUENCY]()
        freq_ids.append(fid)
        freq_value[fid] = value
        t.frequencies.append(F(fid, "en", text or None, value))  # empty text is NULL
    default_freq = freq_ids[0]
    pos_freqs = [f for f in freq_ids if freq_value[f] > 0]
    neg_freqs = [f for f in freq_ids if freq_value[f] < 0]

    # frames: one default per relation plus a few frequency-specific ones
    frame_of = {}
    frames_by_rel: dict[int, list] = {}
    for (name, desc), rid in zip(RELATIONS, rel_ids):
        for fid in [default_freq] + list(rng.choice(freq_ids[1:], size=3, replace=False)):
            fid = int(fid)
            frid = ids[TableKind.FRAME]()
            adverb = FREQUENCIES[freq_ids.index(fid)][0]
            text = desc.replace("} ", "} " + adverb + " ", 1) if adverb else desc
            t.frames.append(FR(frid, "en", text, rid, int(rng.integers(1, 5)), fid, None, None, None))
            frame_of[rid, fid] = frid
            frames_by_rel.setdefault(rid, []).append(frid)
    all_frames = [f.id for f in t.frames]

    def new_concept(text, lang="en"):
        cid = ids[TableKind.CONCEPT]()
        t.concepts.append(C(cid, lang, text, int(rng.integers(0, 50)), len(text.split()), 1))
        return cid

    def new_surface(cid, text, lang="en"):
        sid = ids[TableKind.SURFACEFORM]()
        t.surfaceforms.append(S(sid, lang, cid, text, text, int(rng.integers(1, 20))))
        return sid

    texts = set()
    while len(texts) < n_concepts + n_raised:
        k = 1 if rng.random() < 0.6 else 2
        texts.add(" ".join(rng.choice(WORDS, size=k, replace=False)))
    texts = sorted(texts)
    rng.shuffle(texts)
    concepts = [new_concept(x) for x in texts[:n_concepts]]
    raised = [new_concept(x) for x in texts[n_concepts:]]
    concept_text = {c.id: c.text for c in t.concepts}
    surfaces = {c: [new_surface(c, concept_text[c]) for _ in range(int(rng.integers(1, 3)))]
                for c in concepts + raised}
    unused_concepts = [new_concept(f"unused {i}") for i in range(3)]
    for c in unused_concepts:
        new_surface(c, "unused")

    foreign = [new_concept(f"{a}{b}", "zh")
               for a, b in combinations(FOREIGN_WORDS, 2)][:max(2, n_foreign // 3)]
    concept_text.update((c.id, c.text) for c in t.concepts)
    foreign_surf = {c: new_surface(c, concept_text[c], "zh") for c in foreign}

    weights = 1.0 / np.arange(1, n_concepts + 1) ** 0.8
    weights /= weights.sum()
    rel_w = np.linspace(3, 1, len(rel_ids))
    rel_w /= rel_w.sum()

    def sentence(text, score):
        sid = ids[TableKind.SENTENCE]()
        t.sentences.append(SE(sid, text, int(rng.integers(1, 100)), stamp, "en", 1, score))
        return sid

    def raw(aid, s1, s2, frame, score, sent_score, text, lang="en"):
        rid = ids[TableKind.RAWASSERTION]()
        sid = sentence(text, sent_score)
        t.rawassertions.append(RA(rid, stamp, stamp, sid, aid, int(rng.integers(1, 100)),
                                  s1, s2, frame, 1, lang, score))
        return rid

    def jitter(score):
        return score if rng.random() < 0.8 else int(score + rng.integers(-3, 4))

    sign_of: dict = {}
    raw_ids: list = []
    pending_foreign_raw: list = []

    def add_assertion(c1, c2, rel, fid, score, plain=False):
        aid = ids[TableKind.ASSERTION]()
        u = rng.random()
        if plain or u < 0.85:
            frame = frame_of.get((rel, fid), frame_of[rel, default_freq])
        elif u < 0.92:
            frame = int(rng.choice([f for f in all_frames if f not in frames_by_rel[rel]]))
        else:
            frame = None

        def surf(c):
            u = rng.random()
            if plain or u < 0.9:
                return int(rng.choice(surfaces[c]))
            if u < 0.94:
                return int(rng.choice(surfaces[int(rng.choice(concepts))]))
            if u < 0.97:
                return int(rng.choice(surfaces[int(rng.choice(raised))]))
            return None

        s1, s2 = surf(c1), surf(c2)
        u = rng.random()
        if plain or u < 0.85:
            r1 = s1 if s1 is not None else int(rng.choice(surfaces[c1]))
            r2 = s2 if s2 is not None else int(rng.choice(surfaces[c2]))
            if not plain and rng.random() < 0.05:
                r1 = int(rng.choice(surfaces[int(rng.choice(raised))]))
            if not plain and rng.random() < 0.05:
                r2 = int(rng.choice(surfaces[c2] + surfaces[int(rng.choice(concepts))]))
            rframe = frame if frame is not None and (plain or rng.random() < 0.95) \
                else int(rng.choice(all_frames))
            target = aid
            if not plain and rng.random() < 0.02:
                pending_foreign_raw.append(len(t.rawassertions))
            rs = score if plain else jitter(score)
            ss = rs if plain else jitter(rs)
            text = f"{concept_text[c1]} {RELATIONS[rel_ids.index(rel)][0]} {concept_text[c2]}"
            if tricky_text and rng.random() < 0.05:
                text += "\tsaid \"so\"\\ twice\nreally"
            best_raw = raw(target, r1, r2, rframe, rs, ss, text)
            raw_ids.append(best_raw)
        elif u < 0.89 and raw_ids:
            best_raw = int(rng.choice(raw_ids))
        elif u < 0.94:
            best_raw = None
        else:
            best_raw = -1  # dangling, patched below
        t.assertions.append(A(aid, "en", rel, c1, c2, score, fid, s1, s2, best_raw, frame))
        return aid

    for _ in range(n_assertions):
        c1 = int(rng.choice(concepts, p=weights))
        c2 = c1 if rng.random() < 0.03 else int(rng.choice(concepts, p=weights))
        rel = int(rng.choice(rel_ids, p=rel_w))
        score = int(rng.choice([-1, 0, 1, 1, 1, 1, 2, 2, 3, 5, 8]))
        negative = rng.random() < 0.12
        key = (c1, c2, rel)
        if score > 0 and key in sign_of:
            negative = sign_of[key] < 0  # no accidental contradictions
        if negative:
            fid = int(rng.choice(neg_freqs))
        else:
            fid = default_freq if rng.random() < 0.7 else int(rng.choice(pos_freqs))
        if score > 0:
            sign_of[key] = -1 if negative else 1
        add_assertion(c1, c2, rel, fid, score)

    # negative-polarity cliques on fresh vertex sets
    pool = [c for c in concepts[::-1]]
    for size in negative_cliques:
        members, pool = pool[:size], pool[size:]
        for a, b in combinations(members, 2):
            rel = int(rng.choice(rel_ids[:3]))
            if (a, b, rel) in sign_of and sign_of[a, b, rel] > 0:
                continue
            sign_of[a, b, rel] = -1
            add_assertion(a, b, rel, int(rng.choice(neg_freqs)), int(rng.integers(1, 4)))

    planted = []
    while len(planted) < contradictions:
        c1, c2 = (int(x) for x in rng.choice(concepts, size=2, replace=False))
        rel = int(rng.choice(rel_ids))
        if (c1, c2, rel) in sign_of:
            continue
        sign_of[c1, c2, rel] = 0
        add_assertion(c1, c2, rel, int(rng.choice(pos_freqs)), int(rng.integers(1, 4)), plain=True)
        add_assertion(c1, c2, rel, int(rng.choice(neg_freqs)), int(rng.integers(1, 4)), plain=True)
        planted.append((c1, c2, rel))

    foreign_assertions = []
    for _ in range(n_foreign):
        c1, c2 = (int(x) for x in rng.choice(foreign, size=2))
        rel = int(rng.choice(rel_ids))
        aid = ids[TableKind.ASSERTION]()
        fs1, fs2 = foreign_surf[c1], foreign_surf[c2]
        rid = raw(aid, fs1, fs2, None, 1, 1, f"{concept_text[c1]} {concept_text[c2]}", "zh")
        t.assertions.append(A(aid, "zh", rel, c1, c2, 1, default_freq, fs1, fs2, rid, None))
        foreign_assertions.append(aid)

    # point a few English raw assertions at foreign assertions
    for k in pending_foreign_raw:
        if foreign_assertions:
            t.rawassertions[k] = t.rawassertions[k]._replace(
                assertion_id=int(rng.choice(foreign_assertions)))

    # dangling best_raw IDs: skipped IDs or IDs past the end
    dangling = ids[TableKind.RAWASSERTION].skipped or [ids[TableKind.RAWASSERTION].next + 5]
    t.assertions = [a._replace(best_raw_id=int(rng.choice(dangling))) if a.best_raw_id == -1 else a
                    for a in t.assertions]

    # rows nobody references
    for _ in range(3):
        sentence("an orphan sentence", 0)
    return SyntheticDump(t, planted)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description="write a synthetic eight-table dump")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--concepts", type=int, default=150)
    p.add_argument("--assertions", type=int, default=800)
    p.add_argument("--delimiter", default="\t")
    args = p.parse_args(argv)
    dump = generate(args.seed, args.concepts, args.assertions)
    write_tables(dump.tables, args.out, args.delimiter)
    for kind, n in dump.tables.counts().items():
        print(f"{kind}\t{n}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
