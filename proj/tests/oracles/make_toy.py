"""Small multimodal fixture: 12 documents, 3 queries, dense vectors and
local descriptors, written in the engine's file formats.

The IFV1 files are encoded here with `struct`, independently of the C++
writer; doc_vectors.tsv carries the same floats in the TSV fallback format.

    python3 make_toy.py ../data/toy
"""
import json
import os
import random
import struct
import sys

TOPICS = {
    "beach": ["sandy beach with waves", "sunset over the sea and sand", "people swimming near the beach"],
    "mountain": ["snowy mountain peaks", "hikers climbing a rocky mountain", "mountain lake under clouds"],
    "city": ["busy city street at night", "tall buildings in the city centre", "traffic on a city bridge"],
    "animal": ["a dog running in the park", "cats sleeping on a sofa", "horse grazing in a field"],
}
QUERIES = {
    "q1": ("beach", "sunny beach by the sea"),
    "q2": ("mountain", "mountains with snow"),
    "q3": ("city", "city buildings at night"),
}
DIM = 8
DESC_DIM = 16


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def ifv1(path, vectors):
    dim = len(vectors[0][1]) if vectors else 0
    with open(path, "wb") as f:
        f.write(b"IFV1")
        f.write(struct.pack("<II", len(vectors), dim))
        for vid, vals in vectors:
            b = vid.encode("utf-8")
            f.write(struct.pack("<H", len(b)))
            f.write(b)
            f.write(struct.pack(f"<{dim}f", *vals))


def main(out):
    rng = random.Random(7)
    os.makedirs(out, exist_ok=True)
    centers = {t: [rng.gauss(0, 1) for _ in range(DIM)] for t in TOPICS}
    desc_centers = {t: [rng.gauss(0, 3) for _ in range(DESC_DIM)] for t in TOPICS}

    docs, doc_vecs, doc_desc, qrels = [], [], [], []
    n = 0
    for topic, texts in TOPICS.items():
        for text in texts:
            did = f"doc{n:02d}"
            img = f"img{n:02d}"
            n += 1
            docs.append({"doc_id": did, "text": text, "image_refs": [img]})
            doc_vecs.append((img, [f32(c + rng.gauss(0, 0.4)) for c in centers[topic]]))
            for _ in range(rng.randint(4, 8)):
                doc_desc.append((img, [f32(c + rng.gauss(0, 1.0)) for c in desc_centers[topic]]))
            for qid, (qtopic, _) in QUERIES.items():
                qrels.append((qid, did, 1 if qtopic == topic else 0))

    queries, q_vecs, q_desc = [], [], []
    for qid, (topic, text) in QUERIES.items():
        refs = [f"{qid}_s{i}" for i in range(3)]
        queries.append({"query_id": qid, "text": text, "sample_image_refs": refs})
        for r in refs:
            q_vecs.append((r, [f32(c + rng.gauss(0, 0.5)) for c in centers[topic]]))
            for _ in range(5):
                q_desc.append((r, [f32(c + rng.gauss(0, 1.0)) for c in desc_centers[topic]]))

    with open(os.path.join(out, "corpus.jsonl"), "w") as f:
        for d in docs:
            f.write(json.dumps(d) + "\n")
    with open(os.path.join(out, "queries.jsonl"), "w") as f:
        for q in queries:
            f.write(json.dumps(q) + "\n")
    with open(os.path.join(out, "qrels.txt"), "w") as f:
        for qid, did, rel in qrels:
            f.write(f"{qid} 0 {did} {rel}\n")
    ifv1(os.path.join(out, "doc_vectors.ifv"), doc_vecs)
    ifv1(os.path.join(out, "query_vectors.ifv"), q_vecs)
    ifv1(os.path.join(out, "doc_descriptors.ifv"), doc_desc)
    ifv1(os.path.join(out, "query_descriptors.ifv"), q_desc)
    with open(os.path.join(out, "doc_vectors.tsv"), "w") as f:
        for vid, vals in doc_vecs:
            f.write(vid + "".join("\t%.9g" % v for v in vals) + "\n")

    common = {"corpus": "corpus.jsonl", "queries": "queries.jsonl", "qrels": "qrels.txt",
              "config": {"w_text": "0.5", "t_lower": "0.01", "t_upper": "0.2"}, "seed": 3}
    with open(os.path.join(out, "manifest_dense.json"), "w") as f:
        json.dump(dict(common, doc_vectors="doc_vectors.ifv", query_vectors="query_vectors.ifv",
                       output_dir="out_dense"), f, indent=2)
        f.write("\n")
    with open(os.path.join(out, "manifest_bow.json"), "w") as f:
        json.dump(dict(common, doc_descriptors="doc_descriptors.ifv", query_descriptors="query_descriptors.ifv",
                       codebook_k=6, codebook_max_iters=50, output_dir="out_bow"), f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "toy")
