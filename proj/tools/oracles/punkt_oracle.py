#!/usr/bin/env python3
"""Freeze an NLTK Punkt reference for the segmenter tests.

Builds a seeded synthetic corpus, trains nltk's PunktTrainer on the
documents joined by blank lines and records the learned parameters plus the
spans it produces for held-out texts.

Usage: punkt_oracle.py <out.json>
"""
import json
import random
import sys

from nltk.tokenize.punkt import PunktSentenceTokenizer, PunktTrainer

NOUNS = ["sample", "forest", "region", "method", "result", "model", "value", "species",
         "network", "signal", "protein", "survey", "policy", "sensor", "layer", "field"]
VERBS = ["shows", "supports", "reduces", "improves", "describes", "affects", "predicts"]
ADJ = ["large", "small", "rare", "robust", "novel", "dense", "stable", "early"]
STARTERS = ["The", "This", "These", "Our", "We", "In", "However", "Results", "Data"]
NAMES = ["Smith", "Garcia", "Chen", "Novak", "Okafor", "Larsen"]


def clause(rng):
    parts = [rng.choice(ADJ), rng.choice(NOUNS), rng.choice(VERBS), "the", rng.choice(NOUNS)]
    roll = rng.random()
    if roll < 0.15:
        parts += ["shown", "in", "fig.", str(rng.randint(1, 9)), "and", "the", rng.choice(NOUNS)]
    elif roll < 0.25:
        parts += ["with", "approx.", str(rng.randint(10, 99)), "units"]
    elif roll < 0.35:
        parts += ["(e.g.", rng.choice(NOUNS) + ")"]
    elif roll < 0.42:
        parts += ["as", "noted", "by", rng.choice("ABCDEFGH") + ".", rng.choice(NAMES)]
    elif roll < 0.50:
        parts += ["vs.", "the", rng.choice(ADJ), rng.choice(NOUNS)]
    elif roll < 0.56:
        parts += ["at", str(rng.randint(1, 5)) + "." + str(rng.randint(0, 9)), "percent"]
    return " ".join(parts)


def sentence(rng):
    body = clause(rng)
    if rng.random() < 0.3:
        body += ", " + clause(rng)
    end = "?" if rng.random() < 0.03 else "."
    return rng.choice(STARTERS) + " " + body + end


def document(rng):
    return " ".join(sentence(rng) for _ in range(rng.randint(3, 8)))


def main():
    rng = random.Random(20240611)
    corpus = [document(rng) for _ in range(300)]
    held_out = [document(rng) for _ in range(40)]
    held_out += ["It rained. It stopped.", "See Fig. 3 for details.", "No terminator here",
                 "Values rose (see fig. 2). Then they fell.", "Who knows? Nobody does."]

    trainer = PunktTrainer()
    trainer.train("\n\n".join(corpus), finalize=False)
    trainer.finalize_training()
    params = trainer.get_params()
    tok = PunktSentenceTokenizer(params)

    out = {
        "corpus": corpus,
        "abbreviations": sorted(params.abbrev_types),
        "sentence_starters": sorted(params.sent_starters),
        "collocations": sorted([list(c) for c in params.collocations]),
        "held_out": [{"text": t, "spans": [list(s) for s in tok.span_tokenize(t)]} for t in held_out],
    }
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
