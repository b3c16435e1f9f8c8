#!/usr/bin/env python3
"""Generate the cased word-piece vocabulary fixture shipped in data/vocab/.

The fixture mirrors the layout of the 28,996-entry cased BERT vocabulary for the
tokens needed by the worked Mycology title (specials, printable ASCII and the
title's word pieces sit at their original ids). Remaining slots hold the
synthetic corpus word list, "##" single characters and unique placeholders.

Usage: make_vocab_fixture.py <synthetic_words.inc> <out.txt>
"""
import re
import sys

VOCAB_SIZE = 28996

# token -> id for the worked title sentence
TITLE_PIECES = {
    "Multi": 18447, "##aged": 15841, "forest": 3304, "fragments": 11062,
    "in": 1107, "Atlantic": 3608, "France": 1699, "that": 1115, "are": 1132,
    "surrounded": 4405, "by": 1118, "meadows": 25958, "retain": 8983,
    "a": 170, "rich": 3987, "##er": 1200, "e": 174, "##pi": 8508,
    "##phy": 22192, "##te": 1566, "l": 181, "##iche": 26312, "##n": 1179,
    "flora": 16812,
}

TITLE = ("Multi­aged forest fragments in Atlantic France that are surrounded "
         "by meadows retain a richer epiphyte lichen flora")
TITLE_IDS = [101, 18447, 15841, 3304, 11062, 1107, 3608, 1699, 1115, 1132, 4405,
             1118, 25958, 8983, 170, 3987, 1200, 174, 8508, 22192, 1566, 181,
             26312, 1179, 16812, 102]


def wordpiece(word, vocab):
    pieces, start = [], 0
    while start < len(word):
        end, cur = len(word), None
        while start < end:
            sub = word[start:end]
            if start > 0:
                sub = "##" + sub
            if sub in vocab:
                cur = sub
                break
            end -= 1
        if cur is None:
            return ["[UNK]"]
        pieces.append(cur)
        start = end
    return pieces


def main():
    words_path, out_path = sys.argv[1], sys.argv[2]
    with open(words_path, encoding="utf-8") as fh:
        words = re.findall(r'"([^"]+)"', fh.read())

    slots = [None] * VOCAB_SIZE
    slots[0] = "[PAD]"
    for i in range(1, 100):
        slots[i] = f"[unused{i}]"
    slots[100], slots[101], slots[102], slots[103] = "[UNK]", "[CLS]", "[SEP]", "[MASK]"
    slots[104], slots[105] = "[unused100]", "[unused101]"
    for code in range(33, 127):
        slots[106 + code - 33] = chr(code)
    for tok, idx in TITLE_PIECES.items():
        assert slots[idx] in (None, tok), (tok, idx, slots[idx])
        slots[idx] = tok

    present = set(t for t in slots if t is not None)
    extra = []
    for c in "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789":
        extra.append("##" + c)
    extra.append("aged")
    extra.extend(words)

    cursor = 200
    for tok in extra:
        if tok in present:
            continue
        while slots[cursor] is not None:
            cursor += 1
        slots[cursor] = tok
        present.add(tok)

    filler = 0
    for i in range(VOCAB_SIZE):
        if slots[i] is None:
            slots[i] = f"[unused_fill{filler}]"
            filler += 1

    vocab = {t: i for i, t in enumerate(slots)}
    assert len(vocab) == VOCAB_SIZE

    title = TITLE.replace("­", "")
    ids = [101]
    for w in title.split():
        ids.extend(vocab[p] for p in wordpiece(w, vocab))
    ids.append(102)
    assert ids == TITLE_IDS, ids

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for tok in slots:
            fh.write(tok + "\n")


if __name__ == "__main__":
    main()
