#!/usr/bin/env python3
"""Regenerates data/lexicon_en.txt and data/vocab_en.txt from wordfreq.

lexicon_en.txt: "word<TAB>count" for the most frequent alphabetic English
words; counts are 10^(zipf - 1) rounded, so "the" is about 10^6.
vocab_en.txt:   one token per line in rank order: whole words, then numbers,
                then common subword pieces, then single letters.
"""
import re
import sys
from pathlib import Path

import wordfreq

ALPHA = re.compile(r"^[a-z]+$")


def main(out_dir: Path) -> None:
    words = [w for w in wordfreq.top_n_list("en", 80000) if ALPHA.match(w)]
    lexicon = words[:40000]
    with open(out_dir / "lexicon_en.txt", "w") as f:
        for w in lexicon:
            count = max(1, round(10 ** (wordfreq.zipf_frequency(w, "en") - 1)))
            f.write(f"{w}\t{count}\n")

    vocab = list(words[:15000])
    seen = set(vocab)
    for n in range(100):
        if str(n) not in seen:
            vocab.append(str(n))
            seen.add(str(n))
    pieces = {}
    for w in words[:15000]:
        for k in (2, 3, 4):
            for i in range(0, len(w) - k + 1):
                p = w[i:i + k]
                pieces[p] = pieces.get(p, 0) + 1
    for p, _ in sorted(pieces.items(), key=lambda kv: (-kv[1], kv[0]))[:3000]:
        if p not in seen:
            vocab.append(p)
            seen.add(p)
    for c in "abcdefghijklmnopqrstuvwxyz":
        if c not in seen:
            vocab.append(c)
            seen.add(c)
    with open(out_dir / "vocab_en.txt", "w") as f:
        f.write("\n".join(vocab) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "data"))
