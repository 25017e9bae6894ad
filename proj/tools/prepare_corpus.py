#!/usr/bin/env python3
"""Turn raw English prose into the trainer's input format.

Output is lowercased, one sentence per line, tokens separated by single
spaces. Punctuation is dropped; apostrophes inside words are kept.

    prepare_corpus.py alice29.txt asyoulik.txt > corpus.txt
"""
import re
import sys

SENTENCE_END = re.compile(r"[.!?;:]+")
TOKEN = re.compile(r"[a-z]+(?:'[a-z]+)*")


def sentences(text):
    text = text.lower().replace("`", "'")
    # Hyphenated line breaks and compound words become separate tokens.
    text = text.replace("-", " ")
    for chunk in SENTENCE_END.split(text):
        tokens = TOKEN.findall(chunk)
        if tokens:
            yield tokens


def main(paths):
    for path in paths:
        with open(path, encoding="latin-1") as fh:
            for tokens in sentences(fh.read()):
                sys.stdout.write(" ".join(tokens) + "\n")


if __name__ == "__main__":
    main(sys.argv[1:])
