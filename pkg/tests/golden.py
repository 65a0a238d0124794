"""Comparison helpers for generated ANTLR text."""

from __future__ import annotations

import re

_LABEL = re.compile(r"\b([A-Za-z_]\w*)=(?!=)")


def normalize(text: str) -> str:
    """Rename labels to L0, L1, ... by first appearance and drop all whitespace."""
    labels = list(dict.fromkeys(_LABEL.findall(text)))
    for i, name in enumerate(labels):
        text = re.sub(rf"\b{re.escape(name)}\b", f"\0L{i}", text)
    return re.sub(r"\s+", "", text.replace("\0", ""))


def rule(text: str, name: str) -> str:
    """The block of generated text for one rule (blank-line separated)."""
    for chunk in text.split("\n\n"):
        head = chunk.strip().split("\n", 1)[0]
        if re.match(rf"(fragment\s+)?{re.escape(name)}\b", head):
            return chunk.strip()
    raise KeyError(name)


_SET = re.compile(r"\(((?:'(?:\\.|[^'\\])+'(?:\.\.'(?:\\.|[^'\\])+')?\s*\|\s*)+"
                  r"'(?:\\.|[^'\\])+'(?:\.\.'(?:\\.|[^'\\])+')?)\)")
_RANGE = re.compile(r"('(?:\\.|[^'\\])+')\.\.('(?:\\.|[^'\\])+')")


def antlr_to_grammatic(text: str) -> str:
    """Undo metadata-free ANTLR output: rules back to ``||`` productions."""
    out = []
    for chunk in text.split("\n\n"):
        lines = [ln.strip() for ln in chunk.strip().splitlines()]
        if not lines or lines[0].startswith("grammar "):
            continue
        name = lines[0].removeprefix("fragment ").strip()
        alts = [ln[2:] for ln in lines[1:-1]]
        body = " || ".join(alts)
        body = _SET.sub(lambda m: "[" + " ".join(
            p.strip().replace("..", "--") for p in m.group(1).split("|")) + "]", body)
        body = _RANGE.sub(r"[\1--\2]", body)
        out.append(f"{name} : {body} ;")
    return "\n".join(out) + "\n"
