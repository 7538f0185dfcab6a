"""Rebuild the large shearing fixture from a TikZ drawing (path given on the command line).

Only the filled-dot commands are read, bonds are induced afterwards.
"""
import re
import sys
from pathlib import Path

DOT = re.compile(r"\\draw\[fill=black\]\(([^,]+),([^)]+)\)\s*circle")


def _eval(expr, j):
    return int(eval(expr.replace("\\j", str(j)), {"__builtins__": {}}))


def extract(text):
    start = text.index("\\begin{tikzpicture}[scale=0.45]")
    end = text.index("\\end{tikzpicture}", start)
    lines = text[start:end].splitlines()
    pts = set()
    shift = (0, 0)
    loop = None
    for line in lines:
        s = line.strip()
        m = re.match(r"\\begin\{scope\}\[shift=\{\((-?\d+),(-?\d+)\)\}\]", s)
        if m:
            shift = (int(m.group(1)), int(m.group(2)))
            continue
        if s.startswith("\\end{scope}"):
            shift = (0, 0)
            continue
        m = re.match(r"\\foreach \\j in \{(-?\d+),\.\.\.,(-?\d+)\}\{", s)
        if m:
            loop = range(int(m.group(1)), int(m.group(2)) + 1)
            continue
        if s == "}":
            loop = None
            continue
        m = DOT.search(s)
        if m:
            for j in (loop if loop is not None else [0]):
                x = _eval(m.group(1), j) + shift[0]
                y = _eval(m.group(2), j) + shift[1]
                pts.add((x, y))
    return sorted(pts)


if __name__ == "__main__":
    text = Path(sys.argv[1]).read_text()
    for x, y in extract(text):
        print(x, y)
