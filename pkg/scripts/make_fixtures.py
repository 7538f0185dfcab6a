"""Write the fixture files under src/latrigid/data/fixtures.

The larger fixtures are re-derived coordinates, not copies of drawings.
Labels are never stored here: the test suite recomputes them.
"""

from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "latrigid" / "data" / "fixtures"

COOKIE = [(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2), (0, 2), (0, 1)]
COOKIE_INSIDE = {(1, 1), (2, 2)}
STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def ring(w, h):
    return [(x, y) for y in range(h + 1) for x in range(w + 1) if x in (0, w) or y in (0, h)]


def outer_layer(pts, skip):
    s = set(pts)
    out = set()
    for x, y in pts:
        for dx, dy in STEPS:
            q = (x + dx, y + dy)
            if q not in s and q not in skip:
                out.add(q)
    return sorted(out)


FIXTURES = {
    "point": ("a single point", [(0, 0)]),
    "square": ("unit square", [(0, 0), (1, 0), (0, 1), (1, 1)]),
    "domino": ("two unit squares sharing a bond", [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]),
    "ring8": ("2x2 ring, centre absent", ring(2, 2)),
    "rect31": ("3x1 ring; its rungs are bonds, so the faces are three unit squares", ring(3, 1)),
    "ring32": ("3x2 ring, a chordless 10-point cell", ring(3, 2)),
    "path": ("straight path of four points", [(0, 0), (1, 0), (2, 0), (3, 0)]),
    "ell": ("L-shaped path", [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]),
    "split": ("two points far apart (disconnected)", [(0, 0), (3, 0)]),
    "bridge": ("two unit squares joined by a path of bridge bonds",
               [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (3, 0), (4, 0), (3, 1), (4, 1)]),
    "cookie": ("cookie-style annulus: a 12-point ring with two up-runs and two down-runs", COOKIE),
    "annulus": ("same points as cookie; the name used in the CLI docs", COOKIE),
    "staircase": ("12-vertex staircase ring", [
        (0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (4, 2), (4, 3),
        (4, 4), (3, 4), (2, 4), (2, 3), (1, 3), (1, 2), (0, 2), (0, 1)]),
    "pinched": ("6x4 ring with an inner pendant square: one nonsimple cell", ring(5, 3) + [(2, 1), (3, 1)]),
    "pendant": ("2x2 ring with a pendant point (collinear acyclic branch)", ring(2, 2) + [(3, 1)]),
    "corner_pendant": ("unit square with a pendant below a corner", [(0, 0), (1, 0), (0, 1), (1, 1), (0, -1)]),
    "c4": ("cookie plus its full outer layer at distance 1", COOKIE + outer_layer(COOKIE, COOKIE_INSIDE)),
    "c5": ("cookie plus four 8-point ears reaching distance 2", COOKIE + [
        (0, -1), (2, -1), (0, -2), (1, -2), (2, -2),
        (-1, 0), (-1, 2), (-2, 0), (-2, 1), (-2, 2),
        (1, 4), (3, 4), (1, 5), (2, 5), (3, 5),
        (4, 1), (4, 3), (5, 1), (5, 2), (5, 3)]),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (desc, pts) in FIXTURES.items():
        lines = [f"# {name}: {desc}", f"# {len(pts)} points"]
        lines += [f"{x} {y}" for x, y in pts]
        (OUT / f"{name}.txt").write_text("\n".join(lines) + "\n")
    fig8 = Path(__file__).with_name("fig8_points.txt")
    if fig8.exists():
        body = fig8.read_text().strip().splitlines()
        head = ["# fig8: composite of two panels joined along a shear-flexible seam",
                "# points read from a TikZ drawing by scripts/extract_fig8.py", f"# {len(body)} points"]
        (OUT / "fig8.txt").write_text("\n".join(head + body) + "\n")


if __name__ == "__main__":
    main()
