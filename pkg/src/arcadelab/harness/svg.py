"""Minimal standalone SVG charts: step curves and grouped bars."""

from __future__ import annotations

from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
W, H = 480, 320
LEFT, RIGHT, TOP, BOTTOM = 56, 140, 30, 40


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _frame(title: str, x_label: str, y_label: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.0f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>',
        f'<text x="{(LEFT + W - RIGHT) / 2:.0f}" y="{H - 8}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(x_label)}</text>',
        f'<text x="14" y="{(TOP + H - BOTTOM) / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="11" '
        f'transform="rotate(-90 14 {(TOP + H - BOTTOM) / 2:.0f})">{escape(y_label)}</text>',
    ]


def _legend(names: list[str]) -> list[str]:
    out = []
    for i, n in enumerate(names):
        y = TOP + 14 * i
        c = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{W - RIGHT + 10}" y="{y}" width="10" height="10" fill="{c}"/>')
        out.append(f'<text x="{W - RIGHT + 24}" y="{y + 9}" font-family="sans-serif" font-size="10">{escape(n)}</text>')
    return out


def step_curves(curves: dict[str, list[tuple[float, float]]], title: str, x_range: tuple[float, float] = (0.0, 1.0)) -> str:
    """Plot f(x) = fraction of games scoring at least x, from (x, f(x)) breakpoints."""
    x0, x1 = x_range
    if x1 <= x0:
        x1 = x0 + 1.0
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (min(max(x, x0), x1) - x0) / (x1 - x0) * pw

    def py(y):
        return H - BOTTOM - y * ph

    parts = _frame(title, "normalized score x", "fraction of games >= x")
    for t in (0.0, 0.5, 1.0):
        parts.append(f'<text x="{LEFT - 6}" y="{py(t) + 4:.1f}" text-anchor="end" font-family="sans-serif" font-size="10">{t:g}</text>')
    parts.append(f'<text x="{LEFT}" y="{H - BOTTOM + 14}" text-anchor="middle" font-family="sans-serif" font-size="10">{x0:g}</text>')
    parts.append(f'<text x="{W - RIGHT}" y="{H - BOTTOM + 14}" text-anchor="middle" font-family="sans-serif" font-size="10">{x1:g}</text>')
    for i, (name, bps) in enumerate(curves.items()):
        # f(x) is the level on (previous breakpoint, x]; just right of x it drops to the next level
        path = [(px(x0), py(bps[0][1] if bps else 0.0))]
        for j, (x, f) in enumerate(bps):
            after = bps[j + 1][1] if j + 1 < len(bps) else 0.0
            path += [(px(x), py(f)), (px(x), py(after))]
        path.append((px(x1), path[-1][1]))
        d = " ".join(f"{'M' if j == 0 else 'L'}{_fmt(a)},{_fmt(b)}" for j, (a, b) in enumerate(path))
        parts.append(f'<path d="{d}" fill="none" stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="1.5"/>')
    parts += _legend(list(curves))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bars(values: dict[str, dict[str, float]], title: str, y_label: str) -> str:
    """Grouped bars: outer key is the group (e.g. aggregate kind), inner the algorithm."""
    groups = list(values)
    algs = sorted({a for g in groups for a in values[g]})
    top = max([v for g in groups for v in values[g].values()] + [1e-12])
    bottom = min([v for g in groups for v in values[g].values()] + [0.0])
    span = top - bottom or 1.0
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
    gw = pw / max(1, len(groups))
    bw = gw * 0.8 / max(1, len(algs))

    def py(v):
        return H - BOTTOM - (v - bottom) / span * ph

    parts = _frame(title, "", y_label)
    parts.append(f'<text x="{LEFT - 6}" y="{py(top) + 4:.1f}" text-anchor="end" font-family="sans-serif" font-size="10">{top:.3g}</text>')
    parts.append(f'<text x="{LEFT - 6}" y="{py(bottom) + 4:.1f}" text-anchor="end" font-family="sans-serif" font-size="10">{bottom:.3g}</text>')
    for gi, g in enumerate(groups):
        gx = LEFT + gi * gw + gw * 0.1
        parts.append(f'<text x="{LEFT + gi * gw + gw / 2:.1f}" y="{H - BOTTOM + 14}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="10">{escape(g)}</text>')
        for ai, a in enumerate(algs):
            if a not in values[g]:
                continue
            v = values[g][a]
            y0, y1 = sorted((py(v), py(max(bottom, 0.0))))
            parts.append(f'<rect x="{_fmt(gx + ai * bw)}" y="{_fmt(y0)}" width="{_fmt(bw)}" height="{_fmt(y1 - y0)}" '
                         f'fill="{PALETTE[ai % len(PALETTE)]}"/>')
    parts += _legend(algs)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
