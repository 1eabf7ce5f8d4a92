"""Deterministic SVG of the plane section used by the Condition 4 check.

The section plane is spanned by w_{nu-1} and w_{nu-2}; its lattice points are
(n a0 + l q, n) with q = q_{nu-1}, a0 = q_{nu-2}.  The layer through w_nu
cuts the cylinder in a translate of the same ellipse, so after translating
by -w_nu the four points 0, w_{nu-1}, w_nu, w_nu - w_{nu-1} all appear at
0 and (+-q, 0).

Canvas: 640 x 480 px.  Horizontal scale: 6q across the plot box; vertical
scale: rows n = -2..2.  Numbers are printed with three decimals, so the
same record always produces the same bytes.
"""
from __future__ import annotations

import math
from typing import List

from .conics import map_F_inverse
from .lattice import IntVec3, build_frame
from .verify import PRELUDE, radius_sq

WIDTH, HEIGHT, MARGIN = 640, 480, 40
X_SPAN = 3  # in units of q on each side
ROWS = 2
N_SEGMENTS = 720


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Canvas:
    def __init__(self, q: float):
        self.q = q
        self.sx = (WIDTH - 2 * MARGIN) / (2 * X_SPAN * q)
        self.sy = (HEIGHT - 2 * MARGIN) / (2 * ROWS + 1)
        self.items: List[str] = []

    def px(self, x: float, n: float):
        return WIDTH / 2 + x * self.sx, HEIGHT / 2 - n * self.sy

    def add(self, s: str):
        self.items.append(s)


def _header(title: str) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="11">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<clipPath id="box"><rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}"/></clipPath>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="#999"/>',
    ]


def _ellipse_path(cv: _Canvas, q, x2, y2, t) -> str:
    # x = t (q cos f + x2 sin f), n = t y2 sin f
    pts = []
    for i in range(N_SEGMENTS + 1):
        f = 2 * math.pi * i / N_SEGMENTS
        x = t * (q * math.cos(f) + x2 * math.sin(f))
        n = t * y2 * math.sin(f)
        X, Y = cv.px(x, n)
        pts.append(f"{_fmt(X)},{_fmt(Y)}")
    return "M " + " L ".join(pts) + " Z"


def _lattice(cv: _Canvas, q: int, a0: int):
    for n in range(-ROWS, ROWS + 1):
        # points n*a0 + l*q inside the horizontal window
        lo = math.ceil((-X_SPAN * q - n * a0) / q)
        hi = math.floor((X_SPAN * q - n * a0) / q)
        for l in range(lo, hi + 1):
            X, Y = cv.px(n * a0 + l * q, n)
            cv.add(f'<circle cx="{_fmt(X)}" cy="{_fmt(Y)}" r="2" fill="#555"/>')


def _mark(cv: _Canvas, x: float, label: str, dy: int):
    X, Y = cv.px(x, 0)
    cv.add(f'<circle cx="{_fmt(X)}" cy="{_fmt(Y)}" r="5" fill="none" stroke="#c00" stroke-width="2"/>')
    cv.add(f'<text x="{_fmt(X + 6)}" y="{_fmt(Y + dy)}" fill="#c00">{label}</text>')


def section_svg(ws, sched, nu: int, prelude=PRELUDE) -> str:
    """SVG text for step nu of a history ws (1-based steps)."""
    ws = [IntVec3(*w) for w in ws]
    if not 1 <= nu <= len(ws):
        raise IndexError(f"step {nu} not in 1..{len(ws)}")
    chain = list(prelude) + ws  # chain[j + 1] is w_j
    out = _header(f"section for step {nu}")
    if nu == 1:
        cv = _Canvas(1.0)
        _lattice(cv, 1, 0)
        _mark(cv, 0, "0", -8)
        _mark(cv, 1, "w_1 = (1,0,0)", -8)
        out += ['<g clip-path="url(#box)">'] + cv.items + ["</g>"]
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 12}">seed: w_1 = (1, 0, 0); plane of w_-1, w_0</text>')
        return "\n".join(out + ["</svg>"]) + "\n"
    w_prev, u, w = chain[nu], chain[nu - 1], chain[nu + 1]
    frame = build_frame(w_prev, u, w)
    eps = sched.at(nu).epsilon
    x2, y2 = map_F_inverse(frame.q, frame.h_sq, frame.d_sq, w.q, frame.f_over_d)
    q = frame.q
    cv = _Canvas(float(q))
    _lattice(cv, q, frame.a0)
    cv.add(f'<path d="{_ellipse_path(cv, float(q), float(x2), float(y2), 1.0)}" fill="#def" '
           'stroke="#036" stroke-width="1.5"/>')
    cv.add(f'<path d="{_ellipse_path(cv, float(q), float(x2), float(y2), float(1 + eps))}" fill="none" '
           'stroke="#036" stroke-dasharray="4 3"/>')
    _mark(cv, 0, "0, w_nu", -8)
    _mark(cv, q, "w_(nu-1)", -8)
    _mark(cv, -q, "w_nu - w_(nu-1)", 16)
    out += ['<g clip-path="url(#box)">'] + cv.items + ["</g>"]
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 22}">step {nu}: q_nu = {w.q}, q_(nu-1) = {q}, '
               f'V/pi = {float(w.q * radius_sq(ws, nu)):.9f}</text>')
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 8}">solid: section ellipse; dashed: dilation 1+eps, '
               f'eps = {eps}; dots: lattice rows n = -{ROWS}..{ROWS}</text>')
    return "\n".join(out + ["</svg>"]) + "\n"


def write_section_svg(path: str, ws, sched, nu: int, prelude=PRELUDE) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(section_svg(ws, sched, nu, prelude))
