"""Static SVG spacetime diagram of one synchronization round trip.

Coordinate mapping: the drawn window is the bounding box of the round-trip
events and the light-cone segment ends, padded by 15% of the larger span (``t`` and ``x`` share one scale).
With ``s = SIZE / max(t_span, x_span)`` a point ``(t, x)`` lands at
``px = MARGIN + (x - x_min) * s`` and ``py = MARGIN + (t_max - t) * s``, so
time points up the page.  Numbers are printed with three decimals.
"""
from __future__ import annotations

from .spacetime import Event, Metric2D, SyncResult, Worldline, null_slopes

SIZE = 400.0
MARGIN = 40.0


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    def __init__(self, events: list[Event]):
        ts = [e.t for e in events]
        xs = [e.x for e in events]
        span = max(max(ts) - min(ts), max(xs) - min(xs), 1e-9)
        pad = 0.15 * span
        self.t_min, self.t_max = min(ts) - pad, max(ts) + pad
        self.x_min, self.x_max = min(xs) - pad, max(xs) + pad
        self.scale = SIZE / max(self.t_max - self.t_min, self.x_max - self.x_min)
        self.width = 2 * MARGIN + (self.x_max - self.x_min) * self.scale
        self.height = 2 * MARGIN + (self.t_max - self.t_min) * self.scale

    def point(self, t: float, x: float) -> tuple[str, str]:
        return (
            _fmt(MARGIN + (x - self.x_min) * self.scale),
            _fmt(MARGIN + (self.t_max - t) * self.scale),
        )


def _clip(w: Worldline, t_lo: float, t_hi: float) -> list[Event]:
    w_lo, w_hi = w.t_range
    lo, hi = max(t_lo, w_lo), min(t_hi, w_hi)
    if lo >= hi:
        return []
    inner = [v for v in w.vertices if lo < v.t < hi]
    return [w.event_at(lo)] + inner + [w.event_at(hi)]


def sync_diagram(result: SyncResult, alice: Worldline, bob: Worldline, g: Metric2D,
                 title: str = "Einstein synchronization") -> str:
    """Worldlines, light signals, the light cone at ``t2`` and the simultaneity segment."""
    e1, refl, e3, e2 = result.emission_event, result.reflection_event, result.return_event, result.alice_t2_event
    # light cone of g through Alice's t2 event, half-length half the round trip
    reach = 0.5 * (e3.t - e1.t)
    cone = [
        (Event(e2.t - reach, e2.x - s * reach), Event(e2.t + reach, e2.x + s * reach))
        for s in null_slopes(g)
        if abs(s) != float("inf")
    ]
    fr = _Frame([e1, refl, e3, e2] + [e for seg in cone for e in seg])
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(fr.width)}" '
        f'height="{_fmt(fr.height)}" viewBox="0 0 {_fmt(fr.width)} {_fmt(fr.height)}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{_fmt(fr.width)}" height="{_fmt(fr.height)}" fill="white"/>',
    ]

    for name, w in (("alice", alice), ("bob", bob)):
        pts = " ".join(",".join(fr.point(e.t, e.x)) for e in _clip(w, fr.t_min, fr.t_max))
        if pts:
            out.append(f'<polyline id="{name}" points="{pts}" fill="none" stroke="black" stroke-width="2"/>')

    for i, (p, q) in enumerate(cone):
        a, b = fr.point(p.t, p.x), fr.point(q.t, q.x)
        out.append(
            f'<line id="cone{i}" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
            'stroke="#999999" stroke-width="1"/>'
        )

    for name, p, q in (("outbound", e1, refl), ("return", refl, e3)):
        a, b = fr.point(p.t, p.x), fr.point(q.t, q.x)
        out.append(
            f'<line id="{name}" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
            'stroke="#d95f02" stroke-width="1.5"/>'
        )

    a, b = fr.point(e2.t, e2.x), fr.point(refl.t, refl.x)
    out.append(
        f'<line id="simultaneity" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
        'stroke="#1b9e77" stroke-width="1.5" stroke-dasharray="6,4"/>'
    )

    for label, e in (("t1", e1), ("t2", e2), ("t3", e3), ("t2'", refl)):
        px, py = fr.point(e.t, e.x)
        out.append(f'<circle cx="{px}" cy="{py}" r="3" fill="black"/>')
        out.append(
            f'<text x="{_fmt(float(px) + 6)}" y="{_fmt(float(py) - 6)}" '
            f'font-family="sans-serif" font-size="12">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
