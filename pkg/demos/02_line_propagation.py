"""Watch a pulse travel the bidirectional delay line, bounce, and settle.

The medium is a 1-D transmission line sampled one cell per tick: a forward
and a backward wave buffer, taps at fixed cells, and reflection coefficients
at both ends.  A single unit impulse launched from the home end (cell 0)
makes every rule visible: one cell per tick, a partial echo off the far end,
and total absorption once the matched home end swallows the return.
"""

from wavebus import BACKWARD, FORWARD, LineGeometry, build_line

geometry = LineGeometry(
    total_delay=16,
    taps=((1, 4), (2, 8), (3, 12)),
    left_reflection=0.0,    # home end matched
    right_reflection=-0.5,  # far end bounces half, inverted
)
state = build_line(geometry)

print("geometry: 16-cell line, taps at 4/8/12, right end reflects -0.5\n")
print("tick  fwd cells 0..16    bwd cells 0..16    tap reads fwd/bwd")


def strip(values):
    return "".join(
        "#" if abs(v) > 0.75 else ("+" if v > 0 else ("-" if v < 0 else "."))
        for v in values
    )


state.inject(0, 1.0, 0.0)
for tick in range(36):
    reads = "  ".join(
        f"n{i}:{state.observe_directional(p, FORWARD) + 0.0:+.1f}/"
        f"{state.observe_directional(p, BACKWARD) + 0.0:+.1f}"
        for i, p in geometry.taps
    )
    print(f"{tick:4d}  {strip(state.forward)}  {strip(state.backward)}  {reads}")
    state.step()

print("\nlegend: '#' = |amplitude| > 0.75, '+'/'-' = smaller, '.' = quiet")
print("the pulse reaches the far end at tick 16, returns inverted and halved")
print("on the backward buffer, and the matched home end absorbs it at tick 33.")

# --- energy accounting -------------------------------------------------------
state = build_line(geometry)
state.inject(0, 1.0, 0.0)
alive = 0
for tick in range(200):
    if any(abs(v) > 0 for v in state.forward) or any(abs(v) > 0 for v in state.backward):
        alive = tick
    state.step()
print(f"\nlast tick with any energy on the line: {alive}")
