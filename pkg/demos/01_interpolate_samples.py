#!/usr/bin/env python3
"""Build a one-hidden-layer ReLU network through given points, by hand.

The constructor places one hidden unit per sample gap: the first layer is an
all-ones column with biases at the negated sample abscissae, and the output
row carries the secant-slope differences.  The result passes through every
sample and is linear in between, i.e. it IS the piecewise-linear interpolant,
with every weight written down explicitly.
"""

import numpy as np

from reluconstruct import (
    SampleSet,
    cpl_from_net_1d,
    evaluate,
    lemma1_interpolant,
    serialize,
)

rng = np.random.default_rng(7)
xs = np.sort(rng.uniform(0.0, 1.0, 8))
xs[0], xs[-1] = 0.0, 1.0
ys = rng.uniform(-1.0, 1.0, 8)

net = lemma1_interpolant(SampleSet(xs, ys))
print("hidden widths:", net.hidden_widths, "(always one less than the sample count)")

print("\nsample reproduction:")
for x, y in zip(xs, ys):
    print(f"  phi({x:.4f}) = {evaluate(net, x): .12f}   target {y: .12f}")

print("\nfirst-layer biases are the negated abscissae:")
print(" ", np.round(-net.layers[0][1], 4))

recovered = cpl_from_net_1d(net, 0.0, 1.0, 4001)
print("\nbreak points recovered from the black-box network by probing:")
print(" ", np.round(recovered.breaks, 4))

doc = serialize(net)
print(f"\nserialized size: {len(doc)} bytes (JSON, exact round-trip)")
