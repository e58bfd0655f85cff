"""
Sequential decoding with shared entanglement
============================================

The receiver tests codewords one by one with yes/no projective
measurements.  This script runs the full construction on a noiseless qubit
channel: type-decompose the entanglement, draw Heisenberg-Weyl codebooks,
build the sandwiched POVM, and compare the measured success probability
with the packing bound at honestly measured constants.
"""

import numpy as np

from qmac import eacode, qmat, seqdecode, typicality
from qmac.qmat import FactorSpace, PureState

bell = PureState(FactorSpace(("Ap", "A"), (2, 2)),
                 np.array([1, 0, 0, 1]) / np.sqrt(2))
channel = qmat.named_channel("identity:2")

# The encoders act block-diagonally on type classes; at n = 1 over a
# maximally entangled qubit the blocks are singletons, so the encoder set
# is tiny and the code can only separate phase flips.
decomp = eacode.type_decompose(bell, 1)
print("block dimensions at n = 1:", decomp.block_dims,
      "-> |S| =", eacode.index_set_size(decomp))

for messages in (1, 2, 4):
    rep = seqdecode.ea_sequential_protocol(
        channel, bell, n=1, message_count=messages, delta=1.0,
        seed=7, trials=200,
    )
    print(f"|M| = {messages}: success = {rep.success_mean:.4f} "
          f"+- {rep.success_stderr:.4f}, bound = {rep.bound:.4f} "
          f"(condition holds: {rep.bound_condition_holds})")

# The bound's ingredients are measured, not assumed.  Exhaustive
# enumeration over all codebooks gives the exact expectation the bound
# controls; at |M| = 4 the phase-only encoders collide and the exact value
# is 15/32.
dec, code_proj, sigma, words = seqdecode.ea_protocol_instance(
    channel, bell, 1, 1.0
)
keys = list(sigma.keys())
ens = [(1 / len(keys), sigma[s].matrix) for s in keys]
exact = seqdecode.expected_success_exhaustive(
    ens, code_proj, [words[s] for s in keys], 4
)
print("\nexhaustive E[success] at |M| = 4:", exact, "(= 15/32)")

# The trace sequence f_z behind the bound decays geometrically in d/D.
mc = typicality.measure_packing_constants(
    [1 / len(keys)] * len(keys), [sigma[s].matrix for s in keys],
    code_proj, [words[s] for s in keys],
)
fs = seqdecode.packing_diagnostics(ens, code_proj, [words[s] for s in keys], 4)
print(f"measured constants: eps = {mc.epsilon:.3e}, d = {mc.d:.3f}, "
      f"D = {mc.D:.3f}")
print("f_z sequence:", [round(f, 6) for f in fs])
print("geometric envelope (d/D)^z f_0:",
      [round((mc.d / mc.D) ** z * fs[0], 6) for z in range(len(fs))])

# Larger blocks make the encoder set rich.  At n = 2 the middle type class
# is two-dimensional, so shifts X and phases Z both act, and by n = 3 the
# success at fixed |M| = 4 climbs steadily toward 1: the capacity-achieving
# behavior of the construction showing up at desk scale.
print()
for n in (2, 3):
    decomp_n = eacode.type_decompose(bell, n)
    rep = seqdecode.ea_sequential_protocol(
        channel, bell, n=n, message_count=4, delta=1.0, seed=11, trials=40,
    )
    print(f"n = {n}: blocks {decomp_n.block_dims}, "
          f"|S| = {eacode.index_set_size(decomp_n)}, "
          f"|M| = 4 success = {rep.success_mean:.4f} "
          f"+- {rep.success_stderr:.4f}")
