"""The lattice exponent carries -sum_{j=2}^{i} N_j; at i = 0 the reading matters.

Read as an empty sum, i = 0 gives the same left side as i = 1, and the
identity fails. Read with the usual signed convention
(sum_{j=2}^{0} = -N_1) it holds.
"""

from qfalse import bailey as b

pair = b.pair_general(0)
for rho in ("half", "one"):
    inst = b.LatticeInstance(pair, 2, 0, b.rho_exponent(pair, rho))
    for convention in ("empty", "signed"):
        print(f"{convention:6s}", b.verify_lattice(inst, 20, range_convention=convention).summary())
