"""With (-q)_inf, i = 0 and negative ell both sides start below q^0.

The catalog multiplies both sides by q^s and widens the order by s, so the
check still covers every exponent of the original series below the order.
"""

from qfalse import catalog as c

fid = c.FamilyId.SHIFTED_R
for ell in range(0, -4, -1):
    p = c.FamilyParams(20, k=2, i=0, ell=ell)
    s = c.normalizing_shift(fid, p)
    left = c.build_side(fid, p, c.Side.LEFT)
    lead = next(iter(left.items()))
    print(f"ell={ell:2d}: shift s={s}, original series starts at q^{lead[0] - s} "
          f"with coefficient {lead[1]}; {c.verify_family(fid, p).summary()}")
