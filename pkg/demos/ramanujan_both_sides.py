"""Expand both sides of the false theta identity sum sgn(n) q^(2n^2+n) = (q)_inf sum q^(n^2+n)/(q)_n^2."""

from qfalse import catalog as c

params = c.FamilyParams(30)
fid = c.FamilyId.RAMANUJAN
for side in c.Side:
    s = c.build_side(fid, params, side)
    shown = " ".join(f"{'+' if v > 0 else '-'} q^{e}" for e, v in s.items())
    print(f"{side.value:5s}: {shown} + O(q^30)")
print(c.verify_family(fid, c.FamilyParams(200)).summary())
