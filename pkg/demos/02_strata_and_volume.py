# Building a strata complex from an SNC nerve and taking its volume.
from mvk.strata import closed_sum, from_snc_nerve, open_sum, p_class
from mvk.volume import vol, vol_bir, vol_sb

comps = ["E1", "E2", "E3"]
nerve = [{"subset": ["E1", "E2"]}, {"subset": ["E1", "E3"]}, {"subset": ["E2", "E3"]},
         {"subset": comps}]
x = from_snc_nerve(2, comps, nerve)
for s in x:
    print(f"{s.id:10s} codim {s.codim}  P(E) = {p_class(x, s)}")

# both ways of writing the alternating sum give the same class
print("open sum:  ", open_sum(x, 2))
print("closed sum:", closed_sum(x, 2))
print("grade 3:   ", vol(x, 3))

# mod t the volume only sees birational types
print("bir:", vol_bir(x))
print("sb: ", vol_sb(x))

# a pair of components meeting in two disjoint curves
y = from_snc_nerve(2, ["A", "B"], [{"subset": ["A", "B"], "count": 2}])
print([s.id for s in y], vol(y))
