# Models with multiplicities: covers carry the monodromy action.
from mvk import scenario as sc
from mvk.equivariant import ActionLabel, check_commute, forget_action, restrict_action, vol_equivariant

s = sc.load(sc.resolve_path("eq-mixed"))
v = vol_equivariant(s.model)
print("lcm of multiplicities:", s.model.n)
print("equivariant volume:", v)
print("restricted along 2:", restrict_action(v, 2))
print("action forgotten:  ", forget_action(v))

# a mu_6 action seen through mu_hat -> mu_4 has order 3
print(ActionLabel(6).restrict(4).render())

d = sc.load(sc.resolve_path("eq-double-cover"))
ident = d.raw["equivariant"]["identification"]
print("commutes with base change:", check_commute(d.model, d.base_changed, ident))
print("without identification:  ", check_commute(d.model, d.base_changed))
