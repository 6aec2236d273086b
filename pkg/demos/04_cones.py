# Face lattices of small cones and the orbit count they give.
from mvk.toric import cone_from_rays, euler_number, face_lattice, p_class_from_cone

square = cone_from_rays(3, [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
fl = face_lattice(square)
print("faces by dim:", fl.counts_by_dim(), "euler:", euler_number(fl))
print("P(square):", p_class_from_cone(square, 2))

# a redundant generator is dropped
c = cone_from_rays(2, [(1, 0), (1, 1), (0, 1)])
print("rays kept:", c.rays)

simplex = cone_from_rays(4, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
print("P(simplex, 3):", p_class_from_cone(simplex, 3))
