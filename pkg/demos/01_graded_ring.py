# The dimension-graded ring: classes carry a grade, t shifts it, L is the line.
from mvk.ring import (Atom, GradedClass, Ideal, Reduction, blowup_delta, in_ideal,
                      projective_class, projective_congruence_failures, reduce, torus_class)

t, L = GradedClass.tau(), GradedClass.lef()

# projective space in its own grade and pushed up two grades
print("P^2 in grade 2:", projective_class(2, 2))
print("P^2 in grade 4:", projective_class(2, 4))
print("torus of dim 2:", torus_class(2, 2))

# forgetting the grade gives back the usual polynomial in L
print("t -> 1:", reduce(projective_class(2, 4), Reduction.TAU_TO_ONE))

# [P^n]_d - t^d lies in (tL) once d > n, but not on the diagonal
for n, d in [(2, 3), (2, 2), (4, 7)]:
    ok, q = in_ideal(projective_class(n, d) - t ** d, Ideal.TAU_LEF)
    print(f"n={n} d={d}: divisible={ok}", f"quotient {q}" if ok else "")
print("diagonal failures up to 5:", projective_congruence_failures(5))

# blowing up a curve in a threefold changes the class by a multiple of tL
z = GradedClass.atom(Atom("Z", 1))
print("blow-up difference:", blowup_delta(z, 3, 1, 3))
