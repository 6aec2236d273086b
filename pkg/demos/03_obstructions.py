# Verdicts on the bundled worked examples.
from mvk import scenario as sc
from mvk.volume import obstruct_rational, obstruct_stable, parity_rule

for m in sc.corpus_manifest():
    s = sc.load(sc.corpus_dir() / m["file"])
    x = s.complex
    print(s.name)
    print("   ", obstruct_stable(x).render())
    print("   ", obstruct_rational(x).render())
    print("   ", parity_rule(x).render())

# with nothing known about the component the answer stays open,
# together with the merges that would be needed
from mvk.strata import build_complex, make_stratum
u = build_complex(3, [make_stratum("U", 0, 3, label="U")])
print(obstruct_stable(u).render())
