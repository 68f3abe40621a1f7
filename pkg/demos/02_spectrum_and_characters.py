"""Label every eigenvalue by a sign pattern, collect the energies into a
polynomial in q and compare with the q-Catalan sums and the finitized character.

Run: python demos/02_spectrum_and_characters.py
"""

from densepoly.linkstates import SeamLayout
from densepoly.qseries import finitized_characters, selection_prefactor, selection_sum
from densepoly.spectra import classify_spectrum, generating_polynomial

for N, r, s, parity in [(6, 1, 1, "odd"), (8, 2, 2, "even"), (8, 2, 1, "odd")]:
    layout = SeamLayout.from_kac(N, r, s, parity)
    records = classify_spectrum(layout)
    G = generating_polynomial(records)
    print(f"\n(r, s) = ({r}, {s}), rho = {layout.rho}, N = {N}")
    for rec in records[:6]:
        print(f"   minus={rec.pattern.minus} edge={rec.pattern.edge} E={rec.energy} x{rec.multiplicity}")
    if len(records) > 6:
        print(f"   ... {len(records) - 6} more")
    print("   spectrum:      ", G)
    print("   q-Catalan sum: ", selection_sum(N, layout.rho, s))
    print("   character:     ", finitized_characters(N, r, s, parity))
    print("   aligned equal: ", G.shift(selection_prefactor(s)) == finitized_characters(N, r, s, parity))
