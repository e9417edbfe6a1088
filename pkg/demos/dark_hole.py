"""
A hole trapped in a dark state
==============================

The same two fields and decay rates drive two systems.  With one electron
(V scheme) the superposition of the upper levels still decays and the atom
keeps fluorescing.  With two electrons the roles swap: the Lambda dark state
is a superposition of where the hole sits, the hole cannot relax, and the
fluorescence stops.
"""

from darkhole import compare_v_lambda, dark_bright_basis, scenario_preset

params = scenario_preset("fig4").params.replace(chi=0)
report = compare_v_lambda(params)
print(report.render())

dark, bright = dark_bright_basis(params.rabi_alpha, params.rabi_beta)
print("\ndark state coefficients on |A>, |B>:", dark.coefficients.round(6))

# a stronger alpha tilts the dark state towards |B>, so the hole settles in b
for alpha in (0.1, 0.2, 0.3):
    r = compare_v_lambda(params.replace(rabi_alpha=alpha))
    print(f"alpha = {alpha}: hole in a {r.hole.p_hole_a:.3f}, hole in b {r.hole.p_hole_b:.3f}, "
          f"F_V = {r.fluorescence_v:.3e}")
