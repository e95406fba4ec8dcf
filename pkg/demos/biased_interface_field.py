"""Field of a line source above a biased magnetoplasma interface.

Inside the bulk TM gap the interface carries a single surface plasmon that
only runs towards +x. We sample the field along the source line, split it into
the pole (SPP) part and the rest, and turn it into normalized coupling rates.
"""
import numpy as np
from scipy.constants import c

from nrentangle.greens2d import InterfaceGeometry, field_profile, find_spp_poles, normalized_rates_profile
from nrentangle.materials import OpaqueMedium, PlasmaParams, eps_effective, permittivity

w = 2 * np.pi * 200e12
lam = 2 * np.pi * c / w
geom = InterfaceGeometry(PlasmaParams.from_ratios(w, 0.95, 0.21), OpaqueMedium(-2.0), lam / 10)

print(f"eps_eff = {eps_effective(permittivity(geom.plasma, w)).real:.4f}  (negative: inside the gap)")
for p in find_spp_poles(geom, w):
    print(f"SPP pole kx = {p.kx / (w / c):.4f} k0, direction {p.direction:+d}")

# %% total field versus pole contribution
x = np.linspace(-2, 2, 40) * lam
prof = field_profile(geom, x, geom.d, w)
print("\n   x/lam     |Hz|        |Hz_spp|")
for xi, h, r in zip(x[::3], prof.Hz_total[::3], prof.Hz_residue[::3]):
    print(f"{xi / lam:8.3f}  {abs(h):10.4g}  {abs(r):10.4g}")

# %% coupling rates relative to the self rate
xs = np.linspace(0.05, 1.0, 20) * lam
rp = normalized_rates_profile(geom, xs, w)
k = rp["gamma_ratio"].argmax()
print(f"\nlargest Gamma21/Gamma11 = {rp['gamma_ratio'][k]:.3f} at x = {xs[k] / lam:.3f} lambda0")
