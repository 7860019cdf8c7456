# %% [markdown]
# Two 3 mm crystals separated by air. Air dispersion shifts the relative
# phase of pump and down-converted light, so the collinear signal oscillates
# with the gap and the angular profile grows fringes.

# %%
import numpy as np

from bsvkernels import CrystalSpec, GapSpec, PumpSpec, make_grid, propagate_two_crystal
from bsvkernels.analysis import fringe_frequency, fringe_period, fwhm, intensity, visibility
from bsvkernels.dispersion import air_mismatch
from bsvkernels.reference_models import exact_transfer
from bsvkernels.workflows import calibrate_coupling

spec = CrystalSpec(length=3e-3, delta_k=0.0, pump_wavelength=354.7e-9,
                   n_pump=1.66451, n_signal=1.66451)
pump = PumpSpec.from_fwhm(300e-6)
grid = make_grid(3e5, 128)


def gap(d):
    return GapSpec(d, n_pump_air=1.00028574, n_signal_air=1.00027572)


period = fringe_period(air_mismatch(gap(0.0), spec))
print(f"collinear fringe period in air: {period * 1e3:.2f} mm")

# %% [markdown]
# With a constant mismatch the crystal transfer is one matrix exponential,
# so the demo uses it instead of the RK4 integrator. One crystal is computed
# per gain and reused for every gap.

# %%
cal, _, _ = calibrate_coupling(spec, pump, grid, solver=exact_transfer)
ds = 10.66e-3 + np.linspace(0.0, period, 121)
for G in (1.1, 2.45, 3.15):
    single = exact_transfer(spec, pump, grid, cal.coupling(G))
    coll = [intensity(propagate_two_crystal(spec, pump, gap(d), grid, single=single)).collinear()
            for d in ds]
    print(f"G={G}: visibility {visibility(ds, coll, period):.5f}")
    for d in (5.58e-3, 10.66e-3, 23.36e-3):
        prof = intensity(propagate_two_crystal(spec, pump, gap(d), grid, single=single))
        print(f"   d={d * 1e3:6.2f} mm  envelope FWHM {fwhm(prof, angle=True) * 1e3:.3f} mrad  "
              f"fringes per mrad {fringe_frequency(prof) * prof.k_ref * 1e-3:.3f}")
