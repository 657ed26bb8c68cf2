"""Independent high-precision evaluation of the closed-form bound examples.

The printed values are frozen into tests/unit/test_bounds.cpp and
tests/unit/test_continuous.cpp. Re-run with `python3 derive_constants.py`.
"""
from mpmath import mp, mpf, log, sqrt, ceil, cbrt

mp.dps = 40


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


# Bennett: var 0.25, N 100, alpha 0.05, range 1
L = log(1 / mpf("0.05"))
show("bennett", sqrt(2 * mpf("0.25") * L / 100) + L / (3 * 100))

# PL band: PL_hat 3, N 1000, alpha 0.1, delta_inf 0.25
c = 4 * log(2 / mpf("0.1")) / (3 * 1000 * mpf("0.25"))
show("band_c", c)
show("band_lo", mpf(2) / 3 * (3 - c))
show("band_hi", 2 * (3 + c))

# Confidence width: delta_sup 1, delta_inf 0.25, delta_sup(pi,mu) 4, PL_hat 3, N 100, alpha 0.05
L4 = log(4 / mpf("0.05"))
ds, di, dpm, n = mpf(1), mpf("0.25"), mpf(4), mpf(100)
sq = sqrt(3 * L4 * ds * 3 / n)
cr = sqrt(8 * ds / (3 * di)) * L4 / n
rg = L4 * dpm / (3 * n)
show("width_sqrt", sq)
show("width_cross", cr)
show("width_range", rg)
show("width", sq + cr + rg)
show("width_max_envelope", sq + L4 / n * max(2 * sqrt(8 * ds / (3 * di)), mpf(2) / 3 * dpm))

# Psi_beta with |Pi| = 2, beta = 1
Lp = log(4 * 2 / mpf("0.05"))
bt = 3 * ds * Lp / (4 * 1 * n)
cr2 = sqrt(8 * ds / (3 * di)) * Lp / n
rg2 = Lp * dpm / (3 * n)
show("psi_beta", bt)
show("psi_cross", cr2)
show("psi_range", rg2)
show("psi", bt + cr2 + rg2)

# Oracle inequality: beta 1, PL_hat 3; Delta = max(sqrt(1/0.25), 4) = 4
delta = max(sqrt(ds / di), dpm)
show("oracle_ineq", 2 * 1 * 3 + (mpf(3) / 2 * ds / 1 + 8 * delta) * Lp / n)
show("beta_star_bound", sqrt(18 * ds * 3 * Lp / n) + 12 * delta * Lp / n)
show("beta_candidate", sqrt(3 * Lp / 1200))

# Corollary: N 1000, H 0.1, delta_inf 0.5, |Pi| 16, alpha 0.05, PL 2 (beta* form),
# and beta 0.1 with PL_hat 2 (fixed-beta form)
N, H, dinf = mpf(1000), mpf("0.1"), mpf("0.5")
Lc = log(4 * 16 / mpf("0.05"))
show("corollary_beta_star", 6 * sqrt(2 * Lc / (N * H)) + 24 * Lc / (N * H * dinf))
show("corollary_fixed", 2 * mpf("0.1") * 2 + (3 / mpf("0.1") + 16 / dinf) * Lc / (N * H))

# suggest K
show("suggest_k", ceil(cbrt(1000 * dinf / (H * log(1 / mpf("0.05"))))))
