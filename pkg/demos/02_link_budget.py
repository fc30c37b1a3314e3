"""ISL data rate as a function of distance for the two bandwidths."""
import numpy as np

from leoroute.link_budget import LinkBudgetParams, data_rate, fspl, linear_to_db

p = LinkBudgetParams()
print(f"EIRP {p.eirp_dbw:.2f} dBW, noise {linear_to_db(p.noise_power_w):.2f} dBW")
print(f"FSPL at 2000 km: {linear_to_db(fspl(2000.0, p.carrier_frequency_hz)):.2f} dB")

for b_mhz in (100, 400):
    q = p.with_bandwidth(b_mhz * 1e6)
    for l in (1000, 2000, 3000, 4500):
        print(f"B={b_mhz} MHz, l={l} km: {data_rate(q, l) / 1e6:7.1f} Mbit/s")

# doubling the distance costs 6 dB; rate falls faster than the bandwidth gain
ls = np.linspace(500, 5000, 10)
print(np.round([data_rate(p, l) / 1e6 for l in ls], 1))
