"""Free-space link budget and Shannon-rate selection for ISLs.

Distances are in km throughout the package; conversion to metres happens
here. ``math.inf`` stands for an occluded (unreachable) link.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError

SPEED_OF_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23


def db_to_linear(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class LinkBudgetParams:
    """ISL radio parameters. Defaults follow the 20 GHz Ka-band setting.

    The transmit side is characterised by its EIRP density; ``P_t * G_t`` is
    taken to be the EIRP over the whole bandwidth, which makes ``tx_gain_db``
    informational only.
    """

    carrier_frequency_hz: float = 20e9
    eirp_density_dbw_per_mhz: float = 4.0
    tx_gain_db: float = 38.5
    rx_gain_db: float = 38.5
    bandwidth_hz: float = 400e6
    system_noise_temp_k: float = 354.81
    snr_margin_db: float = 2.0
    boltzmann: float = BOLTZMANN
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("carrier_frequency_hz", "bandwidth_hz", "system_noise_temp_k"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be > 0")
        if self.snr_margin_db < 0:
            raise ConfigurationError("snr_margin_db must be >= 0")

    @property
    def eirp_dbw(self) -> float:
        return self.eirp_density_dbw_per_mhz + 10.0 * math.log10(self.bandwidth_hz / 1e6)

    @property
    def noise_power_w(self) -> float:
        return self.boltzmann * self.system_noise_temp_k * self.bandwidth_hz

    def with_bandwidth(self, bandwidth_hz: float) -> "LinkBudgetParams":
        return replace(self, bandwidth_hz=bandwidth_hz)


def fspl(length_km, frequency_hz: float, speed_of_light: float = SPEED_OF_LIGHT):
    """Free-space pathloss ``(4 pi l f / c)**2`` as a linear factor."""
    l = np.asarray(length_km, dtype=float)
    if np.any(l <= 0) or np.any(np.isnan(l)):
        raise ValueError("link length must be > 0")
    with np.errstate(over="ignore"):
        loss = (4.0 * math.pi * l * 1e3 * frequency_hz / speed_of_light) ** 2
    return float(loss) if loss.ndim == 0 else loss


def received_power(params: LinkBudgetParams, length_km):
    """Received power in W; zero for an unreachable link."""
    loss = np.asarray(fspl(length_km, params.carrier_frequency_hz, params.speed_of_light))
    p = db_to_linear(params.eirp_dbw + params.rx_gain_db) / loss
    return float(p) if p.ndim == 0 else p


def snr(params: LinkBudgetParams, length_km):
    """SNR after the margin back-off, linear."""
    return received_power(params, length_km) / (params.noise_power_w * db_to_linear(params.snr_margin_db))


def data_rate(params: LinkBudgetParams, length_km):
    """Shannon rate in bit/s; 0 for ``inf`` length."""
    r = params.bandwidth_hz * np.log2(1.0 + np.asarray(snr(params, length_km)))
    return float(r) if r.ndim == 0 else r


def snr_from_rate(params: LinkBudgetParams, rate_bps):
    return np.exp2(np.asarray(rate_bps, dtype=float) / params.bandwidth_hz) - 1.0
