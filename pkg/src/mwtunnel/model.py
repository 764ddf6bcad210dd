"""Dimensionless scenario description shared by all other modules.

Conventions: frequencies and energies are measured in units of the trap
frequency, lengths in units of the trap oscillator length, and time in units
of the inverse trap frequency.  Sites are indexed starting from 1.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

#: Minimum site separation (oscillator lengths) below which the neglect of
#: the trapped-wave-function overlap is no longer safe.  Configs below this
#: are accepted with a warning.
MIN_SAFE_SEPARATION = 2.0


class ConfigError(ValueError):
    """A scenario description violates one of its invariants."""


@dataclass(frozen=True)
class UnitSystem:
    """Physical anchors of the dimensionless unit system.

    ``trap_frequency_hz`` is the trap frequency divided by 2*pi (e.g. 40 kHz)
    and ``oscillator_length_m`` the corresponding ground-state size.  The bare
    hyperfine/drive frequencies are optional metadata only; dynamics depends
    on them solely through the detuning already stored in the config.
    """

    trap_frequency_hz: float = 40e3
    oscillator_length_m: float = 0.065e-9
    omega_a_hz: float | None = None
    omega_b_hz: float | None = None
    omega_laser_hz: float | None = None

    def __post_init__(self):
        if self.trap_frequency_hz <= 0:
            raise ConfigError("trap_frequency_hz must be > 0")
        if self.oscillator_length_m <= 0:
            raise ConfigError("oscillator_length_m must be > 0")

    @property
    def angular_trap_frequency(self) -> float:
        return 2 * math.pi * self.trap_frequency_hz

    # frequency <-> angular frequency in rad/s
    def frequency_to_physical(self, omega: float) -> float:
        return omega * self.angular_trap_frequency

    def frequency_to_dimensionless(self, omega_rad_s: float) -> float:
        return omega_rad_s / self.angular_trap_frequency

    def time_to_physical(self, t: float) -> float:
        return t / self.angular_trap_frequency

    def time_to_dimensionless(self, t_s: float) -> float:
        return t_s * self.angular_trap_frequency

    def length_to_physical(self, z: float) -> float:
        return z * self.oscillator_length_m

    def length_to_dimensionless(self, z_m: float) -> float:
        return z_m / self.oscillator_length_m

    def to_dict(self) -> dict:
        d = {
            "trap_frequency_hz": self.trap_frequency_hz,
            "oscillator_length_m": self.oscillator_length_m,
        }
        for key in ("omega_a_hz", "omega_b_hz", "omega_laser_hz"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        return d


@dataclass(frozen=True)
class LatticeConfig:
    """A physical scenario: site positions, detuning and drive strength.

    ``positions`` are in oscillator lengths and must be strictly increasing;
    ``detuning`` and ``drive`` are in trap-frequency units; ``initial_site``
    is 1-based.
    """

    positions: tuple[float, ...]
    detuning: float
    drive: float
    initial_site: int = 1
    units: UnitSystem = field(default_factory=UnitSystem)

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(float(z) for z in self.positions))
        errors = self.violations()
        if errors:
            raise ConfigError("; ".join(errors))
        seps = self.separations()
        off = seps[~np.eye(self.n_sites, dtype=bool)]
        if off.size and off.min() < MIN_SAFE_SEPARATION:
            warnings.warn(
                f"minimum site separation {off.min():.3g} < {MIN_SAFE_SEPARATION}: "
                "neglect of the trapped-wave-function overlap is questionable",
                stacklevel=3,
            )

    def violations(self) -> list[str]:
        errors = []
        if len(self.positions) < 1:
            errors.append("at least one site is required")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            errors.append("positions not strictly increasing")
        if self.drive < 0:
            errors.append("drive must be >= 0")
        if not errors and not (1 <= self.initial_site <= len(self.positions)):
            errors.append(
                f"initial_site {self.initial_site} out of range 1..{len(self.positions)}"
            )
        return errors

    @property
    def n_sites(self) -> int:
        return len(self.positions)

    def separations(self) -> np.ndarray:
        """Pairwise |z_j - z_l| matrix in oscillator lengths."""
        z = np.asarray(self.positions)
        return np.abs(z[:, None] - z[None, :])

    @property
    def uniform_spacing(self) -> float | None:
        """Common nearest-neighbour spacing, or None if non-uniform."""
        if self.n_sites == 1:
            return 0.0
        diffs = np.diff(self.positions)
        if np.allclose(diffs, diffs[0], rtol=1e-12, atol=1e-12):
            return float(diffs[0])
        return None

    @property
    def initial_amplitudes(self) -> np.ndarray:
        c0 = np.zeros(self.n_sites, dtype=complex)
        c0[self.initial_site - 1] = 1.0
        return c0

    def with_(self, **kwargs) -> "LatticeConfig":
        """Copy with selected fields replaced (detuning, drive, ...)."""
        return replace(self, **kwargs)

    def with_spacing(self, spacing: float) -> "LatticeConfig":
        """Copy with uniformly respaced sites, keeping the first position."""
        z0 = self.positions[0]
        positions = tuple(z0 + spacing * j for j in range(self.n_sites))
        return replace(self, positions=positions)

    # JSON scenario schema
    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "positions_zbar": list(self.positions),
            "omega0_wtilde": self.detuning,
            "omega_rabi_wtilde": self.drive,
            "initial_site": self.initial_site,
            "units": self.units.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeConfig":
        try:
            positions = tuple(data["positions_zbar"])
            detuning = float(data["omega0_wtilde"])
            drive = float(data["omega_rabi_wtilde"])
        except KeyError as exc:
            raise ConfigError(f"missing scenario key: {exc}") from exc
        n_sites = data.get("n_sites")
        if n_sites is not None and int(n_sites) != len(positions):
            raise ConfigError(
                f"n_sites={n_sites} does not match {len(positions)} positions"
            )
        units = UnitSystem(**data["units"]) if "units" in data else UnitSystem()
        return cls(
            positions=positions,
            detuning=detuning,
            drive=drive,
            initial_site=int(data.get("initial_site", 1)),
            units=units,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LatticeConfig":
        return cls.from_dict(json.loads(text))


def validate(config: LatticeConfig) -> LatticeConfig:
    """Return ``config`` unchanged if all invariants hold, else raise.

    The list of individual violations is available via ``violations()`` and
    is embedded in the raised :class:`ConfigError`.
    """
    errors = config.violations()
    if errors:
        raise ConfigError("; ".join(errors))
    return config


def uniform_chain(
    n_sites: int,
    spacing: float,
    detuning: float,
    drive: float,
    initial_site: int = 1,
    units: UnitSystem | None = None,
) -> LatticeConfig:
    """Uniformly spaced chain starting at z = 0."""
    return LatticeConfig(
        positions=tuple(spacing * j for j in range(n_sites)),
        detuning=detuning,
        drive=drive,
        initial_site=initial_site,
        units=units or UnitSystem(),
    )
