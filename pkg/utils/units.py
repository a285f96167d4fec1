"""Frequency unit conversions. Internally every frequency is angular (rad/s)."""

import math

TWO_PI = 2.0 * math.pi

# suffix -> multiplier turning "2pi * value [unit]" into rad/s
FREQUENCY_SUFFIXES = {
    "hz_2pi": TWO_PI,
    "khz_2pi": TWO_PI * 1e3,
    "mhz_2pi": TWO_PI * 1e6,
    "ghz_2pi": TWO_PI * 1e9,
    "rad_s": 1.0,
}


def khz(value: float) -> float:
    """2π·value kHz in rad/s."""
    return TWO_PI * 1e3 * value


def mhz(value: float) -> float:
    return TWO_PI * 1e6 * value


def ghz(value: float) -> float:
    return TWO_PI * 1e9 * value


def to_angular(value: float, suffix: str) -> float:
    """Convert a suffixed literal (e.g. ``khz_2pi``) to rad/s."""
    try:
        return float(value) * FREQUENCY_SUFFIXES[suffix]
    except KeyError as exc:
        raise ValueError(f"unknown frequency suffix '{suffix}'") from exc


def to_hz(angular: float) -> float:
    """Ordinary frequency (Hz) of an angular frequency."""
    return angular / TWO_PI
