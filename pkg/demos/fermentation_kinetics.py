"""Fermentation kinetics walk-through.

Plots nothing; prints the extract decline and heat release of a typical ale
and lager batch so the numbers are easy to sanity-check by hand.
"""
import numpy as np

from brewflex import (
    FermentationKinetics,
    apparent_extract,
    extract_rate,
    fermentation_heat,
    wort_properties,
)
from brewflex.thermo import FermentationHeatCoefficient

STYLES = {
    "ale": FermentationKinetics(p_initial=12.0, p_end=2.5, rate_b=0.05,
                                midpoint_m=60.0, shape_s=1.0),
    "lager": FermentationKinetics(p_initial=12.0, p_end=2.2, rate_b=0.025,
                                  midpoint_m=120.0, shape_s=1.0),
}
SETPOINT = {"ale": 19.0, "lager": 11.0}
BATCH_M3 = 2.0  # a 20 hl craft batch

heat_coeff = FermentationHeatCoefficient()

for style, kinetics in STYLES.items():
    days = 7 if style == "ale" else 14
    print(f"\n{style}: {kinetics.p_initial} -> {kinetics.p_end} deg Plato "
          f"over ~{days} days, midpoint at {kinetics.midpoint_m:.0f} h")
    print(f"{'day':>4} {'extract P':>10} {'rate P/h':>10} {'heat W':>8}")
    for day in range(0, days + 1):
        t = day * 24.0
        extract = apparent_extract(kinetics, t)
        rate = extract_rate(kinetics, t)
        props = wort_properties(extract, SETPOINT[style])
        heat = fermentation_heat(props, BATCH_M3, rate, heat_coeff)
        print(f"{day:>4} {extract:>10.3f} {rate:>10.4f} {heat:>8.1f}")

    hours = np.arange(0.0, days * 24.0, 0.5)
    peak = max(
        fermentation_heat(
            wort_properties(apparent_extract(kinetics, t), SETPOINT[style]),
            BATCH_M3, extract_rate(kinetics, t), heat_coeff,
        )
        for t in hours
    )
    print(f"peak heat release for the {BATCH_M3 * 10:.0f} hl batch: "
          f"{peak:.0f} W")
