"""One fermentation tank, one expensive evening.

Compares the thermostat with the price-responsive planner over a 24 h
window with an evening price spike.  The planner pre-cools into the cheap
night hours and coasts through the spike inside the comfort band.
"""
import numpy as np

from brewflex import CoolingPlant, FlexBand, plan_window
from brewflex.flexibility import simulate_dispatch, thermostat_step

MCP = 2.0 * 1045.0 * 3900.0     # 2 m3 of fermenting wort
Q_FERM = np.full(24, 900.0)     # W, steady mid-fermentation heat
AMBIENT = np.full(24, 16.0)
UA = 2.5                        # W/K, lightly insulated tank
PRICES = np.array([250.0] * 6 + [350.0] * 10 + [1400.0] * 4 + [400.0] * 4)

band = FlexBand(setpoint=19.0, deadband_delta=1.0, hysteresis=0.5)
plant = CoolingPlant(q_max=3000.0, cop=3.0)

# thermostat trajectory
temp = 19.0
cooling = False
relay_duty = []
for k in range(24):
    cooling = bool(thermostat_step(temp, band, cooling))
    relay_duty.append(1.0 if cooling else 0.0)
    temp = simulate_dispatch([relay_duty[-1]], temp, [Q_FERM[k]],
                             [AMBIENT[k]], MCP, UA, plant.q_max)[1]
relay_duty = np.array(relay_duty)
relay_cost = float(relay_duty @ PRICES) * plant.q_max / plant.cop / 1e6

plan = plan_window(19.0, MCP, UA, AMBIENT, Q_FERM, PRICES, band, plant)

print(f"{'hour':>4} {'price':>6} {'relay':>6} {'planned':>8} {'temp C':>7}")
for k in range(24):
    print(f"{k:>4} {PRICES[k]:>6.0f} {relay_duty[k]:>6.2f} "
          f"{plan.duty[k]:>8.2f} {plan.temperatures[k + 1]:>7.2f}")

print(f"\nthermostat cost: {relay_cost:8.4f} DKK")
print(f"planned cost:    {plan.cost:8.4f} DKK")
print(f"saving:          {(1 - plan.cost / relay_cost) * 100:6.1f} %")
print(f"spike-hour duty moved away: "
      f"{relay_duty[16:20].sum() - plan.duty[16:20].sum():.2f} duty-hours")
