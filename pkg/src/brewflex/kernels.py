"""Compiled inner loops for the annual tank simulation.

The relay and the re-dispatch optimizer run once per tank window for every
batch in the country, so they are JIT-compiled.  The math mirrors
``flexibility.step_temperature`` exactly: the exponential one-hour step is
linear in the duty, with decay ``a`` and per-unit-duty response ``phi``.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_MOVE_EPS = 1e-10


@njit(cache=True)
def _step(temperature, q_net, ambient, mcp, ua, dt):
    if ua == 0.0:
        return temperature + q_net * dt / mcp
    t_eq = ambient + q_net / ua
    return t_eq + (temperature - t_eq) * math.exp(-ua / mcp * dt)


@njit(cache=True)
def relay_window(t0, on0, q_ferm, ambient, mcp, ua, q_max, setpoint, hysteresis,
                 dt, duty_out, temps_out):
    """Hysteresis thermostat over one window; returns the relay end state."""
    on = on0
    temperature = t0
    temps_out[0] = temperature
    for k in range(len(q_ferm)):
        if temperature > setpoint + hysteresis:
            on = True
        elif temperature < setpoint - hysteresis:
            on = False
        duty = 1.0 if on else 0.0
        duty_out[k] = duty
        temperature = _step(
            temperature, q_ferm[k] - duty * q_max, ambient[k], mcp, ua, dt
        )
        temps_out[k + 1] = temperature
    return on


@njit(cache=True)
def redispatch(duty, temps, prices, decay, phi, upper, lower, gate_cap):
    """Shift duty from expensive to cheap hours by feasible pairwise moves.

    Total duty is conserved, so with a perfectly insulated tank the terminal
    temperature is untouched.  With losses, moving duty earlier warms the
    terminal state slightly; the gate only allows such moves when the price
    gain exceeds twice the worst-case repair cost (priced at ``gate_cap``),
    so the flexible policy can never lose against the thermostat reference.
    """
    horizon = len(duty)
    order = np.arange(horizon)
    for i in range(1, horizon):  # stable insertion sort by (price, index)
        key = order[i]
        j = i - 1
        while j >= 0 and (
            prices[order[j]] > prices[key]
            or (prices[order[j]] == prices[key] and order[j] > key)
        ):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key
    for _sweep in range(64):
        moved = False
        for ti in range(horizon):
            target = order[ti]
            if duty[target] >= 1.0 - _MOVE_EPS:
                continue
            for si in range(horizon - 1, ti, -1):
                source = order[si]
                if duty[source] <= _MOVE_EPS:
                    continue
                gain = prices[source] - prices[target]
                if target < source:
                    threshold = 2.0 * gate_cap * (1.0 - decay ** (source - target))
                else:
                    threshold = 0.0
                if gain <= threshold + 1e-9:
                    continue
                amount = duty[source]
                if 1.0 - duty[target] < amount:
                    amount = 1.0 - duty[target]
                for i in range(horizon):
                    coeff = 0.0
                    if i >= target:
                        coeff += phi * decay ** (i - target)
                    if i >= source:
                        coeff -= phi * decay ** (i - source)
                    if coeff < -1e-18:
                        slack = temps[i + 1] - lower[i]
                        cap = slack / (-coeff)
                        if cap < amount:
                            amount = cap
                    elif coeff > 1e-18:
                        slack = upper[i] - temps[i + 1]
                        cap = slack / coeff
                        if cap < amount:
                            amount = cap
                if amount <= _MOVE_EPS:
                    continue
                duty[target] += amount
                duty[source] -= amount
                for i in range(horizon):
                    coeff = 0.0
                    if i >= target:
                        coeff += phi * decay ** (i - target)
                    if i >= source:
                        coeff -= phi * decay ** (i - source)
                    temps[i + 1] += amount * coeff
                moved = True
        if not moved:
            break


@njit(cache=True)
def policy_window(t0, on0, q_ferm, ambient, prices, mcp, ua, q_max, setpoint,
                  hysteresis, delta, dt, flexible, gate_cap, duty_out, temps_out):
    """One control window: relay reference, optionally price re-dispatch.

    The flexible policy only re-times the thermostatic reference dispatch
    (and only when the start temperature is inside the deadband); bounds are
    widened to the reference trajectory so the reference is always feasible.
    """
    on_end = relay_window(
        t0, on0, q_ferm, ambient, mcp, ua, q_max, setpoint, hysteresis, dt,
        duty_out, temps_out,
    )
    in_band = (setpoint - delta - 1e-9) <= t0 <= (setpoint + delta + 1e-9)
    if flexible and in_band:
        horizon = len(q_ferm)
        upper = np.empty(horizon)
        lower = np.empty(horizon)
        for i in range(horizon):
            t_ref = temps_out[i + 1]
            upper[i] = max(setpoint + delta, t_ref)
            lower[i] = min(setpoint - delta, t_ref)
        if ua == 0.0:
            decay = 1.0
            phi = -q_max * dt / mcp
        else:
            decay = math.exp(-ua / mcp * dt)
            phi = -(q_max / ua) * (1.0 - decay)
        redispatch(duty_out, temps_out, prices, decay, phi, upper, lower, gate_cap)
        temperature = t0
        temps_out[0] = temperature
        for k in range(horizon):
            temperature = _step(
                temperature, q_ferm[k] - duty_out[k] * q_max, ambient[k], mcp, ua, dt
            )
            temps_out[k + 1] = temperature
    return on_end


@njit(cache=True)
def simulate_segment(win_starts, win_ends, q_ferm, ambient, prices, sp_arr,
                     mcp_arr, ua, q_max, hysteresis, delta, dt, flexible,
                     gate_cap, t0, duty_out, temps_out):
    """Simulate one tank occupancy (sequence of control windows)."""
    temperature = t0
    on = False
    temps_out[0] = t0
    for w in range(len(win_starts)):
        lo = win_starts[w]
        hi = win_ends[w]
        on = policy_window(
            temperature, on, q_ferm[lo:hi], ambient[lo:hi], prices[lo:hi],
            mcp_arr[lo], ua, q_max, sp_arr[lo], hysteresis, delta, dt,
            flexible, gate_cap, duty_out[lo:hi], temps_out[lo:hi + 1],
        )
        temperature = temps_out[hi]
    return temperature
