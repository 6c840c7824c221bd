"""Pure-Python horizon loop. Reference twin of ``_kernel.pyx``; used when the extension is absent."""

from .battery import step_scalar

# per-period accumulator columns
Q_ENERGY_COST, Q_PV, Q_IMPORT, Q_EXPORT, Q_THROUGHPUT, Q_LOSSES, Q_CYCLES = range(7)
N_Q_COLS = 7
# per-hour trace columns
(T_PV, T_BPV, T_BG, T_BD, T_LPV, T_LG, T_LD, T_BAL, T_C, T_CMAX) = range(10)
N_TRACE_COLS = 10


def simulate_horizon(load, pv_unit, periods, import_rate, feed_rate, bounds, n_years, t,
                     panels, pv_slope, cmax0, cmax_floor, zeta, dod, rate, F,
                     grid_mode, shoulder_mode, replace_every, consistent, out_q, trace):
    """Run the hourly loop over ``n_years`` repetitions of a one-year input.

    ``cmax0``, ``cmax_floor``, ``zeta`` and ``rate`` are bank totals; a bank
    with ``cmax0 == 0`` is absent. ``out_q`` has shape ``(n_years * t, 7)`` and
    is filled in place; ``trace`` is ``None`` or ``(n_years * 8760, 10)``.
    Returns the final ``(cmax, c, cycles)``.
    """
    n_hours = len(load)
    # plain lists index far faster than numpy arrays inside a Python loop
    load = list(map(float, load))
    pv_unit = list(map(float, pv_unit))
    periods = list(map(int, periods))
    import_rate = list(map(float, import_rate))
    feed_rate = list(map(float, feed_rate))
    bounds = list(map(int, bounds))
    has_bank = cmax0 > 0.0
    cmax = cmax0
    c = (1.0 - dod) * cmax0
    cycles = 0.0
    for year in range(n_years):
        for p in range(t):
            q = year * t + p
            if has_bank and replace_every > 0 and q > 0 and q % replace_every == 0:
                cmax = cmax0
                c = (1.0 - dod) * cmax0
                cycles = 0.0
            delta = 1.0 - pv_slope * q / t
            if delta < 0.0:
                delta = 0.0
            scale = panels * delta
            row = out_q[q]
            cost = pv_sum = imp_sum = exp_sum = thr = loss_sum = 0.0
            cycles_start = cycles
            for h in range(bounds[p], bounds[p + 1]):
                e_load = load[h]
                e_pv = scale * pv_unit[h]
                code = periods[h]
                if has_bank:
                    grid_gate = grid_mode and code == 0
                    discharge_gate = code == 2 or (shoulder_mode and code == 1)
                    c_start = c
                    cmax_start = cmax
                    (cmax, c, cycles, e_bpv, e_bg, e_bd, l_pv, l_g, l_d) = step_scalar(
                        cmax, c, cycles, cmax_floor, zeta, dod, rate, F, grid_gate,
                        discharge_gate, e_pv, e_load, consistent)
                    e_loss = l_pv + l_g + l_d
                    e_bal = e_load - e_pv - e_bd + e_bpv + e_bg + e_loss
                    thr += e_bpv + e_bg + e_bd
                    loss_sum += e_loss
                else:
                    e_bpv = e_bg = e_bd = l_pv = l_g = l_d = 0.0
                    c_start = cmax_start = 0.0
                    e_bal = e_load - e_pv
                if e_bal > 0.0:
                    imp_sum += e_bal
                    cost += import_rate[h] * e_bal
                else:
                    exp_sum -= e_bal
                    cost += feed_rate[h] * e_bal
                pv_sum += e_pv
                if trace is not None:
                    tr = trace[year * n_hours + h]
                    tr[0] = e_pv
                    tr[1] = e_bpv
                    tr[2] = e_bg
                    tr[3] = e_bd
                    tr[4] = l_pv
                    tr[5] = l_g
                    tr[6] = l_d
                    tr[7] = e_bal
                    tr[8] = c_start
                    tr[9] = cmax_start
            row[Q_ENERGY_COST] = cost
            row[Q_PV] = pv_sum
            row[Q_IMPORT] = imp_sum
            row[Q_EXPORT] = exp_sum
            row[Q_THROUGHPUT] = thr
            row[Q_LOSSES] = loss_sum
            row[Q_CYCLES] = cycles - cycles_start
    return cmax, c, cycles
