# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled horizon loop. Must stay operation-for-operation identical to ``_kernel_py``."""

import numpy as np

DEF EPS = 1e-12


cdef inline double _min2(double a, double b) nogil:
    return b if b < a else a


cdef inline double _min3(double a, double b, double c) nogil:
    return _min2(_min2(a, b), c)


cdef void _run(const double[::1] load, const double[::1] pv_unit, const signed char[::1] periods,
               const double[::1] import_rate, const double[::1] feed_rate,
               const long long[::1] bounds, int n_years, int t, double panels, double pv_slope,
               double cmax0, double cmax_floor, double zeta, double dod, double rate, double F,
               int grid_mode, int shoulder_mode, int replace_every, int consistent,
               double[:, ::1] out_q, double[:, ::1] trace, int do_trace,
               double* final) noexcept nogil:
    cdef Py_ssize_t n_hours = load.shape[0]
    cdef bint has_bank = cmax0 > 0.0
    cdef double cmax = cmax0
    cdef double c = (1.0 - dod) * cmax0
    cdef double cycles = 0.0
    cdef double keep = 1.0 - F
    cdef int year, p, q
    cdef Py_ssize_t h, r
    cdef double delta, scale, cost, pv_sum, imp_sum, exp_sum, thr, loss_sum, cycles_start
    cdef double e_load, e_pv, surplus, headroom, usable, e_bpv, e_bg, e_bd, l_pv, l_g, l_d
    cdef double e_loss, e_bal, c_start, cmax_start, y, cmax_new
    cdef signed char code
    cdef bint grid_gate, discharge_gate

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
            cost = 0.0
            pv_sum = 0.0
            imp_sum = 0.0
            exp_sum = 0.0
            thr = 0.0
            loss_sum = 0.0
            cycles_start = cycles
            for h in range(bounds[p], bounds[p + 1]):
                e_load = load[h]
                e_pv = scale * pv_unit[h]
                code = periods[h]
                e_bpv = 0.0
                e_bg = 0.0
                e_bd = 0.0
                l_pv = 0.0
                l_g = 0.0
                l_d = 0.0
                c_start = 0.0
                cmax_start = 0.0
                if has_bank:
                    grid_gate = grid_mode and code == 0
                    discharge_gate = code == 2 or (shoulder_mode and code == 1)
                    c_start = c
                    cmax_start = cmax
                    surplus = e_pv - e_load
                    headroom = cmax - c
                    if headroom < EPS:
                        headroom = 0.0
                    usable = c - cmax * (1.0 - dod)
                    if usable < EPS:
                        usable = 0.0

                    e_bpv = _min3(headroom, surplus * keep, rate * keep)
                    if e_bpv < EPS:
                        e_bpv = 0.0
                    l_pv = _min3(headroom / keep, surplus, rate)
                    if l_pv > EPS:
                        l_pv = l_pv * F
                    else:
                        l_pv = 0.0

                    if grid_gate:
                        e_bg = _min2(headroom, rate * keep) - e_bpv
                        if e_bg < EPS:
                            e_bg = 0.0
                        if consistent:
                            l_g = e_bg / keep * F
                        else:
                            l_g = _min2(headroom / keep, rate) - e_bpv
                            if l_g > EPS:
                                l_g = l_g * F
                            else:
                                l_g = 0.0

                    if discharge_gate:
                        e_bd = _min3(usable, -surplus / keep, rate)
                        if e_bd < EPS:
                            e_bd = 0.0
                        if consistent:
                            l_d = e_bd * F
                        else:
                            l_d = _min3(-surplus, rate, usable)
                            if l_d > EPS:
                                l_d = l_d * F
                            else:
                                l_d = 0.0

                    y = (e_bpv + e_bg + e_bd) / (2.0 * dod * cmax) if cmax > 0.0 else 0.0
                    c = c - e_bd + e_bpv + e_bg
                    cmax_new = cmax - y * zeta
                    if cmax_new < cmax_floor:
                        cmax_new = cmax_floor
                    if c > cmax_new:
                        c = cmax_new
                    cmax = cmax_new
                    cycles = cycles + y

                    e_loss = l_pv + l_g + l_d
                    e_bal = e_load - e_pv - e_bd + e_bpv + e_bg + e_loss
                    thr += e_bpv + e_bg + e_bd
                    loss_sum += e_loss
                else:
                    e_bal = e_load - e_pv
                if e_bal > 0.0:
                    imp_sum += e_bal
                    cost += import_rate[h] * e_bal
                else:
                    exp_sum -= e_bal
                    cost += feed_rate[h] * e_bal
                pv_sum += e_pv
                if do_trace:
                    r = year * n_hours + h
                    trace[r, 0] = e_pv
                    trace[r, 1] = e_bpv
                    trace[r, 2] = e_bg
                    trace[r, 3] = e_bd
                    trace[r, 4] = l_pv
                    trace[r, 5] = l_g
                    trace[r, 6] = l_d
                    trace[r, 7] = e_bal
                    trace[r, 8] = c_start
                    trace[r, 9] = cmax_start
            out_q[q, 0] = cost
            out_q[q, 1] = pv_sum
            out_q[q, 2] = imp_sum
            out_q[q, 3] = exp_sum
            out_q[q, 4] = thr
            out_q[q, 5] = loss_sum
            out_q[q, 6] = cycles - cycles_start
    final[0] = cmax
    final[1] = c
    final[2] = cycles


def simulate_horizon(load, pv_unit, periods, import_rate, feed_rate, bounds, int n_years, int t,
                     double panels, double pv_slope, double cmax0, double cmax_floor, double zeta,
                     double dod, double rate, double F, grid_mode, shoulder_mode, int replace_every,
                     consistent, double[:, ::1] out_q, trace):
    """Same contract as ``_kernel_py.simulate_horizon``; releases the GIL while looping."""
    cdef const double[::1] load_v = np.ascontiguousarray(load, dtype=np.float64)
    cdef const double[::1] pv_v = np.ascontiguousarray(pv_unit, dtype=np.float64)
    cdef const signed char[::1] per_v = np.ascontiguousarray(periods, dtype=np.int8)
    cdef const double[::1] imp_v = np.ascontiguousarray(import_rate, dtype=np.float64)
    cdef const double[::1] feed_v = np.ascontiguousarray(feed_rate, dtype=np.float64)
    cdef const long long[::1] bnd_v = np.ascontiguousarray(bounds, dtype=np.int64)
    cdef double[:, ::1] trace_v
    cdef int do_trace = trace is not None
    cdef double final[3]
    cdef int g = 1 if grid_mode else 0
    cdef int s = 1 if shoulder_mode else 0
    cdef int cons = 1 if consistent else 0
    if do_trace:
        trace_v = trace
    else:
        trace_v = np.zeros((1, 10), dtype=np.float64)
    if out_q.shape[0] < n_years * t or out_q.shape[1] < 7:
        raise ValueError("out_q too small")
    if do_trace and trace_v.shape[0] < n_years * load_v.shape[0]:
        raise ValueError("trace too small")
    if bnd_v.shape[0] != t + 1 or bnd_v[t] > load_v.shape[0]:
        raise ValueError("bounds do not match the input year")
    with nogil:
        _run(load_v, pv_v, per_v, imp_v, feed_v, bnd_v, n_years, t, panels, pv_slope, cmax0,
             cmax_floor, zeta, dod, rate, F, g, s, replace_every, cons, out_q, trace_v, do_trace,
             final)
    return final[0], final[1], final[2]
