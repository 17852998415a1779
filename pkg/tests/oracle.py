"""Independent oracles for the test suite.

Everything here is written from scratch against the underlying physics and
bookkeeping, deliberately not sharing code paths with the package: scalar
loops instead of vectorized kernels, explicit angle computations instead of
algebraic shortcuts, and quadrature instead of library gamma calls. Used to
cross-check channel gains, rates, residuals, and optimizer results.
"""

import math

import numpy as np
from scipy import integrate


def gamma_by_quadrature(z: float) -> float:
    """Gamma(z) via direct numerical integration of t^(z-1) e^(-t)."""
    value, _ = integrate.quad(lambda t: t ** (z - 1.0) * math.exp(-t), 0.0, np.inf)
    return value


def levy_scale_by_quadrature(beta: float) -> float:
    num = gamma_by_quadrature(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = gamma_by_quadrature((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def scalar_gain(user_xy, placement_xy, altitude, detector_area, filter_gain,
                refractive_index, fov_rad, semiangle_rad) -> float:
    """One-link DC gain from first principles (explicit angles, scalar math)."""
    dx = placement_xy[0] - user_xy[0]
    dy = placement_xy[1] - user_xy[1]
    d = math.sqrt(dx * dx + dy * dy + altitude * altitude)
    incidence = math.acos(altitude / d)
    if incidence > fov_rad:
        return 0.0
    m = -math.log(2.0) / math.log(math.cos(semiangle_rad))
    radiant_intensity = (m + 1.0) / (2.0 * math.pi) * math.cos(incidence) ** m
    concentrator = refractive_index ** 2 / math.sin(fov_rad) ** 2
    return (detector_area / d ** 2) * radiant_intensity * filter_gain * concentrator * math.cos(incidence)


def scenario_gains(scenario, x, y):
    opt = scenario.optics
    return [
        scalar_gain(u, (x, y), scenario.altitude, opt.detector_area, opt.filter_gain,
                    opt.refractive_index, opt.fov_rad, opt.semiangle_rad)
        for u in scenario.users
    ]


def decode_order_by_gain(gains):
    """Ids sorted ascending by gain, ties broken by lower id first."""
    return sorted(range(len(gains)), key=lambda i: (gains[i], i))


def scalar_efficiencies(gains, powers, noise):
    """Per-user log2(1+SINR) with a literal stronger-user interference loop."""
    order = decode_order_by_gain(gains)
    position = {user: slot for slot, user in enumerate(order)}
    out = []
    for i in range(len(gains)):
        interference = 0.0
        for j in range(len(gains)):
            if position[j] > position[i]:
                interference += gains[i] * powers[j]
        out.append(math.log2(1.0 + gains[i] * powers[i] / (noise + interference)))
    return out


def scalar_feasible(scenario, x, y, powers, tol=0.0):
    """Literal check of every constraint of the placement/power problem."""
    gains = scenario_gains(scenario, x, y)
    if sum(powers) > scenario.p_max + tol:
        return False
    if sum(math.sqrt(max(p, 0.0)) for p in powers) > scenario.optical_budget + tol:
        return False
    order = decode_order_by_gain(gains)
    for slot in range(len(order) - 1):
        hb_next = gains[order[slot + 1]] / scenario.noise_power
        stronger = sum(powers[order[k]] for k in range(slot + 1, len(order)))
        if powers[order[slot]] * hb_next - stronger * hb_next < scenario.theta - tol:
            return False
    se = scalar_efficiencies(gains, powers, scenario.noise_power)
    for value in se:
        if value * scenario.bandwidth < scenario.rate_min - tol:
            return False
    if x * x + y * y > scenario.disc_radius ** 2 + tol:
        return False
    return all(p >= -tol for p in powers)


# --- exhaustive grid search over placement and power ------------------------

def _grid_best_two_users(scenario, xs, ys, p_grid):
    """Best feasible sum efficiency over a placement grid x power grid, N=2."""
    noise = scenario.noise_power
    theta = scenario.theta
    se_floor = scenario.rate_min / scenario.bandwidth
    r_sq = scenario.disc_radius ** 2
    c_budget = scenario.optical_budget

    pa = p_grid[:, None]  # power of user a
    pb = p_grid[None, :]  # power of user b
    budget_ok = (pa + pb) <= scenario.p_max
    optical_ok = (np.sqrt(pa) + np.sqrt(pb)) <= c_budget

    best = -np.inf
    best_point = None
    for x in xs:
        for y in ys:
            if x * x + y * y > r_sq:
                continue
            g = scenario_gains(scenario, x, y)
            order = decode_order_by_gain(g)
            weak, strong = order[0], order[1]
            gw, gs = g[weak], g[strong]
            pw = pa if weak == 0 else pb
            ps = pb if weak == 0 else pa
            sic_ok = (pw - ps) * (gs / noise) >= theta
            se_w = np.log2(1.0 + gw * pw / (noise + gw * ps))
            se_s = np.log2(1.0 + gs * ps / noise)
            ok = budget_ok & optical_ok & sic_ok & (se_w >= se_floor) & (se_s >= se_floor)
            if not ok.any():
                continue
            total = np.where(ok, se_w + se_s, -np.inf)
            idx = np.unravel_index(np.argmax(total), total.shape)
            if total[idx] > best:
                best = float(total[idx])
                best_point = (x, y, float(pa[idx[0], 0]), float(pb[0, idx[1]]))
    return best, best_point


def _grid_best_three_users(scenario, xs, ys, p_grid):
    noise = scenario.noise_power
    theta = scenario.theta
    se_floor = scenario.rate_min / scenario.bandwidth
    r_sq = scenario.disc_radius ** 2

    p0 = p_grid[:, None, None]
    p1 = p_grid[None, :, None]
    p2 = p_grid[None, None, :]
    budget_ok = (p0 + p1 + p2) <= scenario.p_max
    optical_ok = (np.sqrt(p0) + np.sqrt(p1) + np.sqrt(p2)) <= scenario.optical_budget
    powers = (p0, p1, p2)

    best = -np.inf
    best_point = None
    for x in xs:
        for y in ys:
            if x * x + y * y > r_sq:
                continue
            g = scenario_gains(scenario, x, y)
            order = decode_order_by_gain(g)
            pw, pm, ps = (powers[order[0]], powers[order[1]], powers[order[2]])
            gw, gm, gs = g[order[0]], g[order[1]], g[order[2]]
            sic_ok = ((pw - (pm + ps)) * (gm / noise) >= theta) & ((pm - ps) * (gs / noise) >= theta)
            se_w = np.log2(1.0 + gw * pw / (noise + gw * (pm + ps)))
            se_m = np.log2(1.0 + gm * pm / (noise + gm * ps))
            se_s = np.log2(1.0 + gs * ps / noise)
            ok = (budget_ok & optical_ok & sic_ok
                  & (se_w >= se_floor) & (se_m >= se_floor) & (se_s >= se_floor))
            if not ok.any():
                continue
            total = np.where(ok, se_w + se_m + se_s, -np.inf)
            idx = np.unravel_index(np.argmax(total), total.shape)
            if total[idx] > best:
                best = float(total[idx])
                best_point = (x, y, float(p_grid[idx[0]]), float(p_grid[idx[1]]), float(p_grid[idx[2]]))
    return best, best_point


def grid_oracle(scenario, placement_points=41, power_points=33, refinements=2):
    """Exhaustive grid search with local zoom refinement.

    Returns (best sum efficiency, relative change of the incumbent across the
    refinement steps). The second value certifies grid adequacy: refining the
    grid twice around the incumbent moves the optimum by that fraction.
    """
    n = scenario.n_users
    if n == 2:
        search = _grid_best_two_users
    elif n == 3:
        search = _grid_best_three_users
    else:
        raise ValueError("grid oracle supports 2 or 3 users only")

    r = scenario.disc_radius
    xs = np.linspace(-r, r, placement_points)
    ys = np.linspace(-r, r, placement_points)
    p_grid = np.linspace(0.0, scenario.p_max, power_points)
    best, point = search(scenario, xs, ys, p_grid)
    if point is None:
        return -np.inf, np.inf

    max_change = 0.0
    for _ in range(refinements):
        x_step = xs[1] - xs[0]
        p_step = p_grid[1] - p_grid[0]
        xs = np.linspace(point[0] - 1.5 * x_step, point[0] + 1.5 * x_step, placement_points)
        ys = np.linspace(point[1] - 1.5 * x_step, point[1] + 1.5 * x_step, placement_points)
        lo = max(0.0, min(point[2:]) - 1.5 * p_step)
        hi = min(scenario.p_max, max(point[2:]) + 1.5 * p_step)
        p_grid = np.linspace(lo, hi, power_points)
        refined, refined_point = search(scenario, xs, ys, p_grid)
        if refined_point is None or refined < best:
            break
        max_change = max(max_change, abs(refined - best) / max(abs(best), 1e-12))
        best, point = refined, refined_point
    return best, max_change
