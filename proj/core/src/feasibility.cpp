#include "fan/feasibility.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace fan {

FeasibilityInputs inputs_from(const GroupStats& stats, const GroupErrorRates& errors,
                              const ConstraintSpec& spec) {
    FeasibilityInputs in;
    int Z = stats.n_groups();
    for (int z = 0; z < Z; ++z) {
        in.tau.push_back(stats.tau(z).to_double());
        in.e.push_back(errors.e(z).to_double());
        in.eta.push_back(spec.eta[static_cast<size_t>(z)].to_double());
        in.delta.push_back(spec.delta[static_cast<size_t>(z)].to_double());
    }
    in.eps = spec.eps.to_double();
    if (spec.sigma) in.sigma1 = (*spec.sigma)[1].to_double();
    return in;
}

double dp_min_delta(const FeasibilityInputs& in, int hi, int lo) {
    if (in.tau[static_cast<size_t>(hi)] < in.tau[static_cast<size_t>(lo)])
        throw std::invalid_argument("dp_min_delta: pair must be ordered with tau_hi >= tau_lo");
    double ap_hi = in.a_prime(hi);
    if (ap_hi <= 0.0) return -std::numeric_limits<double>::infinity();
    double num = 1.0 + in.eps + in.e_prime(lo) - in.tau[static_cast<size_t>(hi)] + in.tau[static_cast<size_t>(lo)];
    return 1.0 - num / ap_hi;
}

DpReport dp_feasible(const FeasibilityInputs& in) {
    DpReport rep;
    int Z = in.n_groups();
    for (int hi = 0; hi < Z; ++hi) {
        for (int lo = 0; lo < Z; ++lo) {
            if (hi == lo) continue;
            if (in.tau[static_cast<size_t>(hi)] < in.tau[static_cast<size_t>(lo)]) continue;
            PairCondition pc;
            pc.hi = hi;
            pc.lo = lo;
            pc.degenerate = in.a_prime(hi) <= 0.0;
            pc.min_delta = dp_min_delta(in, hi, lo);
            pc.satisfied = in.delta[static_cast<size_t>(hi)] >= pc.min_delta;
            if (!pc.satisfied) rep.feasible = false;
            rep.pairs.push_back(pc);
        }
    }
    return rep;
}

bool eop_feasible(const FeasibilityInputs&) { return true; }
bool eod_feasible(const FeasibilityInputs&) { return true; }

bool dp_equal_abstention_sufficient(const FeasibilityInputs& in, int hi, int lo) {
    if (!in.sigma1) throw std::invalid_argument("dp_equal_abstention_sufficient: sigma1 not provided");
    double cap_lo = 2.0 * in.tau[static_cast<size_t>(lo)] * (*in.sigma1);
    return in.delta[static_cast<size_t>(lo)] <= cap_lo && in.delta[static_cast<size_t>(hi)] >= dp_min_delta(in, hi, lo);
}

DeltaInterval eop_nontrivial_bounds(double e, double eta, double tau) {
    DeltaInterval iv;
    double ep = (1.0 + eta) * e;
    iv.hi = 1.0 - tau;
    iv.lo = std::max(0.0, e - tau);
    double d3 = 1.0 - ep;
    if (d3 == 0.0) {
        iv.degenerate = true;
    } else {
        iv.lo = std::max(iv.lo, (tau - eta * e - 1.0) / d3);
    }
    iv.lo = std::max(iv.lo, (-eta * e) / (2.0 - ep));
    return iv;
}

std::vector<SweepPoint> sweep_feasibility(const std::vector<double>& eps_grid,
                                          const std::vector<double>& delta_grid,
                                          const std::vector<double>& eta_grid,
                                          const std::vector<double>& sigma_grid, const CellTable& table,
                                          const GroupStats& stats, const GroupErrorRates& errors,
                                          Fairness fairness) {
    std::vector<SweepPoint> out;
    if (eps_grid.empty() || delta_grid.empty()) return out;
    std::vector<double> etas = eta_grid.empty() ? std::vector<double>{0.0} : eta_grid;
    std::vector<std::optional<double>> sigmas;
    if (sigma_grid.empty())
        sigmas.push_back(std::nullopt);
    else
        for (double s : sigma_grid) sigmas.push_back(s);

    long long min_nz = stats.sizes[0];
    for (long long n : stats.sizes) min_nz = std::min(min_nz, n);
    double margin = 1.0 / static_cast<double>(min_nz);
    int Z = stats.n_groups();

    for (double ep : eps_grid)
        for (double dl : delta_grid)
            for (double et : etas)
                for (const auto& sg : sigmas) {
                    SweepPoint pt;
                    pt.eps = ep;
                    pt.delta = dl;
                    pt.eta = et;
                    pt.sigma = sg;
                    pt.margin = margin;
                    out.push_back(pt);
                }

    auto eval_point = [&](SweepPoint& pt) {
        ConstraintSpec spec;
        spec.fairness = fairness;
        spec.eps = Rat::from_double(pt.eps);
        spec.delta.assign(static_cast<size_t>(Z), Rat::from_double(pt.delta));
        spec.eta.assign(static_cast<size_t>(Z), Rat::from_double(pt.eta));
        if (pt.sigma) spec.sigma = {Rat::from_double(*pt.sigma), Rat::from_double(*pt.sigma)};

        FeasibilityInputs in = inputs_from(stats, errors, spec);
        if (fairness == Fairness::DP) {
            if (pt.sigma) {
                // sufficient condition over ordered pairs
                bool ok = true;
                for (int hi = 0; hi < Z && ok; ++hi)
                    for (int lo = 0; lo < Z && ok; ++lo) {
                        if (hi == lo) continue;
                        if (in.tau[static_cast<size_t>(hi)] < in.tau[static_cast<size_t>(lo)]) continue;
                        ok = dp_equal_abstention_sufficient(in, hi, lo);
                    }
                pt.formula_feasible = ok;
            } else {
                pt.formula_feasible = dp_feasible(in).feasible;
            }
        } else {
            pt.formula_feasible = true;
        }

        IpSolution sol = solve(table, stats, errors, spec);
        pt.solver_status = sol.status;
        pt.objective = sol.objective;
        bool solver_ok = sol.status != SolveStatus::Infeasible;
        pt.disagree = solver_ok != pt.formula_feasible;
    };

    // independent solves, one grid point per task
    size_t workers = std::min<size_t>(out.size(), std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (auto& pt : out) eval_point(pt);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < workers; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= out.size()) return;
                eval_point(out[i]);
            }
        });
    for (auto& t : pool) t.join();
    return out;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    f << "eps,delta,eta,sigma,formula_feasible,solver_status,objective\n";
    f.precision(12);
    for (const auto& p : points) {
        f << p.eps << "," << p.delta << "," << p.eta << ",";
        if (p.sigma)
            f << *p.sigma;
        else
            f << "";
        f << "," << (p.formula_feasible ? 1 : 0) << "," << to_string(p.solver_status) << "," << p.objective
          << "\n";
    }
}

}  // namespace fan
