#include "radopt/config.hpp"

#include "radopt/errors.hpp"
#include "radopt/expr.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace radopt {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config section \"" + section + "\": unknown key \"" + it.key() +
                              "\"");
}

const json& need(const json& obj, const std::string& section, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError("config section \"" + section + "\": missing required key \"" + key +
                          "\"");
    return *it;
}

double need_number(const json& obj, const std::string& section, const std::string& key) {
    const json& v = need(obj, section, key);
    if (!v.is_number())
        throw ConfigError("config key \"" + section + "." + key + "\" must be a number");
    return v.get<double>();
}

double opt_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number())
        throw ConfigError("config key \"" + section + "." + key + "\" must be a number");
    return it->get<double>();
}

std::string need_string(const json& obj, const std::string& section, const std::string& key) {
    const json& v = need(obj, section, key);
    if (!v.is_string())
        throw ConfigError("config key \"" + section + "." + key + "\" must be a string");
    return v.get<std::string>();
}

std::function<double(Point)> closure_of(const ExprPtr& e) {
    return [e](Point p) { return e->eval(p); };
}

} // namespace

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadedConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(root, "(root)",
                   {"domain", "diffusion", "velocity", "reaction", "time", "constraint",
                    "optimizer", "output"});

    LoadedConfig cfg;
    cfg.config_hash = fnv1a_hex(root.dump());

    // domain
    {
        const json& d = need(root, "(root)", "domain");
        reject_unknown(d, "domain", {"dim", "extents", "resolutions"});
        int dim = static_cast<int>(need_number(d, "domain", "dim"));
        const json& ext = need(d, "domain", "extents");
        const json& res = need(d, "domain", "resolutions");
        if (!ext.is_array() || !res.is_array())
            throw ConfigError("domain.extents and domain.resolutions must be arrays");
        std::vector<double> extents = ext.get<std::vector<double>>();
        std::vector<int> resolutions = res.get<std::vector<int>>();
        cfg.grid = build_grid(dim, extents, resolutions);
    }

    // diffusion
    {
        const json& d = need(root, "(root)", "diffusion");
        reject_unknown(d, "diffusion", {"kind", "sigma", "D_expr", "theta"});
        std::string kind = need_string(d, "diffusion", "kind");
        if (kind == "constant") {
            cfg.diffusion = constant_diffusion(need_number(d, "diffusion", "sigma"));
        } else if (kind == "variable") {
            ExprPtr D = parse_expression(need_string(d, "diffusion", "D_expr"));
            cfg.diffusion = variable_diffusion(closure_of(D), need_number(d, "diffusion", "theta"));
        } else {
            throw ConfigError("diffusion.kind must be \"constant\" or \"variable\"");
        }
    }

    // velocity
    {
        const json& v = need(root, "(root)", "velocity");
        reject_unknown(v, "velocity", {"q_expr", "amplitude_A", "boundary_policy"});
        const json& qe = need(v, "velocity", "q_expr");
        if (!qe.is_array() || qe.size() != static_cast<size_t>(cfg.grid.dim))
            throw ConfigError("velocity.q_expr must be an array with one expression per axis");
        ExprPtr qx = parse_expression(qe[0].get<std::string>());
        ExprPtr qy = cfg.grid.dim == 2 ? parse_expression(qe[1].get<std::string>()) : nullptr;
        // Analytic divergence via symbolic differentiation of the expressions.
        ExprPtr div = qx->derivative(0);
        if (qy) {
            ExprPtr dqy = qy->derivative(1);
            struct Sum final : Expr {
                ExprPtr a, b;
                Sum(ExprPtr x, ExprPtr y) : a(std::move(x)), b(std::move(y)) {}
                double eval(Point p) const override { return a->eval(p) + b->eval(p); }
                ExprPtr derivative(int axis) const override {
                    return std::make_shared<Sum>(a->derivative(axis), b->derivative(axis));
                }
                std::string to_string() const override {
                    return "(" + a->to_string() + "+" + b->to_string() + ")";
                }
            };
            div = std::make_shared<Sum>(div, dqy);
        }
        double A = need_number(v, "velocity", "amplitude_A");
        std::string policy = need_string(v, "velocity", "boundary_policy");
        BoundaryPolicy bp;
        if (policy == "require_tangential")
            bp = BoundaryPolicy::require_tangential;
        else if (policy == "allow_nonzero_normal")
            bp = BoundaryPolicy::allow_nonzero_normal;
        else
            throw ConfigError("velocity.boundary_policy must be \"require_tangential\" or "
                              "\"allow_nonzero_normal\"");
        cfg.velocity = make_velocity(cfg.grid, closure_of(qx),
                                     qy ? closure_of(qy) : std::function<double(Point)>{}, A, bp,
                                     closure_of(div));
    }

    // reaction
    {
        const json& r = need(root, "(root)", "reaction");
        reject_unknown(r, "reaction", {"name", "r_expr"});
        std::string name = need_string(r, "reaction", "name");
        if (name == "heterogeneous_logistic") {
            ExprPtr rate = parse_expression(need_string(r, "reaction", "r_expr"));
            // Sampled sup of r over cell and face centers gives the Lipschitz
            // bound; negative samples are rejected.
            double rmax = 0.0;
            const Grid& g = cfg.grid;
            auto visit = [&](Point p) {
                double val = rate->eval(p);
                if (val < 0.0)
                    throw ConfigError("reaction.r_expr must be nonnegative; got " +
                                      std::to_string(val));
                rmax = std::max(rmax, val);
            };
            for (int c = 0; c < g.cell_count(); ++c) visit(g.center_of(c));
            for (int iy = 0; iy < g.n[1]; ++iy)
                for (int fx = 0; fx <= g.n[0]; ++fx)
                    visit({fx * g.h[0], g.dim == 2 ? (iy + 0.5) * g.h[1] : 0.0});
            cfg.reaction = heterogeneous_logistic(closure_of(rate), rmax);
        } else {
            if (r.contains("r_expr"))
                throw ConfigError("reaction.r_expr only applies to heterogeneous_logistic");
            cfg.reaction = builtin_reaction(name);
        }
    }

    // time
    {
        const json& t = need(root, "(root)", "time");
        reject_unknown(t, "time", {"T", "dt_target", "checkpoint_every", "linear_tol"});
        cfg.solver.T = need_number(t, "time", "T");
        cfg.solver.dt_target = need_number(t, "time", "dt_target");
        cfg.solver.checkpoint_every =
            static_cast<int>(opt_number(t, "time", "checkpoint_every", 1));
        cfg.solver.linear_tol = opt_number(t, "time", "linear_tol", 1e-10);
        if (!(cfg.solver.T > 0.0)) throw ConfigError("time.T must be positive");
        if (!(cfg.solver.dt_target > 0.0)) throw ConfigError("time.dt_target must be positive");
        if (cfg.solver.checkpoint_every < 1)
            throw ConfigError("time.checkpoint_every must be >= 1");
        if (!(cfg.solver.linear_tol > 0.0)) throw ConfigError("time.linear_tol must be positive");
    }

    // constraint
    {
        const json& c = need(root, "(root)", "constraint");
        reject_unknown(c, "constraint", {"m"});
        cfg.mass_m = need_number(c, "constraint", "m");
        if (!(cfg.mass_m > 0.0) || cfg.mass_m > cfg.grid.total_volume * (1.0 + 1e-15))
            throw ConfigError("constraint.m must satisfy 0 < m <= |Omega|");
    }

    // optimizer (optional section; defaults otherwise)
    if (auto it = root.find("optimizer"); it != root.end()) {
        const json& o = *it;
        reject_unknown(o, "optimizer",
                       {"max_iters", "step0", "armijo_c", "backtrack_factor", "stop_tol",
                        "multistart_k", "seed"});
        cfg.opt.max_iters = static_cast<int>(opt_number(o, "optimizer", "max_iters", 500));
        cfg.opt.step0 = opt_number(o, "optimizer", "step0", 1.0);
        cfg.opt.armijo_c = opt_number(o, "optimizer", "armijo_c", 1e-4);
        cfg.opt.backtrack_factor = opt_number(o, "optimizer", "backtrack_factor", 0.5);
        cfg.opt.stop_tol = opt_number(o, "optimizer", "stop_tol", 1e-8);
        cfg.opt.multistart_k = static_cast<int>(opt_number(o, "optimizer", "multistart_k", 8));
        cfg.opt.seed = static_cast<uint64_t>(opt_number(o, "optimizer", "seed", 0));
        if (cfg.opt.max_iters < 1 || !(cfg.opt.step0 > 0.0) || !(cfg.opt.armijo_c > 0.0) ||
            !(cfg.opt.backtrack_factor > 0.0) || !(cfg.opt.backtrack_factor < 1.0) ||
            !(cfg.opt.stop_tol > 0.0) || cfg.opt.multistart_k < 2)
            throw ConfigError("optimizer settings out of range");
    }

    // output (optional)
    if (auto it = root.find("output"); it != root.end()) {
        const json& o = *it;
        reject_unknown(o, "output", {"dir", "snapshots"});
        if (o.contains("dir")) cfg.output_dir = need_string(o, "output", "dir");
        cfg.snapshots = static_cast<int>(opt_number(o, "output", "snapshots", 0));
        if (cfg.snapshots < 0) throw ConfigError("output.snapshots must be nonnegative");
    }

    return cfg;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

Scenario scenario_from_config(const LoadedConfig& cfg) {
    return make_scenario(cfg.grid, cfg.diffusion, cfg.velocity, cfg.reaction, cfg.solver,
                         cfg.mass_m);
}

} // namespace radopt
