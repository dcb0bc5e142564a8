#include "moe/serialize.hpp"

#include <fstream>
#include <json.hpp>

#include "moe/errors.hpp"

namespace moe {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.begin(), v.end());
}

Eigen::VectorXd vec_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json psi_to_json(const GatingParams& psi) {
    json comps = json::array();
    for (const auto& c : psi.comps) {
        comps.push_back({{"log_nu", c.log_nu},
                         {"mean", vec_to_json(c.mean)},
                         {"sd", vec_to_json(c.sd)}});
    }
    return comps;
}

GatingParams psi_from_json(const json& j) {
    GatingParams psi;
    for (const auto& c : j) {
        GatingParams::Component comp;
        comp.log_nu = c.at("log_nu").get<double>();
        comp.mean = vec_from_json(c.at("mean"));
        comp.sd = vec_from_json(c.at("sd"));
        psi.comps.push_back(std::move(comp));
    }
    return psi;
}

json ensemble_to_json(const InnerEnsemble& ens) {
    json members = json::array();
    for (const auto& member : ens.members) {
        json blocks = json::array();
        for (const auto& v : member) blocks.push_back(vec_to_json(v));
        members.push_back(std::move(blocks));
    }
    return {{"members", std::move(members)}, {"block_ll", ens.block_ll}};
}

InnerEnsemble ensemble_from_json(const json& j) {
    InnerEnsemble ens;
    for (const auto& member : j.at("members")) {
        std::vector<Eigen::VectorXd> blocks;
        for (const auto& v : member) blocks.push_back(vec_from_json(v));
        ens.members.push_back(std::move(blocks));
    }
    ens.block_ll = j.at("block_ll").get<std::vector<std::vector<double>>>();
    return ens;
}

json particle_to_json(const OuterParticle& p) {
    return {{"alloc", p.alloc},
            {"psi", psi_to_json(p.psi)},
            {"inner", ensemble_to_json(p.inner)},
            {"log_zhat", p.log_zhat},
            {"log_weight", p.log_weight}};
}

OuterParticle particle_from_json(const json& j) {
    OuterParticle p;
    p.alloc = j.at("alloc").get<Allocation>();
    p.psi = psi_from_json(j.at("psi"));
    p.inner = ensemble_from_json(j.at("inner"));
    p.log_zhat = j.at("log_zhat").get<double>();
    p.log_weight = j.at("log_weight").get<double>();
    return p;
}

json counters_to_json(const SlotCounters& c) {
    return {{"sweeps", c.inner.sweeps},
            {"proposals", c.inner.proposals},
            {"accepts", c.inner.accepts},
            {"support_skips", c.inner.support_skips},
            {"lik_evals", c.inner.lik_evals},
            {"ensemble_inits", c.inner.ensemble_inits},
            {"pmmh_proposals", c.pmmh_proposals},
            {"pmmh_accepts", c.pmmh_accepts},
            {"pmmh_support_rejects", c.pmmh_support_rejects}};
}

SlotCounters counters_from_json(const json& j) {
    SlotCounters c;
    c.inner.sweeps = j.at("sweeps").get<long long>();
    c.inner.proposals = j.at("proposals").get<long long>();
    c.inner.accepts = j.at("accepts").get<long long>();
    c.inner.support_skips = j.at("support_skips").get<long long>();
    c.inner.lik_evals = j.at("lik_evals").get<long long>();
    c.inner.ensemble_inits = j.at("ensemble_inits").get<long long>();
    c.pmmh_proposals = j.at("pmmh_proposals").get<long long>();
    c.pmmh_accepts = j.at("pmmh_accepts").get<long long>();
    c.pmmh_support_rejects = j.at("pmmh_support_rejects").get<long long>();
    return c;
}

json step_to_json(const TemperRecord& r) {
    return {{"t", r.t},
            {"kappa", r.kappa},
            {"ess_pre_resample", r.ess_pre_resample},
            {"ess_ratio", r.ess_ratio},
            {"outer_sweeps", r.outer_sweeps},
            {"inner_sweeps", r.inner_sweeps}};
}

TemperRecord step_from_json(const json& j) {
    TemperRecord r;
    r.t = j.at("t").get<int>();
    r.kappa = j.at("kappa").get<double>();
    r.ess_pre_resample = j.at("ess_pre_resample").get<double>();
    r.ess_ratio = j.at("ess_ratio").get<double>();
    r.outer_sweeps = j.at("outer_sweeps").get<int>();
    r.inner_sweeps = j.at("inner_sweeps").get<long long>();
    return r;
}

void write_json(const std::string& path, const json& j, const char* who) {
    std::ofstream out(path);
    if (!out) throw io_error(std::string(who) + ": cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw io_error(std::string(who) + ": write failed for " + path);
}

json read_json(const std::string& path, const char* who) {
    std::ifstream in(path);
    if (!in) throw io_error(std::string(who) + ": cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error(std::string(who) + ": " + e.what());
    }
    return j;
}

}  // namespace

void save_checkpoint(const std::string& path, const Smc2Checkpoint& cp) {
    json j;
    j["t"] = cp.t;
    j["seed"] = cp.seed;
    j["kappa_history"] = cp.kappa_history;
    j["particles"] = json::array();
    for (const auto& p : cp.particles) j["particles"].push_back(particle_to_json(p));
    j["counters"] = json::array();
    for (const auto& c : cp.counters) j["counters"].push_back(counters_to_json(c));
    j["steps"] = json::array();
    for (const auto& s : cp.steps) j["steps"].push_back(step_to_json(s));
    j["warnings"] = cp.warnings;
    write_json(path, j, "save_checkpoint");
}

Smc2Checkpoint load_checkpoint(const std::string& path) {
    const json j = read_json(path, "load_checkpoint");
    Smc2Checkpoint cp;
    try {
        cp.t = j.at("t").get<int>();
        cp.seed = j.at("seed").get<std::uint64_t>();
        cp.kappa_history = j.at("kappa_history").get<std::vector<double>>();
        for (const auto& p : j.at("particles")) cp.particles.push_back(particle_from_json(p));
        for (const auto& c : j.at("counters")) cp.counters.push_back(counters_from_json(c));
        for (const auto& s : j.at("steps")) cp.steps.push_back(step_from_json(s));
        cp.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw io_error("load_checkpoint: malformed checkpoint: " + std::string(e.what()));
    }
    return cp;
}

void save_posterior(const std::string& path, const PosteriorSample& sample) {
    json j;
    j["method"] = sample.method;
    j["kappa_history"] = sample.kappa_history;
    j["particles"] = json::array();
    for (const auto& p : sample.particles) j["particles"].push_back(particle_to_json(p));
    json diag;
    diag["steps"] = json::array();
    for (const auto& s : sample.diag.steps) diag["steps"].push_back(step_to_json(s));
    diag["lik_evals"] = sample.diag.lik_evals;
    diag["support_skips"] = sample.diag.support_skips;
    diag["inner_sweeps"] = sample.diag.inner_sweeps;
    diag["ensemble_inits"] = sample.diag.ensemble_inits;
    diag["pmmh_proposals"] = sample.diag.pmmh_proposals;
    diag["pmmh_accepts"] = sample.diag.pmmh_accepts;
    diag["pmmh_support_rejects"] = sample.diag.pmmh_support_rejects;
    diag["warnings"] = sample.diag.warnings;
    j["diag"] = std::move(diag);
    write_json(path, j, "save_posterior");
}

PosteriorSample load_posterior(const std::string& path) {
    const json j = read_json(path, "load_posterior");
    PosteriorSample s;
    try {
        s.method = j.at("method").get<std::string>();
        s.kappa_history = j.at("kappa_history").get<std::vector<double>>();
        for (const auto& p : j.at("particles")) s.particles.push_back(particle_from_json(p));
        const json& diag = j.at("diag");
        for (const auto& st : diag.at("steps")) s.diag.steps.push_back(step_from_json(st));
        s.diag.lik_evals = diag.at("lik_evals").get<long long>();
        s.diag.support_skips = diag.at("support_skips").get<long long>();
        s.diag.inner_sweeps = diag.at("inner_sweeps").get<long long>();
        s.diag.ensemble_inits = diag.at("ensemble_inits").get<long long>();
        s.diag.pmmh_proposals = diag.at("pmmh_proposals").get<long long>();
        s.diag.pmmh_accepts = diag.at("pmmh_accepts").get<long long>();
        s.diag.pmmh_support_rejects = diag.at("pmmh_support_rejects").get<long long>();
        s.diag.warnings = diag.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw io_error("load_posterior: malformed file: " + std::string(e.what()));
    }
    return s;
}

}  // namespace moe
