#include "usma/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace usma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError("plan: bad value '" + s + "' for " + key);
    return value;
}

double parse_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("plan: bad value '" + s + "' for " + key);
    return v;
}

const std::vector<std::string> kKeys = {"profile", "channel",    "csi",           "ka_list", "ebn0_list",
                                        "trials",  "min_trials", "target_errors", "seed"};

}  // namespace

std::size_t SweepPlan::n_cells() const {
    return profiles.size() * channels.size() * csi.size() * ka.size() * ebn0_db.size();
}

SweepPlan parse_plan(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("plan line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ConfigError("plan line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
            throw ConfigError("plan line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    SweepPlan plan;
    if (kv.empty()) return plan;
    for (const auto& k : kKeys) {
        if (!kv.count(k)) throw ConfigError("plan: missing key '" + k + "'");
    }
    auto nonempty = [&](const std::string& key) {
        auto items = split_list(kv[key]);
        if (items.empty()) throw ConfigError("plan: empty list for " + key);
        return items;
    };
    plan.profiles = nonempty("profile");
    for (const auto& p : plan.profiles) make_profile(p);
    plan.channels = nonempty("channel");
    for (const auto& c : plan.channels) ChannelModel::parse(c);
    for (const auto& c : nonempty("csi")) plan.csi.push_back(parse_csi(c));
    for (const auto& k : nonempty("ka_list")) plan.ka.push_back(parse_number<std::size_t>("ka_list", k));
    for (const auto& e : nonempty("ebn0_list")) plan.ebn0_db.push_back(parse_double("ebn0_list", e));
    plan.trials = parse_number<std::size_t>("trials", kv["trials"]);
    plan.min_trials = parse_number<std::size_t>("min_trials", kv["min_trials"]);
    plan.target_errors = parse_number<std::size_t>("target_errors", kv["target_errors"]);
    plan.seed = parse_number<std::uint64_t>("seed", kv["seed"]);
    if (plan.trials == 0) throw ConfigError("plan: trials must be >= 1");
    if (plan.min_trials > plan.trials) throw ConfigError("plan: min_trials exceeds trials");
    return plan;
}

SweepPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read plan '" + path + "'");
    return parse_plan(in);
}

std::string csv_header() {
    std::string h = "# usma-sim ";
    h += kSoftwareVersion;
    h += "; energy: Eb = (Pp*M + Pd*r*C)/B, preamble included; noise CN(0,N0) per sample; "
         "pupe = user_errors/(trials*ka)\n";
    h += "profile,channel,csi,ka,ebn0_db,trials,user_errors,pupe,ci_lo,ci_hi,err_collision,err_misdetect,err_decode,seed\n";
    return h;
}

std::string csv_row(const SweepRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%zu,%.3f,%zu,%zu,%.8f,%.8f,%.8f,%zu,%zu,%zu,%llu\n", r.profile.c_str(),
                  r.channel.c_str(), to_string(r.csi), r.ka, r.ebn0_db, r.trials, r.user_errors, r.pupe, r.ci.lo,
                  r.ci.hi, r.err_collision, r.err_misdetect, r.err_decode, static_cast<unsigned long long>(r.seed));
    return buf;
}

std::vector<SweepRecord> run_sweep(const SweepPlan& plan, std::ostream& out, const RunOptions& run) {
    std::vector<SweepRecord> records;
    out << csv_header() << std::flush;
    TrialBudget budget;
    budget.max_trials = plan.trials;
    budget.min_trials = plan.min_trials;
    budget.target_errors = plan.target_errors;
    for (const auto& name : plan.profiles) {
        for (const auto& channel : plan.channels) {
            SystemProfile profile = make_profile(name);
            profile.channel = ChannelModel::parse(channel);
            const Simulator sim(profile);
            for (auto csi : plan.csi) {
                for (auto ka : plan.ka) {
                    for (auto ebn0 : plan.ebn0_db) {
                        records.push_back(estimate_pupe(sim, ka, ebn0, csi, budget, plan.seed, run));
                        out << csv_row(records.back()) << std::flush;
                    }
                }
            }
        }
    }
    return records;
}

std::vector<SweepRecord> sweep_to_csv(const std::string& plan_path, const std::string& csv_path,
                                      const RunOptions& run) {
    const SweepPlan plan = load_plan(plan_path);
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + csv_path + "'");
    auto records = run_sweep(plan, out, run);
    if (!out) throw std::runtime_error("write failed for '" + csv_path + "'");
    return records;
}

}  // namespace usma
