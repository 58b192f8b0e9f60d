#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "usma/aiot.hpp"
#include "usma/cs_preamble.hpp"
#include "usma/harness.hpp"
#include "usma/sweep.hpp"

namespace {

struct PointArgs {
    std::string profile = "aiot-paper";
    std::string channel;
    std::size_t ka = 5;
    double ebn0 = 6.0;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::string csi = "ideal";
    std::string out;
    unsigned workers = 1;
};

void add_point_flags(CLI::App* cmd, PointArgs& a) {
    cmd->add_option("--profile", a.profile, "built-in profile")->capture_default_str();
    cmd->add_option("--channel", a.channel, "override channel: gmac | rayleigh-<n>rx");
    cmd->add_option("--ka", a.ka, "active users")->capture_default_str();
    cmd->add_option("--trials", a.trials, "trials (maximum for adaptive runs)")->capture_default_str();
    cmd->add_option("--seed", a.seed, "base seed")->capture_default_str();
    cmd->add_option("--csi", a.csi, "ideal | estimated")->capture_default_str();
    cmd->add_option("--out", a.out, "CSV output path (stdout if empty)");
    cmd->add_option("--workers", a.workers, "worker threads (0: hardware)")->capture_default_str();
}

usma::SystemProfile load_profile(const PointArgs& a) {
    auto p = usma::make_profile(a.profile);
    if (!a.channel.empty()) p.channel = usma::ChannelModel::parse(a.channel);
    p.validate();
    return p;
}

unsigned resolve_workers(unsigned w) { return w == 0 ? std::max(1u, std::thread::hardware_concurrency()) : w; }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsourced sparse multiple access link-level simulator"};
    app.require_subcommand(1);

    PointArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "estimate the per-user error rate at one point");
    add_point_flags(simulate, sim_args);
    simulate->add_option("--ebn0", sim_args.ebn0, "Eb/N0 in dB")->capture_default_str();

    std::string plan_path, sweep_out;
    unsigned sweep_workers = 1;
    auto* sweep = app.add_subcommand("sweep", "run a plan file and write CSV");
    sweep->add_option("plan", plan_path, "plan file")->required();
    sweep->add_option("--out", sweep_out, "CSV output path")->required();
    sweep->add_option("--workers", sweep_workers, "worker threads (0: hardware)")->capture_default_str();

    PointArgs req_args;
    std::string metric = "no-collision";
    usma::SearchOptions search;
    std::size_t min_trials = 20, target_errors = 200;
    req_args.trials = 10000;
    auto* required = app.add_subcommand("required-ebn0", "bisect for the Eb/N0 meeting a target error rate");
    add_point_flags(required, req_args);
    required->add_option("--metric", metric, "all | no-collision")->capture_default_str();
    required->add_option("--target", search.target, "target error rate")->capture_default_str();
    required->add_option("--tolerance", search.tolerance_db, "bracket width in dB")->capture_default_str();
    required->add_option("--lo", search.lo_db, "lower bracket end (dB)")->capture_default_str();
    required->add_option("--hi", search.hi_db, "upper bracket end (dB)")->capture_default_str();
    required->add_option("--min-trials", min_trials)->capture_default_str();
    required->add_option("--target-errors", target_errors)->capture_default_str();

    std::string analytics_out;
    std::size_t n_mc = 200000;
    auto* analytics = app.add_subcommand("analytics", "collision and RFID slotted-ALOHA arithmetic");
    analytics->add_option("--out", analytics_out, "CSV output path");
    analytics->add_option("--mc", n_mc, "Monte Carlo frames for the slot overflow estimate")->capture_default_str();
    analytics->add_option("--seed", sim_args.seed, "Monte Carlo seed")->capture_default_str();

    auto* profiles = app.add_subcommand("profiles", "list built-in profiles");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            const usma::Simulator sim(load_profile(sim_args));
            const usma::RunOptions run{resolve_workers(sim_args.workers)};
            const auto rec = usma::estimate_pupe(sim, sim_args.ka, sim_args.ebn0, usma::parse_csi(sim_args.csi),
                                                 usma::TrialBudget::fixed(sim_args.trials), sim_args.seed, run);
            write_text(sim_args.out, usma::csv_header() + usma::csv_row(rec));
            if (!sim_args.out.empty()) std::cout << usma::csv_row(rec);
        } else if (*sweep) {
            const auto recs = usma::sweep_to_csv(plan_path, sweep_out, {resolve_workers(sweep_workers)});
            std::cerr << recs.size() << " rows written to " << sweep_out << "\n";
        } else if (*required) {
            const usma::Simulator sim(load_profile(req_args));
            usma::RequiredEbn0Options opts;
            opts.search = search;
            opts.metric = usma::parse_metric(metric);
            opts.max_trials = req_args.trials;
            opts.min_trials = min_trials;
            opts.target_errors = target_errors;
            opts.seed = req_args.seed;
            opts.run.workers = resolve_workers(req_args.workers);
            const auto res = usma::required_ebn0(sim, req_args.ka, usma::parse_csi(req_args.csi), opts);
            std::string csv = usma::csv_header();
            for (const auto& r : res.records) csv += usma::csv_row(r);
            write_text(req_args.out, csv);
            if (res.search.ebn0_db) {
                std::printf("required Eb/N0 (%s, target %.3f): %.3f dB\n", metric.c_str(), search.target,
                            *res.search.ebn0_db);
            } else {
                std::printf("search failed: %s\n", res.search.message.c_str());
                return 2;
            }
        } else if (*analytics) {
            std::printf("Collision probability 1 - (1 - 1/N)^(K-1)\n");
            std::string csv = "quantity,value\n";
            const std::pair<std::size_t, std::size_t> cases[] = {{8192, 300}, {8192, 1500}, {256, 15}, {256, 5}};
            for (auto [n, k] : cases) {
                const double pc = usma::collision_probability(n, k);
                std::printf("  N = %5zu  K = %5zu  %.4f%%\n", n, k, 100.0 * pc);
                char row[96];
                std::snprintf(row, sizeof row, "collision_%zu_%zu,%.6g\n", n, k, pc);
                csv += row;
            }
            const auto report = usma::aiot::efficiency_report(n_mc, sim_args.seed);
            std::cout << usma::aiot::format_report(report);
            const auto rest = usma::aiot::report_csv(report);
            csv += rest.substr(rest.find('\n') + 1);
            if (!analytics_out.empty()) write_text(analytics_out, csv);
        } else if (*profiles) {
            for (const auto& name : usma::builtin_profile_names()) {
                const auto p = usma::make_profile(name);
                std::printf("%-12s B=%d L=%d N=%zu M=%zu r=%d M_d=%zu rho=%.2fdB channel=%s\n", name.c_str(),
                            p.packet_bits, p.id_bits, p.n_columns, p.preamble_len, p.repetition, p.data_chips,
                            p.power_ratio_db, p.channel.label().c_str());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
