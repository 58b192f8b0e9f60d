#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "usma/sweep.hpp"

using namespace usma;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "usma_test_sweep";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t data_rows(const std::string& csv) {
    std::size_t n = 0;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) n += !line.empty() && line[0] != '#' && line.rfind("profile,", 0) != 0;
    return n;
}

const char* kPlan2x2 =
    "# two ka values by two Eb/N0 values\n"
    "profile = aiot-paper\n"
    "channel = rayleigh-2rx\n"
    "csi = ideal\n"
    "ka_list = 1, 5\n"
    "ebn0_list = 4, 8.5   # dB\n"
    "trials = 6\n"
    "min_trials = 6\n"
    "target_errors = 0\n"
    "seed = 42\n";

SweepPlan parse(const std::string& s) {
    std::istringstream in(s);
    return parse_plan(in);
}

}  // namespace

TEST_CASE("header names the columns in order") {
    const std::string h = csv_header();
    CHECK(h.rfind("# usma-sim ", 0) == 0);
    CHECK(h.find("Eb = (Pp*M + Pd*r*C)/B") != std::string::npos);
    CHECK(h.find("\nprofile,channel,csi,ka,ebn0_db,trials,user_errors,pupe,ci_lo,ci_hi,err_collision,"
                 "err_misdetect,err_decode,seed\n") != std::string::npos);
}

TEST_CASE("row format") {
    SweepRecord r;
    r.profile = "aiot-paper";
    r.channel = "rayleigh-2rx";
    r.csi = Csi::Estimated;
    r.ka = 15;
    r.ebn0_db = 7.25;
    r.trials = 10;
    r.user_errors = 3;
    r.pupe = 0.02;
    r.ci = {0.01, 0.05};
    r.err_collision = 1;
    r.err_misdetect = 1;
    r.err_decode = 1;
    r.seed = 9;
    CHECK(csv_row(r) == "aiot-paper,rayleigh-2rx,estimated,15,7.250,10,3,0.02000000,0.01000000,0.05000000,1,1,1,9\n");
}

TEST_CASE("plan parsing") {
    const auto plan = parse(kPlan2x2);
    CHECK(plan.profiles == std::vector<std::string>{"aiot-paper"});
    CHECK(plan.ka == std::vector<std::size_t>{1, 5});
    CHECK(plan.ebn0_db == std::vector<double>{4.0, 8.5});
    CHECK(plan.n_cells() == 4);
    CHECK(plan.seed == 42);
    CHECK(parse("").empty());
    CHECK(parse("# only a comment\n\n").n_cells() == 0);
}

TEST_CASE("malformed plans are rejected") {
    const std::string good = kPlan2x2;
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string s = good;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK_THROWS_AS(parse(replace("seed = 42", "")), ConfigError);
    CHECK_THROWS_AS(parse(good + "seed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse(good + "colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse(good + "just words\n"), ConfigError);
    CHECK_THROWS_AS(parse(replace("ka_list = 1, 5", "ka_list = 1, five")), ConfigError);
    CHECK_THROWS_AS(parse(replace("ka_list = 1, 5", "ka_list = -1")), ConfigError);
    CHECK_THROWS_AS(parse(replace("ebn0_list = 4, 8.5", "ebn0_list = 4dB")), ConfigError);
    CHECK_THROWS_AS(parse(replace("ebn0_list = 4, 8.5", "ebn0_list =")), ConfigError);
    CHECK_THROWS_AS(parse(replace("profile = aiot-paper", "profile = nope")), ConfigError);
    CHECK_THROWS_AS(parse(replace("channel = rayleigh-2rx", "channel = awgn")), ConfigError);
    CHECK_THROWS_AS(parse(replace("csi = ideal", "csi = perfect")), ConfigError);
    CHECK_THROWS_AS(parse(replace("trials = 6", "trials = 0")), ConfigError);
    CHECK_THROWS_AS(parse(replace("min_trials = 6", "min_trials = 7")), ConfigError);
    CHECK_THROWS_AS(load_plan(scratch("does_not_exist.plan").string()), ConfigError);
}

TEST_CASE("empty plan gives a header-only CSV") {
    const auto plan = scratch("empty.plan");
    const auto csv = scratch("empty.csv");
    write(plan, "# nothing to run\n");
    const auto records = sweep_to_csv(plan.string(), csv.string());
    CHECK(records.empty());
    CHECK(slurp(csv) == csv_header());
}

TEST_CASE("2x2 plan gives four rows, byte-identical on rerun and across workers") {
    const auto plan = scratch("grid.plan");
    write(plan, kPlan2x2);
    const auto a = scratch("grid_a.csv");
    const auto b = scratch("grid_b.csv");
    const auto records = sweep_to_csv(plan.string(), a.string(), {1, 16});
    sweep_to_csv(plan.string(), b.string(), {3, 2});
    REQUIRE(records.size() == 4);
    CHECK(data_rows(slurp(a)) == 4);
    CHECK(slurp(a) == slurp(b));
    CHECK(records[0].ka == 1);
    CHECK(records[1].ka == 1);
    CHECK(records[1].ebn0_db == 8.5);
    CHECK(records[2].ka == 5);
    for (const auto& r : records) {
        CHECK(r.trials == 6);
        CHECK(r.pupe == doctest::Approx(static_cast<double>(r.user_errors) / (6.0 * r.ka)));
        CHECK(r.user_errors == r.err_collision + r.err_misdetect + r.err_decode);
    }
}

TEST_CASE("plan channel overrides the profile channel") {
    const auto plan = parse(
        "profile = aiot-paper\nchannel = rayleigh-1rx\ncsi = ideal\nka_list = 2\nebn0_list = 10\n"
        "trials = 2\nmin_trials = 2\ntarget_errors = 0\nseed = 1\n");
    std::ostringstream out;
    const auto records = run_sweep(plan, out);
    REQUIRE(records.size() == 1);
    CHECK(records[0].channel == "rayleigh-1rx");
    CHECK(out.str().find("aiot-paper,rayleigh-1rx,ideal,2,10.000,2,") != std::string::npos);
}

TEST_CASE("unwritable output path throws") {
    const auto plan = scratch("grid2.plan");
    write(plan, kPlan2x2);
    CHECK_THROWS_AS(sweep_to_csv(plan.string(), "/nonexistent_dir/for/sure/out.csv"), std::runtime_error);
}
