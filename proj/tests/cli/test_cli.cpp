// End-to-end checks of the mmlab binary: flag parsing, config handling, the
// exact output schemas, exit codes and reproducibility. Everything runs
// through the real executable (path baked in as MMLAB_BIN).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

using nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& scratch_dir() {
    static const std::string dir = [] {
        char tmpl[] = "/tmp/mmlab_cli_XXXXXX";
        const char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string scratch_file(const std::string& name) {
    return scratch_dir() + "/" + name;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string out_path = scratch_file("out." + std::to_string(counter));
    const std::string err_path = scratch_file("err." + std::to_string(counter));
    ++counter;
    const std::string cmd =
        std::string(MMLAB_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

// Set A style reference parameters as command-line flags.
const char* kRefFlags = "--k0 2500 --eT 10 --k1 1 --k2 500 --km1 500";

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

} // namespace

TEST_CASE("qualifiers reports every derived quantity for the reference set") {
    const CliResult r = run_cli(std::string("qualifiers ") + kRefFlags);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);

    CHECK(j.at("params").at("k0").get<double>() == 2500.0);
    CHECK(j.at("params").at("eT").get<double>() == 10.0);
    CHECK(j.at("params").at("omega").get<double>() == 1.0);
    CHECK(j.at("K_M").get<double>() == 1000.0);
    CHECK(j.at("K_S").get<double>() == 500.0);
    CHECK(j.at("v").get<double>() == 5000.0);
    CHECK(j.at("t_C").get<double>() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(j.at("t_S").get<double>() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(j.at("eps_ss").get<double>() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(j.at("alpha").get<double>() == 0.5);
    CHECK(j.at("beta").get<double>() == 1.0);
    CHECK(j.at("lambda").get<double>() == 0.5);
    CHECK(j.at("eps").get<double>() == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(j.at("gamma").get<double>() == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(j.at("nu").get<double>() == 5.0);
    CHECK(j.at("discrepancy").get<double>() ==
          doctest::Approx(0.14285714285714285).epsilon(1e-12));
    CHECK(j.at("classification").get<std::string>() == "near_invariance_only");
    CHECK(j.at("nearest_tfpv").get<std::string>() == "none");
}

TEST_CASE("qualifiers classifies the closed reaction as a resolvable sQSSA case") {
    const CliResult r = run_cli("qualifiers --k0 0 --eT 10 --k1 1 --k2 500 --km1 500");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("alpha").get<double>() == 0.0);
    CHECK(j.at("discrepancy").get<double>() == 0.0);
    CHECK(j.at("gamma").get<double>() == 0.0);
    CHECK(j.at("classification").get<std::string>() == "singular_perturbation_sqssa");
}

TEST_CASE("qualifiers exits 3 and names alpha when no stationary point exists") {
    const CliResult r = run_cli("qualifiers --k0 6000 --eT 10 --k1 1 --k2 500 --km1 500");
    CHECK(r.exit_code == 3);
    CHECK(r.out.empty());
    CHECK(r.err.find("alpha") != std::string::npos);
    CHECK(r.err.find("1.2") != std::string::npos);
}

TEST_CASE("qualifiers exits 3 on invalid rate constants") {
    const CliResult r = run_cli("qualifiers --k0 1 --eT 10 --k1 -1 --k2 500 --km1 500");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("k1") != std::string::npos);
}

TEST_CASE("parameters come from a config file and flags override it") {
    const std::string cfg = scratch_file("params.json");
    {
        std::ofstream out(cfg);
        out << R"({"k0": 100.0, "eT": 10.0, "k1": 1.0, "k2": 500.0,)"
            << R"( "km1": 500.0, "omega": 1.0})";
    }
    const CliResult base = run_cli("qualifiers --config " + cfg);
    REQUIRE(base.exit_code == 0);
    CHECK(json::parse(base.out).at("alpha").get<double>() == doctest::Approx(0.02));

    const CliResult overridden = run_cli("qualifiers --config " + cfg + " --k0 2500");
    REQUIRE(overridden.exit_code == 0);
    CHECK(json::parse(overridden.out).at("alpha").get<double>() == 0.5);
}

TEST_CASE("a config file missing a key is a usage error") {
    const std::string cfg = scratch_file("incomplete.json");
    {
        std::ofstream out(cfg);
        out << R"({"k0": 100.0, "eT": 10.0, "k1": 1.0, "k2": 500.0, "km1": 500.0})";
    }
    const CliResult r = run_cli("qualifiers --config " + cfg);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("omega") != std::string::npos);
}

TEST_CASE("a nonexistent config file is a usage error") {
    const CliResult r = run_cli("qualifiers --config /nonexistent/params.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("incomplete flag sets are a usage error mentioning the remedy") {
    const CliResult r = run_cli("qualifiers --k0 1 --eT 10");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--config") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands exit 2, help exits 0") {
    CHECK(run_cli("qualifiers --frobnicate 1").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("lna --help").exit_code == 0);
}

TEST_CASE("lna emits the pinned keys with consistent values") {
    const CliResult r = run_cli(std::string("lna ") + kRefFlags);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.size() == 4);
    CHECK(j.at("sigma2_full").get<double>() ==
          doctest::Approx(1748.1296758104738).epsilon(1e-12));
    CHECK(j.at("sigma2_red").get<double>() == 2000.0);
    CHECK(j.at("sigma2_lyapunov").get<double>() ==
          doctest::Approx(j.at("sigma2_full").get<double>()).epsilon(1e-10));
    CHECK(j.at("discrepancy").get<double>() ==
          doctest::Approx(0.14285714285714285).epsilon(1e-12));
}

TEST_CASE("lna respects --out") {
    const std::string path = scratch_file("lna.json");
    const CliResult r = run_cli(std::string("lna ") + kRefFlags + " --out " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    const json j = json::parse(slurp(path));
    CHECK(j.at("sigma2_red").get<double>() == 2000.0);
    std::remove(path.c_str());
}

TEST_CASE("an unwritable --out path is a usage error") {
    const CliResult r =
        run_cli(std::string("lna ") + kRefFlags + " --out /nonexistent/dir/x.json");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cannot open output file") != std::string::npos);
}

TEST_CASE("ode drives the full field from the origin to the stationary point") {
    const std::string path = scratch_file("ode.csv");
    const CliResult r = run_cli(std::string("ode ") + kRefFlags +
                                " --kind full --t-end 12 --step 1e-4 --out " + path);
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = csv_lines(slurp(path));
    std::remove(path.c_str());
    REQUIRE(lines.size() >= 2);
    CHECK(lines.front() == "t,s,c");
    const std::vector<std::string> last = csv_fields(lines.back());
    REQUIRE(last.size() == 3);
    CHECK(std::stod(last[0]) == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(std::stod(last[1]) == doctest::Approx(1000.0).epsilon(1e-6));
    CHECK(std::stod(last[2]) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("ode --with-product appends the product column") {
    const CliResult r = run_cli(std::string("ode ") + kRefFlags +
                                " --kind sqssa --s0 1000 --t-end 0.01 --step 1e-3 "
                                "--with-product");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = csv_lines(r.out);
    REQUIRE(lines.size() == 12);
    CHECK(lines.front() == "t,s,c,p");
    // Stationary substrate: p grows at k2*nu = 2500 per time unit.
    const std::vector<std::string> last = csv_fields(lines.back());
    REQUIRE(last.size() == 4);
    CHECK(std::stod(last[1]) == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(std::stod(last[3]) == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("ode usage errors: unknown kind and missing horizon") {
    CHECK(run_cli(std::string("ode ") + kRefFlags + " --kind nonsense --t-end 1")
              .exit_code == 2);
    CHECK(run_cli(std::string("ode ") + kRefFlags).exit_code == 2);
}

TEST_CASE("ode reports divergence as a domain error") {
    // The linear relaxation rate v/K_M = 5 with step 2 puts the classic
    // Runge-Kutta stability polynomial at about 290 per step, so the state
    // goes non-finite well inside the horizon.
    const CliResult r = run_cli("ode --k0 0 --eT 10 --k1 1 --k2 500 --km1 500 "
                                "--kind linear-sqssa --s0 1000 --t-end 400 --step 2");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("simulate samples a trajectory on the requested grid") {
    const std::string args = std::string("simulate ") + kRefFlags +
                             " --network reduced --seed 11 --t-end 1 --sample-dt 0.1";
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = csv_lines(r.out);
    REQUIRE(lines.size() == 12);
    CHECK(lines.front() == "t,n_S,n_C,n_P");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> f = csv_fields(lines[i]);
        REQUIRE(f.size() == 4);
        CHECK(std::stod(f[0]) ==
              doctest::Approx(0.1 * static_cast<double>(i - 1)).epsilon(1e-12));
        CHECK(f[2] == "0"); // the reduced network never populates the complex
    }

    const CliResult again = run_cli(args);
    CHECK(again.out == r.out);
    const CliResult other = run_cli(std::string("simulate ") + kRefFlags +
                                    " --network reduced --seed 12 --t-end 1 "
                                    "--sample-dt 0.1");
    CHECK(other.out != r.out);
}

TEST_CASE("simulate starts from explicit counts when given") {
    const CliResult r = run_cli(std::string("simulate ") + kRefFlags +
                                " --network full --seed 5 --t-end 1e-9 --sample-dt 1 "
                                "--ns0 7 --nc0 3 --np0 2");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = csv_lines(r.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[1] == "0,7,3,2");
}

TEST_CASE("simulate flags the absorbed closed reaction on stderr") {
    const CliResult r = run_cli("simulate --k0 0 --eT 10 --k1 1 --k2 500 --km1 500 "
                                "--network full --t-end 1 --sample-dt 0.5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("absorbed") != std::string::npos);
    // k0 = 0 puts the stationary state at the origin, which is absorbing.
    const std::vector<std::string> lines = csv_lines(r.out);
    REQUIRE(lines.size() == 4);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> f = csv_fields(lines[i]);
        CHECK(f[1] == "0");
        CHECK(f[2] == "0");
        CHECK(f[3] == "0");
    }
}

TEST_CASE("simulate --moments emits the pinned estimator schema") {
    const CliResult r = run_cli(std::string("simulate ") + kRefFlags +
                                " --network full --moments --budget 400000 --seed 7");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.size() == 8);
    CHECK(j.at("events").get<std::uint64_t>() == 400000);
    CHECK(j.at("seed").get<std::uint64_t>() == 7);
    CHECK(j.at("burn_in").get<double>() ==
          doctest::Approx(20.0 / 1.2476591787662641).epsilon(1e-12));
    CHECK(j.at("mean").get<double>() == doctest::Approx(1000.0).epsilon(0.05));
    CHECK(j.at("variance").get<double>() > 0.0);
    CHECK(j.at("std").get<double>() ==
          doctest::Approx(std::sqrt(j.at("variance").get<double>())).epsilon(1e-12));
    CHECK(j.at("se_mean").get<double>() > 0.0);
    CHECK(j.at("se_variance").get<double>() > 0.0);
}

TEST_CASE("simulate --quick shrinks the default budget but respects --budget") {
    const CliResult quick = run_cli(std::string("simulate ") + kRefFlags +
                                    " --network reduced --moments --quick --seed 3");
    REQUIRE(quick.exit_code == 0);
    CHECK(json::parse(quick.out).at("events").get<std::uint64_t>() == 1000000);

    const CliResult both = run_cli(std::string("simulate ") + kRefFlags +
                                   " --network reduced --moments --quick "
                                   "--budget 250000 --seed 3");
    REQUIRE(both.exit_code == 0);
    CHECK(json::parse(both.out).at("events").get<std::uint64_t>() == 250000);
}

TEST_CASE("simulate --moments exits 3 when the budget cannot cover burn-in") {
    const CliResult r = run_cli(std::string("simulate ") + kRefFlags +
                                " --network full --moments --budget 100 --seed 1");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("simulate replica ensembles are worker-count invariant") {
    const std::string base = std::string("simulate ") + kRefFlags +
                             " --network full --moments --replicas 48 --seed 21 "
                             "--burn-in-time 1 --workers ";
    const CliResult one = run_cli(base + "1");
    const CliResult four = run_cli(base + "4");
    REQUIRE(one.exit_code == 0);
    REQUIRE(four.exit_code == 0);
    CHECK(one.out == four.out);
}

TEST_CASE("simulate usage errors") {
    CHECK(run_cli(std::string("simulate ") + kRefFlags + " --network sideways --t-end 1")
              .exit_code == 2);
    CHECK(run_cli(std::string("simulate ") + kRefFlags).exit_code == 2); // no --t-end
}

TEST_CASE("sweep-beta --quick writes the pinned schema deterministically") {
    const std::string args = "sweep-beta --betas 1 100 --quick --seed 3 --workers 2";
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = csv_lines(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines.front() ==
          "beta,mu_full,se_mu_full,sigma_full_ssa,sigma_red_ssa,sigma_full_lna,"
          "sigma_red_lna,discrepancy_eq14,seed");

    const std::vector<std::string> row1 = csv_fields(lines[1]);
    const std::vector<std::string> row100 = csv_fields(lines[2]);
    REQUIRE(row1.size() == 9);
    REQUIRE(row100.size() == 9);
    CHECK(std::stod(row1[0]) == 1.0);
    CHECK(std::stod(row100[0]) == 100.0);

    // beta = 1 with the default alpha is the reference set.
    CHECK(std::stod(row1[5]) ==
          doctest::Approx(std::sqrt(1748.1296758104738)).epsilon(1e-12));
    CHECK(std::stod(row1[6]) == doctest::Approx(std::sqrt(2000.0)).epsilon(1e-12));
    CHECK(std::stod(row1[7]) == doctest::Approx(0.14285714285714285).epsilon(1e-12));
    CHECK(std::stod(row100[7]) == doctest::Approx(25.0 / 76.0).epsilon(1e-12));

    // Loose sanity on the stochastic columns; statistical accuracy is the
    // acceptance suite's business.
    CHECK(std::stod(row1[1]) == doctest::Approx(1000.0).epsilon(0.05));
    CHECK(std::stod(row100[1]) == doctest::Approx(1000.0).epsilon(0.05));
    CHECK(std::stod(row1[3]) > 0.0);
    CHECK(std::stod(row1[4]) > 0.0);

    const CliResult again = run_cli(args);
    CHECK(again.out == r.out);
    const CliResult serial = run_cli("sweep-beta --betas 1 100 --quick --seed 3 "
                                     "--workers 1");
    CHECK(serial.out == r.out);
}

TEST_CASE("sweep-beta --quick cannot afford the smallest beta and says so") {
    // At beta = 0.01 the slow relaxation stretches so far that the 1e6-event
    // quick budget is exhausted inside the burn-in window.
    const CliResult r = run_cli("sweep-beta --betas 0.01 --quick --seed 3");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("burn-in") != std::string::npos);
}

TEST_CASE("project reproduces the worked sQSSA projector") {
    const CliResult r = run_cli(std::string("project ") + kRefFlags +
                                " --tfpv pi1 --coords 1000");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("tfpv").get<std::string>() == "pi1");
    REQUIRE(j.at("points").size() == 1);
    const json& pt = j.at("points")[0];
    CHECK(pt.at("point").at("s").get<double>() == 1000.0);
    CHECK(pt.at("point").at("c").get<double>() == 0.0);
    CHECK(pt.at("pi")[0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pt.at("pi")[0][1].get<double>() == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(pt.at("pi")[1][0].get<double>() == 0.0);
    CHECK(pt.at("pi")[1][1].get<double>() == 0.0);
    CHECK(pt.at("dfp").get<double>() == doctest::Approx(-2000.0).epsilon(1e-14));
    CHECK(pt.at("attracting").get<bool>());
    // At the stationary substrate level the reduced flow vanishes.
    CHECK(pt.at("reduced_field")[0].get<double>() == doctest::Approx(0.0).scale(5000));
    CHECK(pt.at("reduced_field")[1].get<double>() == 0.0);
}

TEST_CASE("project pi3 evaluates the QEA slow flow tangent to its manifold") {
    const CliResult r = run_cli(std::string("project ") + kRefFlags +
                                " --tfpv pi3 --coords 1000");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    const json& pt = j.at("points")[0];
    // Manifold point: c = eT*s/(K_S + s).
    CHECK(pt.at("point").at("c").get<double>() ==
          doctest::Approx(10.0 * 1000.0 / 1500.0).epsilon(1e-14));
    const double ds = pt.at("reduced_field")[0].get<double>();
    const double dc = pt.at("reduced_field")[1].get<double>();
    CHECK(ds == doctest::Approx(-831.48558758314857).epsilon(1e-12));
    // Tangency: dc/ds = eT*K_S/(K_S+s)^2 = 1/450 at s = 1000.
    CHECK(dc == doctest::Approx(ds / 450.0).epsilon(1e-12));
}

TEST_CASE("project reverse-closed forces the closed reaction and bounds c") {
    const CliResult r = run_cli(std::string("project ") + kRefFlags +
                                " --tfpv reverse-closed --coords 2 9.4");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("params").at("k0").get<double>() == 0.0);
    CHECK(j.at("delta").get<double>() == doctest::Approx(0.5).epsilon(1e-14));
    REQUIRE(j.at("points").size() == 2);
    const json& pt = j.at("points")[0];
    CHECK(pt.at("point").at("s").get<double>() == 0.0);
    CHECK(pt.at("point").at("c").get<double>() == 2.0);
    CHECK(pt.at("pi")[1][0].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pt.at("pi")[1][1].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pt.at("reduced_field")[0].get<double>() == 0.0);
    CHECK(pt.at("reduced_field")[1].get<double>() ==
          doctest::Approx(-1000.0).epsilon(1e-14));

    const CliResult off = run_cli(std::string("project ") + kRefFlags +
                                  " --tfpv reverse-closed --coords 9.9");
    CHECK(off.exit_code == 3);
    CHECK(off.err.find("manifold") != std::string::npos);
}

TEST_CASE("project usage errors: bad tag and missing coordinates") {
    CHECK(run_cli(std::string("project ") + kRefFlags + " --tfpv pi9 --coords 1")
              .exit_code == 2);
    CHECK(run_cli(std::string("project ") + kRefFlags + " --tfpv pi1").exit_code == 2);
}
