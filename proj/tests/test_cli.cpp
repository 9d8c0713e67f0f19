#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qei/genfun_json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "qei_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QEI_CLI_PATH) + " " + args + " > " +
                            (scratch_dir() / "stdout.txt").string() + " 2> " +
                            (scratch_dir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("cli bound reports the switching-energy chain") {
    const auto out = scratch_dir() / "bound.json";
    REQUIRE(run_cli("bound --ts 1 --out " + out.string()) == 0);
    const auto j = ordered_json::parse(slurp(out));
    CHECK(j.at("bound_total").get<double>() ==
          doctest::Approx(0.05305164769729845).epsilon(1e-12));
    CHECK(j.at("bound_per_pol").get<double>() ==
          doctest::Approx(0.026525823848649224).epsilon(1e-12));
    CHECK(j.at("witness").at("x_f").get<double>() == 1.0);
    CHECK(j.at("en_independence_max_rel_dev").get<double>() < 1e-12);
    REQUIRE(j.at("steps").size() == 4);
    CHECK(j.at("steps")[0].at("name") == "maximize-abs-xi");

    REQUIRE(run_cli("bound --ts 1 --pol 1 --out " + out.string()) == 0);
    const auto j1 = ordered_json::parse(slurp(out));
    CHECK(j1.at("bound_total").get<double>() ==
          doctest::Approx(0.026525823848649224).epsilon(1e-12));

    CHECK(run_cli("bound --ts 0") == 2);
    CHECK(run_cli("bound --ts -2") == 2);
    CHECK(run_cli("bound") == 2); // missing required flag
}

TEST_CASE("cli flux samples a profile and writes the delta sidecar") {
    const auto cfg = scratch_dir() / "identity.json";
    spit(cfg, qei::to_json(qei::make_identity()).dump());
    const auto out = scratch_dir() / "flux.csv";
    REQUIRE(run_cli("flux --config " + cfg.string() + " --xmin -1 --xmax 1 --samples 201 --out " +
                    out.string()) == 0);

    const auto csv = slurp(out);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,density");
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::stod(line.substr(comma + 1)) == 0.0);
        ++rows;
    }
    CHECK(rows == 201);

    const auto side = ordered_json::parse(slurp(scratch_dir() / "flux.deltas.json"));
    CHECK(side.at("deltas").empty());
}

TEST_CASE("cli flux: shock deltas land in the sidecar") {
    const auto cfg = scratch_dir() / "shock.json";
    spit(cfg, qei::to_json(qei::make_shock({0.01, 0.0, 1.0, 1.0})).dump());
    const auto out = scratch_dir() / "shock.csv";
    REQUIRE(run_cli("flux --config " + cfg.string() + " --out " + out.string()) == 0);

    const auto side = ordered_json::parse(slurp(scratch_dir() / "shock.deltas.json"));
    REQUIRE(side.at("deltas").size() == 2);
    CHECK(side.at("deltas")[0][0].get<double>() == 0.0);
    CHECK(side.at("deltas")[0][1].get<double>() == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(side.at("deltas")[1][0].get<double>() == 1.0);
    CHECK(side.at("deltas")[1][1].get<double>() ==
          doctest::Approx(0.016051135538890168).epsilon(1e-12));

    // density column is identically zero away from the deltas
    std::istringstream lines(slurp(out));
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line))
        CHECK(std::abs(std::stod(line.substr(line.find(',') + 1))) < 1e-12);
}

TEST_CASE("cli flux json format emits one document") {
    const auto cfg = scratch_dir() / "shock2.json";
    spit(cfg, qei::to_json(qei::make_shock({0.01, 0.0, 1.0, 1.0})).dump());
    REQUIRE(run_cli("flux --config " + cfg.string() + " --format json --samples 11 --hbar 2") == 0);
    const auto j = ordered_json::parse(slurp(scratch_dir() / "stdout.txt"));
    CHECK(j.at("hbar").get<double>() == 2.0);
    CHECK(j.at("samples").size() == 11);
    REQUIRE(j.at("deltas").size() == 2);
    // hbar override doubles the delta weights
    CHECK(j.at("deltas")[0][1].get<double>() == doctest::Approx(-0.01 * 2.0).epsilon(1e-12));
}

TEST_CASE("cli flux rejections leave no partial output") {
    const auto cfg = scratch_dir() / "broken.json";
    spit(cfg, "{this is not json");
    const auto out = scratch_dir() / "broken.csv";
    CHECK(run_cli("flux --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK(!fs::exists(out));

    // structurally valid JSON but a non-monotone profile
    spit(cfg, R"({"segments":[{"interval":[null,0.0],"form":"affine","coeffs":[0.0,1.0]},
                              {"interval":[0.0,null],"form":"affine","coeffs":[0.5,1.0]}],
                  "kinks":[0.0],"hbar":1.0})");
    CHECK(run_cli("flux --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK(!fs::exists(out));
}

TEST_CASE("cli verify: exit codes and report shape") {
    const auto out = scratch_dir() / "conformal.json";
    REQUIRE(run_cli("verify --suite conformal --seed 42 --out " + out.string()) == 0);
    const auto j = ordered_json::parse(slurp(out));
    CHECK(j.at("suite") == "conformal");
    CHECK(j.at("seed") == 42);
    CHECK(j.at("all_pass").get<bool>());
    for (const auto& c : j.at("checks")) CHECK(c.at("pass").get<bool>());

    CHECK(run_cli("verify --suite nope") == 2);
}

TEST_CASE("cli verify exports the oracle comparison table as csv") {
    const auto out = scratch_dir() / "oracle.csv";
    REQUIRE(run_cli("verify --suite oracle --seed 1 --format csv --out " + out.string()) == 0);
    std::istringstream lines(slurp(out));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "x,analytic_flux,oracle_flux,rel_err,offsets_used");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows >= 12); // >= 3 generators x 4 sample points
}

TEST_CASE("cli verify and sweep are byte-deterministic") {
    const auto a = scratch_dir() / "det_a.json";
    const auto b = scratch_dir() / "det_b.json";
    REQUIRE(run_cli("verify --suite chain --seed 7 --out " + a.string()) == 0);
    REQUIRE(run_cli("verify --suite chain --seed 7 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));

    const auto cfg = scratch_dir() / "sweep_det.json";
    spit(cfg, R"({"command":"bound","parameter":"t_s","values":[0.1,1.0,10.0]})");
    const auto sa = scratch_dir() / "sweep_a.csv";
    const auto sb = scratch_dir() / "sweep_b.csv";
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --seed 3 --out " + sa.string()) == 0);
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --seed 3 --out " + sb.string()) == 0);
    CHECK(slurp(sa) == slurp(sb));
}

TEST_CASE("cli sweep: bound scales inversely with the switching time") {
    const auto cfg = scratch_dir() / "sweep_bound.json";
    spit(cfg, R"({"command":"bound","parameter":"t_s","log_range":{"from":0.1,"to":10.0,"count":3}})");
    const auto out = scratch_dir() / "sweep_bound.csv";
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out " + out.string()) == 0);

    std::istringstream lines(slurp(out));
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("bound_total") != std::string::npos);
    CHECK(header.find("wall_time") == std::string::npos); // timings are opt-in

    std::vector<double> ts, bound;
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            else if (c == ',' && !quoted) { cells.push_back(cell); cell.clear(); }
            else cell += c;
        }
        cells.push_back(cell);
        REQUIRE(cells.size() >= 7);
        CHECK(cells[3] == "ok");
        ts.push_back(std::stod(cells[2]));
        bound.push_back(std::stod(cells[6]));
    }
    REQUIRE(ts.size() == 3);
    CHECK(ts[0] == doctest::Approx(0.1));
    CHECK(bound[0] == doctest::Approx(10.0 * bound[1]).epsilon(1e-12));
    CHECK(bound[2] == doctest::Approx(0.1 * bound[1]).epsilon(1e-12));
}

TEST_CASE("cli sweep: substituted chain value is independent of E_n") {
    const auto cfg = scratch_dir() / "sweep_step2.json";
    spit(cfg,
         R"({"command":"chain_step2","parameter":"E_n","fixed":{"t_s":1.0,"hbar":1.0},
             "log_range":{"from":1e-4,"to":1e-2,"count":7}})");
    const auto out = scratch_dir() / "sweep_step2.csv";
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out " + out.string()) == 0);

    std::istringstream lines(slurp(out));
    std::string line;
    std::getline(lines, line);
    std::vector<double> vals;
    while (std::getline(lines, line)) {
        // substituted_value is the 6th unquoted cell
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            else if (c == ',' && !quoted) { cells.push_back(cell); cell.clear(); }
            else cell += c;
        }
        cells.push_back(cell);
        vals.push_back(std::stod(cells[5]));
    }
    REQUIRE(vals.size() == 7);
    const double ref = 0.026525823848649224;
    for (double v : vals) CHECK(v == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("cli sweep rejections") {
    const auto cfg = scratch_dir() / "sweep_bad.json";
    spit(cfg, R"({"command":"bound","parameter":"t_s","values":[]})");
    CHECK(run_cli("sweep --config " + cfg.string()) == 2);

    spit(cfg, R"({"command":"bound","parameter":"t_s","values":[1.0,-1.0]})");
    CHECK(run_cli("sweep --config " + cfg.string()) == 2); // pre-validated, nothing runs

    spit(cfg, R"({"command":"warp","parameter":"t_s","values":[1.0]})");
    CHECK(run_cli("sweep --config " + cfg.string()) == 2);
}

TEST_CASE("cli minimize agrees with the closed form") {
    const auto out = scratch_dir() / "minimize.json";
    REQUIRE(run_cli("minimize --en 0.01 --L 1 --dim 6 --seed 1 --out " + out.string()) == 0);
    const auto j = ordered_json::parse(slurp(out));
    const double closed = j.at("closed_form").get<double>();
    const double oracle = j.at("oracle_energy").get<double>();
    CHECK(closed == doctest::Approx(0.016051135538890168).epsilon(1e-12));
    CHECK(oracle >= closed - 1e-6);
    CHECK(oracle <= closed * 1.005);
    CHECK(!j.at("stalled").get<bool>());

    CHECK(run_cli("minimize --en 0.03 --L 1") == 2); // inadmissible
}
