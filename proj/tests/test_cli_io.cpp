#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ionctl/chain.hpp"
#include "ionctl/json_io.hpp"
#include "ionctl/kernel.hpp"

using namespace ionctl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ionctl-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("matrix round trip preserves every bit") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = g(rng) * std::pow(10.0, (i - j) * 5);
    auto j = matrix_to_json(m);
    Eigen::MatrixXd back = matrix_from_json(j);
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fourier profile round trip") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    ForceProfile p;
    p.T = 7.25;
    p.n_modes = 3;
    p.weights = Eigen::VectorXd(2);
    p.weights << 1.0, -0.5;
    p.coeff = Eigen::VectorXcd::Zero(7);
    p.coeff(3) = g(rng);
    for (int m = 1; m <= 3; ++m) {
        complexd c(g(rng), g(rng));
        p.coeff(3 + m) = c;
        p.coeff(3 - m) = std::conj(c);
    }
    auto j = profile_to_json(p);
    CHECK(j.contains("T"));
    CHECK(j.contains("coefficients"));
    ForceProfile q = profile_from_json(j);
    CHECK(q.kind == ForceProfile::Kind::Fourier);
    CHECK(q.T == p.T);
    CHECK((q.coeff - p.coeff).cwiseAbs().maxCoeff() == 0.0);
    CHECK((q.weights - p.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK(q.modulation(1.234) == doctest::Approx(p.modulation(1.234)).epsilon(1e-15));
}

TEST_CASE("kick train round trip") {
    ForceProfile p;
    p.kind = ForceProfile::Kind::Kicks;
    p.T = 4.0;
    p.weights = Eigen::VectorXd::Ones(2);
    p.momentum = 0.7;
    p.kick_times = {0.5, 1.25, 3.75};
    p.kick_units = {1.0, -2.0, 1.0};
    auto j = profile_to_json(p);
    CHECK(j.contains("kicks"));
    ForceProfile q = profile_from_json(j);
    CHECK(q.kind == ForceProfile::Kind::Kicks);
    CHECK(q.momentum == p.momentum);
    REQUIRE(q.kick_times.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(q.kick_times[i] == p.kick_times[i]);
        CHECK(q.kick_units[i] == p.kick_units[i]);
    }
}

TEST_CASE("mode basis round trip") {
    TrapSetup s;
    s.n_ions = 4;
    auto m = normal_modes(s);
    auto j = modes_to_json(m);
    auto back = modes_from_json(j);
    CHECK((m.freq - back.freq).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.modes - back.modes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.equilibrium - back.equilibrium).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.length - back.length).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.degenerate_warning == m.degenerate_warning);
}

TEST_CASE("json files carry the schema version and survive a disk round trip") {
    TempDir tmp;
    TrapSetup s;
    auto m = normal_modes(s);
    auto j = modes_to_json(m);
    CHECK(j.at("schema_version").get<int>() == schema_version);
    auto path = (tmp.path / "modes.json").string();
    write_json(path, j);
    auto back = read_json(path);
    CHECK(back == j);
    // pretty-printed with a trailing newline
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    CHECK(text.back() == '\n');
    CHECK(text.find("\n  ") != std::string::npos);
    CHECK_THROWS((void)read_json((tmp.path / "missing.json").string()));
}

TEST_CASE("csv output: header, comma separation, 17 significant digits") {
    TempDir tmp;
    auto path = (tmp.path / "rows.csv").string();
    double x = 1.0 / 3.0;
    write_csv(path, {"a", "b"}, {{x, 2.0}, {3.5, -0.125}});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    std::getline(in, line);
    auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    // the printed value parses back to the identical double
    CHECK(std::stod(line.substr(0, comma)) == x);
    CHECK(line.substr(0, comma).size() >= 17);
    std::getline(in, line);
    CHECK(line == "3.5,-0.125");
}

TEST_CASE("profile csv: time grid and modulation samples") {
    TempDir tmp;
    ForceProfile p;
    p.T = 2.0;
    p.n_modes = 1;
    p.weights = Eigen::VectorXd::Ones(2);
    p.coeff = Eigen::VectorXcd::Zero(3);
    p.coeff(1) = p.coeff(2) = 0.5;  // f(t) = 0.5 + cos(pi t)
    auto path = (tmp.path / "profile.csv").string();
    write_profile_csv(path, p, 8);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("t") == 0);
    int rows = 0;
    double t_last = -1.0, f_last = 0.0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        t_last = std::stod(line.substr(0, comma));
        f_last = std::stod(line.substr(comma + 1));
        ++rows;
    }
    CHECK(rows == 9);  // inclusive endpoint grid
    CHECK(t_last == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f_last == doctest::Approx(p.modulation(2.0)).epsilon(1e-12));
}

TEST_CASE("malformed documents are rejected") {
    nlohmann::json j;
    j["T"] = 1.0;  // missing everything else
    CHECK_THROWS((void)profile_from_json(j));
    CHECK_THROWS((void)modes_from_json(j));
    CHECK_THROWS((void)matrix_from_json(nlohmann::json::object()));
}
