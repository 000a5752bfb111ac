// End-to-end checks of the command-line tool: exit codes, output schema,
// and rerun determinism. Invoked as: test_cli <path-to-hsm-binary>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("ok   - %s\n", what.c_str());
  } else {
    std::printf("FAIL - %s\n", what.c_str());
    ++g_failures;
  }
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& cmd) {
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, {}};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  nlohmann::json j;
  f >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <hsm-binary>\n";
    return 2;
  }
  const std::string hsm = argv[1];
  const std::string tmp = "/tmp/hsm_cli_test";
  std::system(("mkdir -p " + tmp).c_str());

  {
    const RunResult r = run(hsm + " table1");
    expect(r.exit_code == 0, "table1 exits 0");
    expect(r.out.find("m1_max=4") != std::string::npos &&
               r.out.find("m1_max=27") != std::string::npos &&
               r.out.find("m1_max=60") != std::string::npos &&
               r.out.find("m1_max=106") != std::string::npos,
           "table1 prints the four table entries");
  }

  {
    const RunResult r = run(hsm + " constants --pair 2,4");
    expect(r.exit_code == 0, "constants 2,4 exits 0");
    expect(r.out.find("-0.549306") != std::string::npos, "constants shows Z^alpha of (2,4)");
  }

  {
    const RunResult r = run(hsm + " constants --pair 1,1");
    expect(r.exit_code == 2, "constants 1,1 exits 2 (domain error)");
  }

  {
    const RunResult r = run(hsm + " constants --pair 5,106");
    expect(r.exit_code == 0, "constants at the (5,106) table boundary exits 0");
  }

  {
    const std::string out = tmp + "/shot.json";
    const RunResult r = run(hsm + " --out " + out + " shoot --pair 2,2 --v 1");
    expect(r.exit_code == 0, "shoot exits 0");
    const auto j = load_json(out);
    expect(j["version"].is_string(), "record carries a version");
    expect(j["results"][0]["fate"]["kind"] == "converged", "shoot record fate is converged");
    expect(j["results"][0]["nodal"] == 0, "shoot record nodal is 0");
    expect(j["results"][0]["ell"] == 0, "shoot record ell is 0");
    expect(j["results"][0]["trajectory"].is_array() &&
               j["results"][0]["trajectory"].size() > 10,
           "shoot record carries trajectory samples");
    const auto& row = j["results"][0]["trajectory"][0];
    expect(row.contains("x") && row.contains("r") && row.contains("rp") && row.contains("w") &&
               row.contains("v"),
           "trajectory rows carry x, r, rp, w, v");
  }

  {
    // identical configs reproduce identical numerical output
    const std::string o1 = tmp + "/rep1.json", o2 = tmp + "/rep2.json";
    run(hsm + " --out " + o1 + " shoot --pair 2,3 --v 2.5");
    run(hsm + " --out " + o2 + " shoot --pair 2,3 --v 2.5");
    const auto a = load_json(o1), b = load_json(o2);
    expect(a["results"] == b["results"], "rerun reproduces bit-identical results");
  }

  {
    const std::string out = tmp + "/shot.csv";
    const RunResult r = run(hsm + " --format csv --out " + out + " shoot --pair 2,2 --v 1");
    expect(r.exit_code == 0, "csv shoot exits 0");
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    expect(header == "x,r,rp,w,v", "csv header is x,r,rp,w,v");
  }

  {
    const std::string out = tmp + "/solve.json";
    const RunResult r = run(hsm + " --out " + out + " solve --pair 3,3 --nodal 2");
    expect(r.exit_code == 0, "solve exits 0");
    const auto j = load_json(out);
    const int ell = j["results"][0]["ell"].get<int>();
    const int deg = j["results"][0]["degree"].get<int>();
    expect(ell >= -1 && ell <= 1, "solve ell lies in {-1,0,1}");
    expect(std::abs(deg) == 1 || std::abs(deg) == 3, "solve degree is +-1 or +-3");
    expect(j["results"][0]["v_bracket"].size() == 2, "solve record carries the bracket");
  }

  {
    const RunResult r = run(hsm + " sweep --pair 2,2 --grid 1:100:5:log --threads 2");
    expect(r.exit_code == 0, "sweep exits 0");
  }

  {
    const RunResult r = run(hsm + " omega --pair 2,2 --v 1");
    expect(r.exit_code == 0, "omega exits 0");
  }

  {
    const std::string out = tmp + "/limit.json";
    const RunResult r = run(hsm + " --out " + out + " limit --pair 3,3");
    expect(r.exit_code == 0, "limit exits 0");
    const auto j = load_json(out);
    expect(std::fabs(j["results"][0]["tail_value"].get<double>()) < 1e-4,
           "limit profile tail is below 1e-4");
  }

  {
    const RunResult r = run(hsm + " verify --pair 2,3 --nodal 0..1");
    expect(r.exit_code == 0, "verify 0..1 exits 0");
    expect(r.out.find("FAIL") == std::string::npos, "verify reports no failing check");
  }

  {
    const RunResult r = run(hsm + " shoot --pair 2,2");
    expect(r.exit_code == 2, "missing required --v exits 2");
    const RunResult r2 = run(hsm + " --no-such-flag table1");
    expect(r2.exit_code == 2, "unknown flag exits 2");
    const RunResult r3 = run(hsm + " shoot --pair 2,1 --v 1");
    expect(r3.exit_code == 2, "m1 = 1 is a domain error");
  }

  std::printf("%s: %d failure(s)\n", g_failures ? "FAILED" : "PASSED", g_failures);
  return g_failures ? 1 : 0;
}
