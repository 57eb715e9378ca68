// Command-line front end: check / codegen / simulate / coverage.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ebsm/analyzer.hpp"
#include "ebsm/codegen.hpp"
#include "ebsm/guidance.hpp"
#include "ebsm/parser.hpp"
#include "ebsm/simulator.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const std::vector<ebsm::Diagnostic>& ds, const std::string& file) {
  for (const auto& d : ds)
    std::cerr << file << ": " << ebsm::render_diagnostic(d) << "\n";
}

struct Inputs {
  ebsm::Model model;
  ebsm::GuidanceConfig guidance;
  bool have_guidance = false;
};

// Parses the model and (optionally) the guidance file; nullopt on error,
// with diagnostics already printed.
std::optional<Inputs> load(const std::string& model_path, const std::string& guidance_path) {
  auto src = read_file(model_path);
  if (!src) {
    std::cerr << "cannot read " << model_path << "\n";
    return std::nullopt;
  }
  auto parsed = ebsm::parse_model(*src);
  print_diagnostics(parsed.diagnostics, model_path);
  if (!parsed.ok()) return std::nullopt;
  Inputs in{std::move(*parsed.model), {}, false};
  if (!guidance_path.empty()) {
    auto gsrc = read_file(guidance_path);
    if (!gsrc) {
      std::cerr << "cannot read " << guidance_path << "\n";
      return std::nullopt;
    }
    auto g = ebsm::parse_guidance(*gsrc);
    print_diagnostics(g.diagnostics, guidance_path);
    if (!g.ok()) return std::nullopt;
    auto gd = ebsm::check_guidance(in.model, *g.config);
    print_diagnostics(gd, guidance_path);
    if (ebsm::has_errors(gd)) return std::nullopt;
    in.guidance = std::move(*g.config);
    in.have_guidance = true;
  }
  return in;
}

// All output files for one command, written only when the whole command
// succeeded, so error exits leave no truncated files behind.
struct PendingWrites {
  std::vector<std::pair<fs::path, std::string>> files;
  void add(fs::path p, std::string content) { files.emplace_back(std::move(p), std::move(content)); }
  bool commit() {
    for (auto& [p, content] : files) {
      fs::create_directories(p.parent_path());
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) {
        std::cerr << "cannot write " << p << "\n";
        return false;
      }
      out << content;
    }
    return true;
  }
};

int cmd_check(const std::string& model_path, const std::string& guidance_path,
              const std::string& format) {
  auto in = load(model_path, guidance_path);
  if (!in) return kExitModelError;
  auto rep = ebsm::analyze_model(in->model);
  print_diagnostics(rep.diagnostics, model_path);
  if (format == "structured") {
    nlohmann::ordered_json doc;
    doc["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : rep.diagnostics)
      doc["diagnostics"].push_back({{"severity",
                                     d.severity == ebsm::Diagnostic::Severity::Error
                                         ? "error" : "warning"},
                                    {"line", d.line},
                                    {"column", d.column},
                                    {"code", d.code},
                                    {"message", d.message}});
    doc["guards"] = nlohmann::ordered_json::array();
    for (const auto& gr : rep.guard_reports) {
      nlohmann::ordered_json j;
      j["machine"] = gr.machine;
      j["state"] = gr.state;
      if (gr.domain_too_large) {
        j["domain_too_large"] = *gr.domain_too_large;
      } else {
        j["disjoint"] = gr.disjoint;
        j["complete"] = gr.complete;
      }
      doc["guards"].push_back(std::move(j));
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& gr : rep.guard_reports)
      std::cout << ebsm::render_guard_report(gr) << "\n";
  }
  return ebsm::has_errors(rep.diagnostics) ? kExitModelError : kExitOk;
}

int cmd_codegen(const std::string& model_path, const std::string& guidance_path,
                const std::string& out_dir) {
  auto in = load(model_path, guidance_path);
  if (!in) return kExitModelError;
  auto ir = ebsm::translate_taskbody(in->model);
  if (in->have_guidance) ir = ebsm::instrument(ir, in->guidance);
  auto ada = ebsm::emit_ada(ir);
  PendingWrites w;
  w.add(fs::path(out_dir) / ada.globals_filename, ada.globals);
  w.add(fs::path(out_dir) / ada.main_filename, ada.main);
  if (!w.commit()) return kExitRuntime;
  std::cout << (fs::path(out_dir) / ada.globals_filename).string() << "\n"
            << (fs::path(out_dir) / ada.main_filename).string() << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& model_path, const std::string& guidance_path,
                 std::uint64_t seed, int cycles, const std::string& out_dir) {
  auto in = load(model_path, guidance_path);
  if (!in) return kExitModelError;
  auto ir = ebsm::translate_taskbody(in->model);
  if (in->have_guidance) ir = ebsm::instrument(ir, in->guidance);
  ebsm::SimConfig cfg;
  cfg.seed = seed;
  cfg.cycles = cycles;
  cfg.guidance = in->guidance;
  try {
    auto [trace, cov] = ebsm::run_simulation(ir, cfg);
    PendingWrites w;
    w.add(fs::path(out_dir) / "trace.txt", ebsm::render_trace_text(trace));
    w.add(fs::path(out_dir) / "trace.json", ebsm::render_trace_json(trace));
    w.add(fs::path(out_dir) / "coverage.json", ebsm::render_coverage_json(cov));
    if (!w.commit()) return kExitRuntime;
  } catch (const ebsm::EvalError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_coverage(const std::string& model_path, const std::string& trace_path,
                 const std::string& format) {
  auto in = load(model_path, "");
  if (!in) return kExitModelError;
  auto tsrc = read_file(trace_path);
  if (!tsrc) {
    std::cerr << "cannot read " << trace_path << "\n";
    return kExitRuntime;
  }
  try {
    auto trace = ebsm::parse_trace_json(*tsrc);
    auto cov = ebsm::coverage_report(trace, in->model);
    std::cout << (format == "structured" ? ebsm::render_coverage_json(cov)
                                         : ebsm::render_coverage_text(cov));
  } catch (const std::exception& e) {
    std::cerr << "bad trace file: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guarded-event state-machine compiler and simulator"};
  app.require_subcommand(1);

  std::string model_path, guidance_path, out_dir = "./out", format = "text";
  std::string trace_path;
  std::uint64_t seed = 1;
  int cycles = 100;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("model", model_path, "model file (.ebsm)")->required();
    cmd->add_option("--format", format, "text|structured")
        ->check(CLI::IsMember({"text", "structured"}));
  };

  auto* check = app.add_subcommand("check", "parse and statically check a model");
  add_common(check);
  check->add_option("--guidance", guidance_path, "guidance file");

  auto* codegen = app.add_subcommand("codegen", "emit Ada source");
  add_common(codegen);
  codegen->add_option("--guidance", guidance_path, "guidance file");
  codegen->add_option("--out", out_dir, "output directory");

  auto* simulate = app.add_subcommand("simulate", "run a seeded simulation");
  add_common(simulate);
  simulate->add_option("--guidance", guidance_path, "guidance file");
  simulate->add_option("--seed", seed, "PRNG seed");
  simulate->add_option("--cycles", cycles, "number of cycles")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_dir, "output directory");

  auto* coverage = app.add_subcommand("coverage", "re-render coverage from a stored trace");
  add_common(coverage);
  coverage->add_option("trace", trace_path, "trace file (trace.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (check->parsed()) return cmd_check(model_path, guidance_path, format);
  if (codegen->parsed()) return cmd_codegen(model_path, guidance_path, out_dir);
  if (simulate->parsed())
    return cmd_simulate(model_path, guidance_path, seed, cycles, out_dir);
  if (coverage->parsed()) return cmd_coverage(model_path, trace_path, format);
  return kExitUsage;
}
