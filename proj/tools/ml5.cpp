#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ml5/pipeline.hpp"
#include "ml5/print.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int fail(const ml5::PipelineError& e, const std::string& file) {
  std::cerr << e.render(file) << '\n';
  return static_cast<int>(e.code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ML5 toolchain: typecheck, translate to L5 and run on a simulated multi-site machine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode;
  app.add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "Checker mode")->check(CLI::IsMember({"classic", "revised"}));

  std::string file;
  std::string trace_path;
  auto* check = app.add_subcommand("check", "Typecheck a program");
  check->add_option("file", file, "Source file (.ml5)")->required();
  auto* translate = app.add_subcommand("translate", "Print the translated L5 program");
  translate->add_option("file", file, "Source file (.ml5)")->required();
  auto* run = app.add_subcommand("run", "Run a program at the entry site");
  run->add_option("file", file, "Source file (.ml5)")->required();
  run->add_option("--trace", trace_path, "Write the event trace (JSON Lines) here");
  for (auto* sub : {check, translate, run}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ml5::RunConfig config;
  if (!config_path.empty()) {
    std::string text;
    if (!read_file(config_path, text)) {
      std::cerr << config_path << ": cannot read\n";
      return 2;
    }
    auto parsed = ml5::parse_config(text);
    if (!parsed) {
      std::cerr << config_path << ": " << parsed.error() << '\n';
      return 2;
    }
    config = parsed.value();
  }
  if (!mode.empty()) config.mode = mode == "revised" ? ml5::Mode::Revised : ml5::Mode::Classic;

  std::string source;
  if (!read_file(file, source)) {
    std::cerr << file << ": cannot read\n";
    return 2;
  }

  if (check->parsed()) {
    auto c = ml5::check_source(source, config);
    if (!c) return fail(c.error(), file);
    std::cout << file << ": ok (" << c.value().derivs.size() << " declarations)\n";
    return 0;
  }

  auto c = ml5::compile(source, config);
  if (!c) return fail(c.error(), file);
  if (translate->parsed()) {
    std::cout << ml5::to_string(c.value().core);
    return 0;
  }

  auto ex = ml5::execute(c.value(), config);
  if (!ex) return fail(ex.error(), file);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) {
      std::cerr << trace_path << ": cannot write\n";
      return 3;
    }
    out << ml5::serialize_trace(ex.value().state.trace);
  }
  for (const auto& e : ex.value().state.trace) {
    if (e.kind == ml5::Event::Kind::Print) std::cout << "[" << e.site << "] " << e.payload << '\n';
  }
  std::cout << ml5::format_value(ex.value().value) << " : " << ml5::to_string(ex.value().type) << '\n';
  return 0;
}
