#include <CLI11.hpp>

#include "funkernel/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"funkernel: function-on-function regression with operator-valued kernels"};
  app.require_subcommand(1);

  funkernel::CliOptions opts;
  std::uint64_t seed = 0;
  int threads = 0;
  for (const auto& name : {"synth", "fit", "cv", "predict", "eval"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
    sub->add_option("--out", opts.out, "override the command's main output path");
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed = seed; });
    sub->add_option("--threads", threads, "worker threads, 0 = auto")
        ->each([&](const std::string&) { opts.threads = threads; });
    sub->add_flag("--verbose", opts.verbose, "chattier progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("synth")) return funkernel::cmd_synth(opts);
  if (app.got_subcommand("fit")) return funkernel::cmd_fit(opts);
  if (app.got_subcommand("cv")) return funkernel::cmd_cv(opts);
  if (app.got_subcommand("predict")) return funkernel::cmd_predict(opts);
  if (app.got_subcommand("eval")) return funkernel::cmd_eval(opts);
  return 2;
}
