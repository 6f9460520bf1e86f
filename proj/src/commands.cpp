#include "itex/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "itex/png_io.hpp"
#include "itex/sampler.hpp"

namespace itex {

std::string provenance_line(const RunConfig& cfg) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(cfg.hash()));
  return "itex " + std::string(kVersion) + " seed=" + cfg.raw("seed") + " config=" + hash;
}

std::unique_ptr<Denoiser> make_denoiser(const AnyModel& model, const RunConfig& cfg) {
  if (const auto* gf = std::get_if<GaussianFieldModel>(&model)) {
    const int crop = cfg.get_int("crop_size");
    if (gf->height == crop && gf->width == crop) return std::make_unique<GaussianFieldDenoiser>(*gf);
    return std::make_unique<GaussianFieldDenoiser>(resample_spectrum(*gf, crop, crop));
  }
  if (const auto* bank = std::get_if<PatchBank>(&model))
    return std::make_unique<PatchMmseDenoiser>(*bank, cfg.get_int("subwindow_stride"));
  return std::make_unique<LinearDenoiser>(std::get<LinearConvDenoiser>(model));
}

void cmd_fit(const std::string& reference_path, const std::string& out_model_path, const RunConfig& cfg,
             std::ostream& log) {
  const BackendTag backend = parse_backend(cfg.raw("backend"));
  // Validate the training configuration before touching any file.
  if (backend == BackendTag::kLinear) cfg.train().validate();
  const ImageGrid reference = read_png(reference_path);
  log << "reference " << reference.height() << "x" << reference.width() << "x" << reference.channels() << "\n";

  AnyModel model;
  switch (backend) {
    case BackendTag::kGaussian: {
      GaussianFieldModel gf = fit_gaussian_field(reference);
      const int size = cfg.get_int("gf_size");
      if (size > 0) gf = resample_spectrum(gf, size, size);
      log << "gaussian field spectrum " << gf.height << "x" << gf.width << " per channel\n";
      model = std::move(gf);
      break;
    }
    case BackendTag::kPatchBank: {
      PatchBank bank = build_patch_bank(reference, cfg.get_int("patch_size"), cfg.get_int("patch_stride"));
      log << "patch bank: " << bank.count() << " patches of " << bank.patch_size << "x" << bank.patch_size << "\n";
      model = std::move(bank);
      break;
    }
    case BackendTag::kLinear: {
      const TrainConfig tc = cfg.train();
      const NoiseSchedule sched = build_schedule(cfg.get_int("steps"));
      RngStream stream = derive_stream(cfg.get_u64("seed"), {tag(StreamPurpose::kTrain)});
      TrainResult r = train_linear_denoiser(reference, tc, sched, stream);
      log << "linear denoiser: " << tc.iterations << " iterations, running loss " << r.initial_running_loss()
          << " -> " << r.final_running_loss() << "\n";
      model = std::move(r.model);
      break;
    }
  }
  save_model(out_model_path, model);
  log << "wrote " << backend_name(backend) << " model to " << out_model_path << "\n";
}

void cmd_synthesize(const std::string& model_path, const std::string& out_image_path, const RunConfig& cfg,
                    std::ostream& log) {
  const SamplerConfig sc = cfg.sampler();
  sc.validate();
  const AnyModel model = load_model(model_path);
  const auto denoiser = make_denoiser(model, cfg);
  log << "synthesizing " << sc.out_height << "x" << sc.out_width << " with " << backend_name(backend_of(model))
      << " backend, " << sc.steps << " steps, crop " << sc.crop_size << " (" << to_string(sc.crop_mode) << ", "
      << crops_per_step(sc) << " crops/step)\n";
  const SynthesisResult r = synthesize(sc, *denoiser);
  write_png(out_image_path, r.image);
  const double total = std::accumulate(r.step_seconds.begin(), r.step_seconds.end(), 0.0);
  log << std::fixed << std::setprecision(3) << "steps: " << r.step_seconds.size() << ", total " << total
      << " s, mean " << total / static_cast<double>(std::max<std::size_t>(1, r.step_seconds.size()))
      << " s/step\n";
  log.unsetf(std::ios::floatfield);
  log << "denoiser calls: " << r.denoiser_calls << "\n";
  log << "wrote " << out_image_path << "\n";
}

void cmd_quilt(const std::string& reference_path, const std::string& out_image_path, const RunConfig& cfg,
               std::ostream& log) {
  const QuiltConfig qc = cfg.quilt();
  qc.validate();
  const ImageGrid reference = read_png(reference_path);
  const auto t0 = std::chrono::steady_clock::now();
  const ImageGrid out = quilt_synthesize(reference, qc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_png(out_image_path, out);
  log << "quilted " << out.height() << "x" << out.width() << " from " << qc.grid_n << "x" << qc.grid_n
      << " blocks of " << qc.block_size << " (overlap " << qc.overlap << ") in " << secs << " s\n";
  log << "wrote " << out_image_path << "\n";
}

void cmd_evaluate(const std::string& output_path, const std::string& reference_path, const RunConfig& cfg,
                  bool json, std::ostream& out) {
  const ImageGrid output = read_png(output_path);
  const ImageGrid reference = read_png(reference_path);
  if (output.channels() != reference.channels()) {
    throw std::invalid_argument("evaluate: channel counts differ (" + std::to_string(output.channels()) + " vs " +
                                std::to_string(reference.channels()) + ")");
  }
  const MetricsReport report = evaluate_metrics(output, reference, cfg.metrics(output.width()));
  if (json) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : report.fields()) j[k] = v;
    out << j.dump() << "\n";
  } else {
    out << std::setprecision(9);
    for (const auto& [k, v] : report.fields()) out << k << " = " << v << "\n";
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiled diffusion texture synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::vector<std::string> assignments;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
  std::string backend;
  bool json = false;
  std::vector<std::string> inputs;

  auto shared = [&](CLI::App* cmd, bool wants_out) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--set,-s", assignments, "override a config key (key=value), repeatable");
    cmd->add_option("--seed", seed, "root seed");
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    if (wants_out) cmd->add_option("--out,-o", out_path, "output path")->required();
  };

  auto* fit = app.add_subcommand("fit", "fit a per-texture denoiser to a reference PNG");
  fit->add_option("reference", inputs, "reference PNG")->required()->expected(1);
  fit->add_option("--backend", backend, "gaussian | patchbank | linear");
  shared(fit, true);

  auto* synth = app.add_subcommand("synthesize", "synthesize a texture from a model file");
  synth->add_option("model", inputs, "ITXM model")->required()->expected(1);
  shared(synth, true);

  auto* quilt = app.add_subcommand("quilt", "Image Quilting baseline");
  quilt->add_option("reference", inputs, "reference PNG")->required()->expected(1);
  shared(quilt, true);

  auto* eval = app.add_subcommand("evaluate", "texture statistics of an output against its reference");
  eval->add_option("images", inputs, "output PNG and reference PNG")->required()->expected(2);
  eval->add_flag("--json", json, "print one flat JSON object");
  shared(eval, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    for (const auto& a : assignments) cfg.set_assignment(a);
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd->count("--seed")) cfg.set("seed", std::to_string(seed));
    if (cmd->count("--threads")) cfg.set("threads", std::to_string(threads));
    if (!backend.empty()) cfg.set("backend", backend);

    std::ostream& log = cmd == eval ? err : out;
    log << provenance_line(cfg) << "\n";
    if (cmd == fit) {
      cmd_fit(inputs[0], out_path, cfg, log);
    } else if (cmd == synth) {
      cmd_synthesize(inputs[0], out_path, cfg, log);
    } else if (cmd == quilt) {
      cmd_quilt(inputs[0], out_path, cfg, log);
    } else {
      cmd_evaluate(inputs[0], inputs[1], cfg, json, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace itex
