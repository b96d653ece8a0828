// Command-line driver: recon, mask, phantom, metrics, serve-check.
#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ddugm/ddugm.hpp"

namespace ddugm::cli {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::string default_kspace_path(const std::string& image_path) {
  std::filesystem::path p(image_path);
  return (p.parent_path() / (p.stem().string() + "_k" + p.extension().string())).string();
}

/// Builds a score provider from its command-line form:
///   zero | gaussian | gaussian:<ensemble.ddt> | gaussian:m=<re>[:<im>],tau=<t> | tcp://host:port | unix:/path
/// Bare "gaussian" fits per-pixel statistics to `fallback_ensemble`.
inline std::unique_ptr<ScoreProvider> make_provider(const std::string& text, ScoreDomain domain,
                                                    const WeightMatrix& weight,
                                                    const std::optional<DynamicTensor>& fallback_ensemble) {
  if (text == "zero") return std::make_unique<ZeroScore>(domain);
  if (text.starts_with("tcp://") || text.starts_with("unix:"))
    return std::make_unique<RemoteScore>(domain, net::parse_endpoint(text));
  if (text == "gaussian") {
    if (!fallback_ensemble)
      throw std::invalid_argument("--score gaussian needs --prior <ensemble.ddt> or --reference to fit against");
    return fit_gaussian_prior(*fallback_ensemble, domain, &weight);
  }
  if (text.starts_with("gaussian:m=")) {
    const auto body = text.substr(std::string("gaussian:m=").size());
    const auto comma = body.find(",tau=");
    if (comma == std::string::npos) throw std::invalid_argument("expected gaussian:m=<re>[:<im>],tau=<t>");
    const auto mean_text = body.substr(0, comma);
    const auto colon = mean_text.find(':');
    const double re = std::stod(mean_text.substr(0, colon));
    const double im = colon == std::string::npos ? 0.0 : std::stod(mean_text.substr(colon + 1));
    const double tau = std::stod(body.substr(comma + 5));
    return std::make_unique<GaussianScore>(domain, cplx(re, im), tau);
  }
  if (text.starts_with("gaussian:"))
    return fit_gaussian_prior(read_complex_tensor(text.substr(9)), domain, &weight);
  throw std::invalid_argument("unknown score provider '" + text + "'");
}

inline void print_metrics(std::ostream& os, const std::string& label, const MetricReport& r) {
  os << label << ": psnr " << format_number(r.mean_psnr_db) << " dB, ssim " << format_number(r.mean_ssim)
     << ", mse " << format_number(r.mean_mse) << "\n";
}

inline int run_phantom(Streams io, PhantomSpec spec, const std::string& out_path, std::string kspace_path) {
  io.out << "spec frames " << spec.frames << ", height " << spec.height << ", width " << spec.width << ", seed "
         << spec.seed << ", beat " << format_number(spec.beat_amplitude) << ", texture "
         << format_number(spec.texture_sigma) << "\n";
  const auto image = make_phantom(spec);
  if (kspace_path.empty()) kspace_path = default_kspace_path(out_path);
  write_tensor(out_path, image);
  write_tensor(kspace_path, fft2c(image));
  io.out << "phantom " << image.shape().str() << " -> " << out_path << "\n";
  io.out << "k-space " << image.shape().str() << " -> " << kspace_path << "\n";
  return 0;
}

inline int run_mask(Streams io, const std::string& spec_text, Shape3 shape, const std::string& out_path) {
  MaskSpec spec = parse_mask_spec(spec_text);
  spec.frames = shape.frames;
  spec.height = shape.height;
  spec.width = shape.width;
  const auto mask = make_mask(spec);
  write_tensor(out_path, mask);
  io.out << "mask " << spec_text << " " << shape.str() << " -> " << out_path << "\n";
  if (spec.kind == MaskKind::radial) io.out << "spokes " << radial_spoke_count(spec) << "\n";
  io.out << "acceleration " << format_number(mask.acceleration()) << "\n";
  return 0;
}

inline int run_metrics(Streams io, const std::string& ref_path, const std::string& rec_path,
                       const std::string& json_path) {
  const auto ref = read_complex_tensor(ref_path);
  const auto rec = read_complex_tensor(rec_path);
  const auto report = evaluate_metrics(ref, rec);
  io.out << "PSNR " << format_number(report.mean_psnr_db) << "\n";
  io.out << "PSNR_L2 " << format_number(psnr_l2(ref, rec)) << "\n";
  io.out << "SSIM " << format_number(report.mean_ssim) << "\n";
  io.out << "MSE " << format_number(report.mean_mse) << "\n";
  if (!json_path.empty()) {
    std::ofstream(json_path) << to_json(report).dump(2) << "\n";
  }
  return 0;
}

struct ReconArgs {
  std::string input, mask, config, score_k = "zero", score_i = "zero", output, log, reference, prior, report;
};

inline int run_recon(Streams io, const ReconArgs& a) {
  ReconConfig cfg = a.config.empty() ? ReconConfig{} : read_recon_config(a.config);
  if (const char* env = std::getenv("DDUGM_SEED"); env && *env) {
    char* end = nullptr;
    const auto seed = std::strtoull(env, &end, 10);
    if (*end != '\0') throw std::invalid_argument("DDUGM_SEED must be an unsigned integer");
    cfg.seed = seed;
  }
  const auto mask = read_mask(a.mask);
  const auto b = apply_mask(read_complex_tensor(a.input), mask);
  std::optional<DynamicTensor> reference;
  if (!a.reference.empty()) reference = read_complex_tensor(a.reference);
  std::optional<DynamicTensor> ensemble = reference;
  if (!a.prior.empty()) ensemble = read_complex_tensor(a.prior);

  io.out << "config " << to_json(cfg, b.frames()).dump() << "\n";
  io.out << "input " << b.shape().str() << ", acceleration " << format_number(mask.acceleration()) << "\n";

  const WeightMatrix weight(b.height(), b.width(), cfg.weight);
  std::unique_ptr<ScoreProvider> k_score, i_score;
  if (cfg.domain_mode != DomainMode::image_only)
    k_score = make_provider(a.score_k, ScoreDomain::kspace, weight, ensemble);
  if (cfg.domain_mode != DomainMode::kspace_only)
    i_score = make_provider(a.score_i, ScoreDomain::image, weight, ensemble);
  io.out << "score-k " << (k_score ? k_score->describe() : "unused") << ", score-i "
         << (i_score ? i_score->describe() : "unused") << "\n";

  const auto started = std::chrono::steady_clock::now();
  auto result = reconstruct(b, mask, cfg, k_score.get(), i_score.get(), reference);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  io.out << "reconstructed in " << format_number(seconds) << " s\n";

  write_tensor(a.output, result.image);
  if (!a.log.empty()) std::ofstream(a.log) << convergence_csv(result.log);

  if (reference) {
    const auto zf = evaluate_metrics(*reference, zero_filled(b, mask));
    const auto rec = evaluate_metrics(*reference, result.image);
    print_metrics(io.out, "zero-filled", zf);
    print_metrics(io.out, "reconstruction", rec);
    if (!a.report.empty()) {
      nlohmann::json j;
      j["zero_filled"] = to_json(zf);
      j["reconstruction"] = to_json(rec);
      j["config"] = to_json(cfg, b.frames());
      std::ofstream(a.report) << j.dump(2) << "\n";
    }
  }
  return 0;
}

struct ServeCheckArgs {
  std::string endpoint;
  std::string domain = "image";
  double mean_re = 0.0, mean_im = 0.0, tau = 1.0;
  std::size_t frames = 50, height = 16, width = 16;
  std::uint64_t seed = 0;
  double tolerance = 1e-5;
};

/// Pings the server, then compares its analytic-Gaussian replies with the built-in provider.
inline int run_serve_check(Streams io, const ServeCheckArgs& a) {
  const auto domain = parse_score_domain(a.domain);
  RemoteScore remote(domain, net::parse_endpoint(a.endpoint));
  remote.ping();
  io.out << "ping ok\n";
  GaussianScore local(domain, cplx(a.mean_re, a.mean_im), a.tau);
  double worst = 0.0;
  for (std::size_t t = 0; t < a.frames; ++t) {
    RngStream rng(a.seed, Lane{Branch::test, t, 0, 0, Phase::prior});
    const auto x = rng.complex_normal(Shape3{1, a.height, a.width});
    const double sigma = 0.01 + 0.5 * static_cast<double>(t);
    const auto want = local.score(x, sigma);
    const auto got = remote.score(x, sigma);
    for (std::size_t i = 0; i < want.size(); ++i) {
      worst = std::max(worst, std::abs(want[i].real() - got[i].real()));
      worst = std::max(worst, std::abs(want[i].imag() - got[i].imag()));
    }
  }
  const bool ok = worst <= a.tolerance;
  io.out << "max abs diff " << format_number(worst) << " over " << a.frames << " frames: " << (ok ? "PASS" : "FAIL")
         << "\n";
  return ok ? 0 : 1;
}

inline int cli_main(int argc, char** argv, Streams io = {std::cout, std::cerr}) {
  CLI::App app{"Dual-domain score-based reconstruction for dynamic MRI", "ddugm"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h

  PhantomSpec phantom;
  std::string phantom_out, phantom_k;
  auto* ph = app.add_subcommand("phantom", "Write a beating phantom and its fully-sampled k-space");
  ph->add_option("--t", phantom.frames, "Frames")->capture_default_str();
  ph->add_option("--h", phantom.height, "Height")->capture_default_str();
  ph->add_option("--w", phantom.width, "Width")->capture_default_str();
  ph->add_option("--seed", phantom.seed, "Texture seed")->capture_default_str();
  ph->add_option("--beat", phantom.beat_amplitude, "Beat amplitude (fraction of axes)")->capture_default_str();
  ph->add_option("--texture", phantom.texture_sigma, "Static texture std")->capture_default_str();
  ph->add_option("-o,--output", phantom_out, "Image tensor path")->required();
  ph->add_option("--kspace", phantom_k, "k-space tensor path (default <output>_k.ddt)");

  std::string mask_spec, mask_out;
  Shape3 mask_shape{8, 64, 64};
  auto* mk = app.add_subcommand("mask", "Write an undersampling mask");
  mk->add_option("--spec", mask_spec, "cartesian:R=<r> or radial:R=<r>")->required();
  mk->add_option("--t", mask_shape.frames, "Frames")->capture_default_str();
  mk->add_option("--h", mask_shape.height, "Height")->capture_default_str();
  mk->add_option("--w", mask_shape.width, "Width")->capture_default_str();
  mk->add_option("-o,--output", mask_out, "Mask path")->required();

  std::string met_ref, met_rec, met_json;
  auto* me = app.add_subcommand("metrics", "Compare two tensors (PSNR, SSIM, MSE on magnitudes)");
  me->add_option("reference", met_ref, "Reference tensor")->required();
  me->add_option("reconstruction", met_rec, "Reconstructed tensor")->required();
  me->add_option("--json", met_json, "Write the per-frame report as JSON");

  ReconArgs ra;
  auto* rc = app.add_subcommand("recon", "Reconstruct from undersampled k-space");
  rc->add_option("--input", ra.input, "Measured k-space (masked on load)")->required();
  rc->add_option("--mask", ra.mask, "Sampling mask")->required();
  rc->add_option("--config", ra.config, "Flat JSON reconstruction config");
  rc->add_option("--score-k", ra.score_k, "k-space score: zero|gaussian[:...]|tcp://host:port|unix:path")
      ->capture_default_str();
  rc->add_option("--score-i", ra.score_i, "image score: zero|gaussian[:...]|tcp://host:port|unix:path")
      ->capture_default_str();
  rc->add_option("--output", ra.output, "Reconstructed image tensor")->required();
  rc->add_option("--log", ra.log, "Convergence CSV");
  rc->add_option("--reference", ra.reference, "Ground-truth image for PSNR logging and metrics");
  rc->add_option("--prior", ra.prior, "Image ensemble that bare 'gaussian' providers are fitted to");
  rc->add_option("--report", ra.report, "Metric report JSON (needs --reference)");

  ServeCheckArgs sc;
  auto* sv = app.add_subcommand("serve-check", "Ping a score server and cross-check its analytic mode");
  sv->add_option("--endpoint", sc.endpoint, "tcp://host:port or unix:/path")->required();
  sv->add_option("--domain", sc.domain, "image or kspace")->capture_default_str();
  sv->add_option("--mean-re", sc.mean_re, "Analytic mean, real part")->capture_default_str();
  sv->add_option("--mean-im", sc.mean_im, "Analytic mean, imaginary part")->capture_default_str();
  sv->add_option("--tau", sc.tau, "Analytic std")->capture_default_str();
  sv->add_option("--frames", sc.frames, "Frames to compare")->capture_default_str();
  sv->add_option("--h", sc.height, "Frame height")->capture_default_str();
  sv->add_option("--w", sc.width, "Frame width")->capture_default_str();
  sv->add_option("--seed", sc.seed, "Input seed")->capture_default_str();
  sv->add_option("--tol", sc.tolerance, "Max abs difference")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, io.out, io.err);
  }

  try {
    if (*ph) return run_phantom(io, phantom, phantom_out, phantom_k);
    if (*mk) return run_mask(io, mask_spec, mask_shape, mask_out);
    if (*me) return run_metrics(io, met_ref, met_rec, met_json);
    if (*rc) return run_recon(io, ra);
    if (*sv) return run_serve_check(io, sc);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ddugm::cli
