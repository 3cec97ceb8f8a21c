// Command-line driver: classification and image-regression training,
// coefficient pruning, redundancy analysis, and a numeric self-test.
// Every command echoes its effective configuration and writes outputs
// under a fixed set of file names inside --out.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enn/enn.hpp"

namespace fs = std::filesystem;

namespace {

int env_threads() {
  const char* v = std::getenv("ENN_THREADS");
  if (!v) return 1;
  const int t = std::atoi(v);
  return t >= 1 ? t : 1;
}

std::string out_file(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_decision_map_pgm(enn::Network& net, int grid, const std::string& path) {
  const enn::Matrix map = enn::decision_map(net, grid);
  enn::ImageGrid img;
  img.height = map.rows();
  img.width = map.cols();
  img.pixels = map.data();
  enn::save_pgm(img, path);
}

void write_bump_pgm(const enn::Network& net, std::size_t layer, std::size_t neuron, int grid,
                    const std::string& path) {
  const enn::Matrix raster = enn::bump_raster(net, layer, neuron, grid);
  enn::ImageGrid img;
  img.height = raster.rows();
  img.width = raster.cols();
  img.pixels = raster.data();
  for (double& v : img.pixels) v = std::clamp(v, -1.0, 1.0);
  enn::save_pgm(img, path);
}

void write_aaf_curves(const enn::Network& net, const std::string& dir) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const enn::Layer& layer = net.layers[l];
    if (layer.kind != enn::ActivationKind::dct) continue;
    for (std::size_t m = 0; m < layer.dct.size(); ++m) {
      const enn::DctActivation& act = layer.dct[m];
      std::ofstream f(out_file(dir, "aaf_l" + std::to_string(l + 1) + "_n" +
                                        std::to_string(m + 1) + ".csv"));
      f << "zbar,value\n";
      const int steps = 512;
      for (int i = 0; i <= steps; ++i) {
        const double zbar = act.resolution * static_cast<double>(i) / steps;
        f << enn::format_g17(zbar) << "," << enn::format_g17(enn::dct_eval(act, zbar)) << "\n";
      }
    }
  }
}

// operating range of every neuron's scaled input over a data sample, the
// counterpart of the vertical markers on the activation plots
void write_operating_ranges(enn::Network& net, const enn::Dataset& data,
                            const std::string& path) {
  const std::size_t probe = std::min<std::size_t>(data.size(), 10000);
  std::vector<std::vector<double>> lo(net.layers.size()), hi(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    lo[l].assign(net.layers[l].b.size(), std::numeric_limits<double>::infinity());
    hi[l].assign(net.layers[l].b.size(), -std::numeric_limits<double>::infinity());
  }
  enn::Vector x(data.input_dim());
  for (std::size_t i = 0; i < probe; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.inputs(i, j);
    enn::forward(net, x);
    for (std::size_t l = 0; l < net.layers.size(); ++l)
      for (std::size_t m = 0; m < net.cache.zbar[l].size(); ++m) {
        lo[l][m] = std::min(lo[l][m], net.cache.zbar[l][m]);
        hi[l][m] = std::max(hi[l][m], net.cache.zbar[l][m]);
      }
  }
  std::ofstream f(path);
  f << "layer,neuron,zbar_min,zbar_max\n";
  for (std::size_t l = 0; l < net.layers.size(); ++l)
    for (std::size_t m = 0; m < lo[l].size(); ++m)
      f << (l + 1) << "," << (m + 1) << "," << enn::format_g17(lo[l][m]) << ","
        << enn::format_g17(hi[l][m]) << "\n";
}

enn::Dataset load_prune_data(const std::string& source, std::uint64_t seed) {
  if (source.size() > 4 && source.substr(source.size() - 4) == ".pgm")
    return enn::image_to_dataset(enn::load_pgm(source));
  if (source.size() > 4 && source.substr(source.size() - 4) == ".csv")
    return enn::read_dataset_csv(source);
  return enn::generate_problem(enn::parse_problem(source), 100000, seed);
}

int cmd_train_classify(const std::string& problem, int width, int q, int n, int epochs,
                       int batch, double lr, std::size_t samples, std::size_t test_samples,
                       std::uint64_t seed, int threads, const std::string& out) {
  std::cout << "config: command=train-classify problem=" << problem << " width=" << width
            << " q=" << q << " n=" << n << " epochs=" << epochs << " batch=" << batch
            << " lr=" << lr << " samples=" << samples << " test-samples=" << test_samples
            << " seed=" << seed << " threads=" << threads << " out=" << out << "\n";
  fs::create_directories(out);

  const enn::ProblemSpec spec = enn::parse_problem(problem);
  const enn::Dataset train = enn::generate_problem(spec, samples, seed);
  const enn::Dataset test = enn::generate_problem(spec, test_samples, seed + 1);

  enn::Network net =
      enn::init_network({enn::dct_layer(width, q, n), enn::dct_layer(1, q, n)}, 2, seed);

  enn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.rates = {lr, lr};
  cfg.optimizer = enn::OptimizerKind::sgd;
  cfg.seed = seed;
  cfg.eval_every = std::max(1, epochs / 10);
  cfg.threads = threads;
  const enn::Metrics metrics = enn::train_classification(net, train, cfg, &test);

  enn::save_model(net, out_file(out, "model.enn"));
  enn::write_metrics_csv(metrics, out_file(out, "metrics.csv"));
  write_decision_map_pgm(net, 256, out_file(out, "decision_map.pgm"));
  write_aaf_curves(net, out);
  for (std::size_t m = 0; m < net.layers[0].b.size(); ++m)
    write_bump_pgm(net, 0, m, 64, out_file(out, "bump_l1_n" + std::to_string(m + 1) + ".pgm"));
  write_operating_ranges(net, train, out_file(out, "ranges.csv"));

  const double acc = metrics.final().accuracy;
  std::cout << "result: accuracy=" << acc << " mse=" << metrics.final().mse << "\n";
  return std::isfinite(acc) && std::isfinite(metrics.final().mse) ? 0 : 1;
}

int cmd_train_inr(const std::string& image, const std::string& activation, int layers,
                  int width, int q, int n, int epochs, double lr_linear, double lr_activation,
                  std::uint64_t seed, int threads, const std::string& out) {
  // width defaults depend on the benchmark model when not given explicitly
  if (width == 0) {
    if (activation == "enn") width = 240;
    else if (activation == "fourier") width = 235;
    else width = 256;  // relu, siren
  }
  std::cout << "config: command=train-inr image=" << image << " activation=" << activation
            << " layers=" << layers << " width=" << width << " q=" << q << " n=" << n
            << " epochs=" << epochs << " lr-linear=" << lr_linear
            << " lr-activation=" << lr_activation << " seed=" << seed
            << " threads=" << threads << " out=" << out << "\n";
  fs::create_directories(out);

  const enn::ImageGrid img = enn::load_pgm(image);

  std::vector<enn::LayerSpec> spec;
  for (int l = 0; l < layers; ++l) {
    if (activation == "enn") {
      spec.push_back(enn::dct_layer(width, q, n));
    } else if (activation == "relu") {
      spec.push_back(enn::baseline_layer(width, enn::ActivationKind::relu));
    } else if (activation == "fourier") {
      enn::LayerSpec ls = enn::baseline_layer(width, enn::ActivationKind::fourier);
      ls.q = q;
      spec.push_back(ls);
    } else if (activation == "siren") {
      enn::LayerSpec ls = enn::baseline_layer(width, enn::ActivationKind::sine);
      ls.omega = 30.0;
      spec.push_back(ls);
    } else {
      throw std::invalid_argument("unknown activation: " + activation);
    }
  }
  if (activation == "enn")
    spec.push_back(enn::dct_layer(1, q, n));
  else
    spec.push_back(enn::baseline_layer(1, enn::ActivationKind::linear));

  enn::Network net = enn::init_network(spec, 2, seed);

  enn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = enn::TrainConfig::kFullBatch;
  cfg.rates = {lr_linear, lr_activation};
  cfg.optimizer = enn::OptimizerKind::adam;
  cfg.seed = seed;
  cfg.eval_every = std::max(1, epochs / 30);
  cfg.threads = threads;
  const enn::Metrics metrics = enn::train_inr(net, img, cfg);

  enn::save_model(net, out_file(out, "model.enn"));
  enn::write_metrics_csv(metrics, out_file(out, "metrics.csv"));

  // reconstruction at native resolution
  enn::Dataset recon = enn::image_to_dataset(img);
  enn::Workspace ws;
  enn::Vector x(2);
  for (std::size_t i = 0; i < recon.size(); ++i) {
    x[0] = recon.inputs(i, 0);
    x[1] = recon.inputs(i, 1);
    recon.targets[i] = std::clamp(enn::forward_pass(net, x, ws, false), -1.0, 1.0);
  }
  enn::save_pgm(enn::dataset_to_image(recon, img.height, img.width),
                out_file(out, "reconstruction.pgm"));

  std::cout << "result: mse=" << metrics.final().mse << "\n";
  return std::isfinite(metrics.final().mse) ? 0 : 1;
}

int cmd_prune(const std::string& model, double rho, double fraction, bool has_rho,
              bool has_fraction, const std::string& data_source, bool with_mse,
              std::uint64_t seed, const std::string& out) {
  std::cout << "config: command=prune model=" << model
            << (has_rho ? " rho=" + std::to_string(rho) : std::string())
            << (has_fraction ? " fraction=" + std::to_string(fraction) : std::string())
            << " data=" << (data_source.empty() ? "none" : data_source)
            << " with-mse=" << (with_mse ? 1 : 0) << " seed=" << seed << " out=" << out
            << "\n";
  if (with_mse && data_source.empty())
    throw CLI::ValidationError("--with-mse requires --data");
  fs::create_directories(out);

  enn::Network net = enn::load_model(model);
  if (has_fraction) rho = enn::threshold_for_fraction(net, fraction);

  enn::Dataset data;
  const bool use_data = !data_source.empty();
  if (use_data) data = load_prune_data(data_source, seed);

  const enn::PruneReport report = enn::prune_coefficients(net, rho, use_data ? &data : nullptr);
  enn::save_model(net, out_file(out, "model_pruned.enn"));
  enn::write_prune_report_csv(report, out_file(out, "prune_report.csv"));
  enn::write_pruned_distribution_csv(report, out_file(out, "prune_distribution.csv"));

  std::cout << "result: rho=" << report.threshold << " pruned=" << report.pruned << "/"
            << report.total_coeffs;
  if (use_data) {
    std::cout << " mse_before=" << report.mse_before << " mse_after=" << report.mse_after
              << " factor=" << report.mse_after / report.mse_before;
    if (!std::isfinite(report.mse_after)) return 1;
  }
  std::cout << "\n";
  return 0;
}

int cmd_analyze(const std::string& model, double dist_tol, double angle_tol_deg, int bins,
                const std::string& out) {
  std::cout << "config: command=analyze model=" << model << " dist-tol=" << dist_tol
            << " angle-tol-deg=" << angle_tol_deg << " bins=" << bins << " out=" << out
            << "\n";
  fs::create_directories(out);

  const enn::Network net = enn::load_model(model);
  const double angle_tol = angle_tol_deg * std::numbers::pi / 180.0;
  const enn::RedundancyReport report = enn::detect_redundant_bumps(net, dist_tol, angle_tol);
  enn::write_redundancy_csv(report, out_file(out, "redundancy.csv"));

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (net.layers[l].b.size() < 2) continue;
    enn::write_angle_histogram_csv(
        enn::layer_angle_distribution(net, l, bins),
        out_file(out, "angle_hist_layer" + std::to_string(l + 1) + ".csv"));
  }

  // distribution of currently masked coefficients, same schema as prune output
  std::ofstream f(out_file(out, "mask_distribution.csv"));
  f << "layer,frequency,count\n";
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const enn::Layer& layer = net.layers[l];
    if (layer.kind != enn::ActivationKind::dct) continue;
    const int q = layer.dct.front().q_count();
    for (int qi = 0; qi < q; ++qi) {
      std::size_t count = 0;
      for (const enn::DctActivation& act : layer.dct)
        count += act.mask[static_cast<std::size_t>(qi)] ? 0 : 1;
      f << l << "," << (2 * qi + 1) << "," << count << "\n";
    }
  }

  std::cout << "result: redundant_pairs=" << report.pairs.size() << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed) {
  std::cout << "config: command=verify seed=" << seed << "\n";
  int failures = 0;
  auto check = [&](bool ok, const std::string& label) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << "\n";
    if (!ok) ++failures;
  };

  // basis orthogonality
  for (auto [q, n] : {std::pair{6, 512}, std::pair{3, 64}}) {
    const enn::Matrix b = enn::basis_matrix(q, n);
    double worst = 0.0;
    for (int c1 = 0; c1 < q; ++c1)
      for (int c2 = 0; c2 < q; ++c2) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) acc += b(r, c1) * b(r, c2);
        worst = std::max(worst, std::abs(acc - (c1 == c2 ? n / 2.0 : 0.0)));
      }
    check(worst < 1e-9 * n, "basis orthogonality q=" + std::to_string(q) +
                                " n=" + std::to_string(n) + " (max dev " +
                                std::to_string(worst) + ")");
  }

  // activation gradient consistency against central differences
  enn::Rng rng(seed);
  double worst_act = 0.0;
  for (int i = 0; i < 1000; ++i) {
    enn::DctActivation act = enn::make_dct_activation(6, 512);
    for (double& c : act.coeffs) c = rng.uniform(-1.0, 1.0);
    const double zbar = rng.uniform(0.0, 512.0);
    const double h = 1e-5;
    const double fd = (enn::dct_eval(act, zbar + h) - enn::dct_eval(act, zbar - h)) / (2 * h);
    const double an = enn::dct_grad_input(act, zbar);
    worst_act = std::max(worst_act,
                         std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1.0}));
  }
  check(worst_act < 1e-6, "activation gradient vs finite differences (max rel err " +
                              std::to_string(worst_act) + ")");

  // full-network gradient check on random small models
  double worst_net = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const int hidden = 1 + static_cast<int>(rng.next() % 5);
    enn::Network net = enn::init_network(
        {enn::dct_layer(hidden, 4, 64), enn::dct_layer(1, 4, 64)}, 2, rng.next());
    for (enn::Layer& layer : net.layers)
      for (double& v : layer.w.data()) v += rng.uniform(-0.5, 0.5);
    const enn::Vector x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double y = rng.uniform(-1.0, 1.0);
    const enn::Gradients analytic = enn::backward(net, x, y);
    const double h = 1e-5;
    auto loss = [&] {
      const double yhat = enn::forward(net, x);
      return (y - yhat) * (y - yhat);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t i = 0; i < net.layers[l].w.data().size(); ++i) {
        double& p = net.layers[l].w.data()[i];
        const double saved = p;
        p = saved + h;
        const double up = loss();
        p = saved - h;
        const double dn = loss();
        p = saved;
        const double fd = (up - dn) / (2 * h);
        const double an = analytic.layers[l].dw.data()[i];
        worst_net = std::max(worst_net,
                             std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1.0}));
      }
    }
  }
  check(worst_net < 1e-5,
        "network gradient vs finite differences (max rel err " + std::to_string(worst_net) + ")");

  std::cout << (failures == 0 ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return failures == 0 ? 0 : 1;
}

int cmd_gen_image(int size, const std::string& out) {
  std::cout << "config: command=gen-image size=" << size << " out=" << out << "\n";
  if (const fs::path parent = fs::path(out).parent_path(); !parent.empty())
    fs::create_directories(parent);
  enn::save_pgm(enn::make_synthetic_scene(static_cast<std::size_t>(size)), out);
  std::cout << "result: wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expressive network toolkit: trainable cosine-series activations"};
  app.require_subcommand(1);

  // train-classify
  std::string tc_problem = "P1", tc_out = "out";
  int tc_width = 6, tc_q = 6, tc_n = 512, tc_epochs = 50, tc_batch = 64;
  double tc_lr = 1e-3;
  std::size_t tc_samples = 400000, tc_test = 100000;
  std::uint64_t tc_seed = 1;
  int tc_threads = env_threads();
  auto* tc = app.add_subcommand("train-classify", "train a classifier on a synthetic map");
  tc->add_option("--problem", tc_problem, "P1..P5")->capture_default_str();
  tc->add_option("--width", tc_width, "hidden neurons")->capture_default_str();
  tc->add_option("--q", tc_q, "coefficients per activation")->capture_default_str();
  tc->add_option("--n", tc_n, "activation resolution")->capture_default_str();
  tc->add_option("--epochs", tc_epochs)->capture_default_str();
  tc->add_option("--batch", tc_batch)->capture_default_str();
  tc->add_option("--lr", tc_lr, "sgd learning rate (both groups)")->capture_default_str();
  tc->add_option("--samples", tc_samples)->capture_default_str();
  tc->add_option("--test-samples", tc_test)->capture_default_str();
  tc->add_option("--seed", tc_seed)->capture_default_str();
  tc->add_option("--threads", tc_threads)->capture_default_str();
  tc->add_option("--out", tc_out)->capture_default_str();

  // train-inr
  std::string ti_image, ti_activation = "enn", ti_out = "out";
  int ti_layers = 4, ti_width = 0, ti_q = 6, ti_n = 512, ti_epochs = 300;
  double ti_lrl = 1e-3, ti_lra = 1e-2;
  std::uint64_t ti_seed = 1;
  int ti_threads = env_threads();
  auto* ti = app.add_subcommand("train-inr", "fit an image as a coordinate network");
  ti->add_option("--image", ti_image, "grayscale PGM")->required();
  ti->add_option("--activation", ti_activation, "enn|relu|fourier|siren")
      ->capture_default_str();
  ti->add_option("--layers", ti_layers, "hidden layers")->capture_default_str();
  ti->add_option("--width", ti_width, "neurons per hidden layer (0 = per-model default)")
      ->capture_default_str();
  ti->add_option("--q", ti_q)->capture_default_str();
  ti->add_option("--n", ti_n)->capture_default_str();
  ti->add_option("--epochs", ti_epochs)->capture_default_str();
  ti->add_option("--lr-linear", ti_lrl)->capture_default_str();
  ti->add_option("--lr-activation", ti_lra)->capture_default_str();
  ti->add_option("--seed", ti_seed)->capture_default_str();
  ti->add_option("--threads", ti_threads)->capture_default_str();
  ti->add_option("--out", ti_out)->capture_default_str();

  // prune
  std::string pr_model, pr_data, pr_out = "out";
  double pr_rho = 0.0, pr_fraction = 0.0;
  bool pr_with_mse = false;
  std::uint64_t pr_seed = 1;
  auto* pr = app.add_subcommand("prune", "mask low-energy activation coefficients");
  pr->add_option("--model", pr_model)->required();
  auto* rho_opt = pr->add_option("--rho", pr_rho, "energy threshold");
  auto* frac_opt = pr->add_option("--fraction", pr_fraction, "target pruned share");
  rho_opt->excludes(frac_opt);
  pr->add_option("--data", pr_data, "PGM, dataset CSV, or problem id for mse reporting");
  pr->add_flag("--with-mse", pr_with_mse, "require mse reporting");
  pr->add_option("--seed", pr_seed)->capture_default_str();
  pr->add_option("--out", pr_out)->capture_default_str();

  // analyze
  std::string an_model, an_out = "out";
  double an_dist = 0.05, an_angle_deg = 10.0;
  int an_bins = 32;
  auto* an = app.add_subcommand("analyze", "redundancy and angle reports for a model");
  an->add_option("--model", an_model)->required();
  an->add_option("--dist-tol", an_dist)->capture_default_str();
  an->add_option("--angle-tol-deg", an_angle_deg)->capture_default_str();
  an->add_option("--bins", an_bins)->capture_default_str();
  an->add_option("--out", an_out)->capture_default_str();

  // verify
  std::uint64_t ve_seed = 1;
  auto* ve = app.add_subcommand("verify", "gradient and orthogonality self-test");
  ve->add_option("--seed", ve_seed)->capture_default_str();

  // gen-image
  int gi_size = 64;
  std::string gi_out = "scene.pgm";
  auto* gi = app.add_subcommand("gen-image", "write the procedural test scene as PGM");
  gi->add_option("--size", gi_size)->capture_default_str();
  gi->add_option("--out", gi_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (tc->parsed())
      return cmd_train_classify(tc_problem, tc_width, tc_q, tc_n, tc_epochs, tc_batch, tc_lr,
                                tc_samples, tc_test, tc_seed, tc_threads, tc_out);
    if (ti->parsed())
      return cmd_train_inr(ti_image, ti_activation, ti_layers, ti_width, ti_q, ti_n,
                           ti_epochs, ti_lrl, ti_lra, ti_seed, ti_threads, ti_out);
    if (pr->parsed()) {
      if (rho_opt->count() == 0 && frac_opt->count() == 0)
        throw CLI::ValidationError("prune requires --rho or --fraction");
      return cmd_prune(pr_model, pr_rho, pr_fraction, rho_opt->count() > 0,
                       frac_opt->count() > 0, pr_data, pr_with_mse, pr_seed, pr_out);
    }
    if (an->parsed()) return cmd_analyze(an_model, an_dist, an_angle_deg, an_bins, an_out);
    if (ve->parsed()) return cmd_verify(ve_seed);
    if (gi->parsed()) return cmd_gen_image(gi_size, gi_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
