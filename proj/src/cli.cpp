// Copyright 2026 The UPure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "upure/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "upure/bounds.hpp"
#include "upure/dataset.hpp"
#include "upure/errors.hpp"
#include "upure/metrics.hpp"
#include "upure/purify.hpp"
#include "upure/rdp.hpp"
#include "upure/trigger.hpp"

namespace upure::cli {
namespace fs = std::filesystem;
namespace {

// Flags that do not change results and are left out of the echoed config,
// so reruns that only differ in parallelism or destination stay identical.
const std::set<std::string> kUnechoed = {"workers", "output", "out", "mask", "config", "help"};

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + text + "' is not a number");
  }
}

// Resolved "key=value" lines for every option of `app` except kUnechoed.
std::vector<std::string> resolved_config(const CLI::App& app, const std::string& command) {
  std::vector<std::string> lines{"command=" + command};
  for (const CLI::Option* opt : app.get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || kUnechoed.count(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    } else {
      value = opt->get_default_str();
    }
    lines.push_back(name + "=" + value);
  }
  return lines;
}

io::Format output_format(const std::string& flag, const fs::path& output) {
  if (flag != "auto") return io::parse_format(flag);
  return output.extension() == ".bin" ? io::Format::kCifar10 : io::Format::kPng;
}

// Config sidecar next to a dataset artifact.
fs::path config_sidecar(const fs::path& output, io::Format format) {
  if (format == io::Format::kCifar10) return fs::path(output.string() + ".config.txt");
  return output / "run_config.txt";
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

void save_with_config(const io::Dataset& ds, const fs::path& output, io::Format format,
                      const std::vector<std::string>& config) {
  io::save_dataset(ds, output, format);
  write_lines(config_sidecar(output, format), config);
}

// Writes a table either to `path` or, when empty, to `out`.
void emit_table(const Table& table, const std::string& path, const std::vector<std::string>& config,
                std::ostream& out) {
  if (path.empty()) {
    write_csv(out, table, config);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot create " + path);
  write_csv(file, table, config);
  if (!file) throw IoError("error writing " + path);
}

io::Dataset load_checked(const std::string& path, std::ostream& err) {
  io::Dataset ds = io::load_dataset(path);
  for (const auto& w : ds.warnings) err << "warning: " << w << '\n';
  return ds;
}

std::variant<double, std::vector<double>> parse_q(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() == 1) return parse_double(parts[0], "q");
  std::vector<double> q;
  for (const auto& p : parts) q.push_back(parse_double(p, "q"));
  return q;
}

trigger::PatchPosition parse_position(const std::string& text) {
  trigger::PatchPosition pos;
  if (text == "corner") return pos;
  if (text == "random") {
    pos.kind = trigger::PatchPosition::Kind::kRandom;
    return pos;
  }
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw std::invalid_argument("patch position must be corner, random or ROW,COL");
  }
  pos.kind = trigger::PatchPosition::Kind::kFixed;
  pos.row = static_cast<int>(parse_double(parts[0], "patch row"));
  pos.col = static_cast<int>(parse_double(parts[1], "patch col"));
  return pos;
}

trigger::Axes parse_axes(const std::string& text) {
  if (text == "rows") return trigger::Axes::kRows;
  if (text == "cols") return trigger::Axes::kCols;
  if (text == "both") return trigger::Axes::kBoth;
  throw std::invalid_argument("axes must be rows, cols or both");
}

int classify(const std::exception_ptr& ep, std::ostream& err) {
  try {
    std::rethrow_exception(ep);
  } catch (const ItemError& e) {
    err << "error: " << e.what() << '\n';
    try {
      std::rethrow_exception(e.cause());
    } catch (const NumericError&) {
      return kNumeric;
    } catch (const IoError&) {
      return kIo;
    } catch (...) {
      return kUsage;
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

// Every subcommand registers its options here and a handler that runs after
// a successful parse.
struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::function<void()> handler;
};

}  // namespace

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

double mean_perturbation_psnr(std::span<const Image> images, int tau, double sigma,
                              std::uint64_t seed, int workers) {
  purify::PurifyConfig cfg;
  cfg.strategy = purify::Strategy::kAddPerturbation;
  cfg.tau = tau;
  cfg.sigma = sigma;
  cfg.seed = seed;
  const auto purified = purify::purify_dataset(images, cfg, {}, workers);
  double total = 0.0;
  std::size_t finite = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double p = metrics::psnr(images[i], purified[i]);
    if (std::isfinite(p)) {
      total += p;
      ++finite;
    }
  }
  if (finite == 0) return std::numeric_limits<double>::infinity();
  return total / static_cast<double>(finite);
}

Calibration calibrate_sigma(std::span<const Image> images, int tau, double target_psnr,
                            std::uint64_t seed, int workers, double lo, double hi,
                            double tolerance_db) {
  if (images.empty()) throw std::invalid_argument("calibration needs at least one image");
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("invalid sigma bracket");
  Calibration cal;
  auto eval = [&](double sigma) {
    ++cal.evaluations;
    return mean_perturbation_psnr(images, tau, sigma, seed, workers);
  };
  // PSNR falls as sigma grows: lo gives the highest reachable PSNR.
  const double psnr_lo = eval(lo);
  const double psnr_hi = eval(hi);
  if (target_psnr > psnr_lo + tolerance_db || target_psnr < psnr_hi - tolerance_db) {
    throw NumericError("target PSNR " + std::to_string(target_psnr) + " dB is outside [" +
                       std::to_string(psnr_hi) + ", " + std::to_string(psnr_lo) +
                       "] reachable with sigma in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  double a = lo;
  double b = hi;
  cal.sigma = lo;
  cal.psnr = psnr_lo;
  if (std::abs(psnr_hi - target_psnr) < std::abs(psnr_lo - target_psnr)) {
    cal.sigma = hi;
    cal.psnr = psnr_hi;
  }
  for (int iter = 0; iter < 60 && std::abs(cal.psnr - target_psnr) > tolerance_db / 10.0; ++iter) {
    const double mid = 0.5 * (a + b);
    const double p = eval(mid);
    if (std::abs(p - target_psnr) < std::abs(cal.psnr - target_psnr)) {
      cal.sigma = mid;
      cal.psnr = p;
    }
    if (p > target_psnr) {
      a = mid;
    } else {
      b = mid;
    }
  }
  if (std::abs(cal.psnr - target_psnr) > tolerance_db) {
    throw NumericError("sigma bisection did not reach the target PSNR");
  }
  return cal;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-domain purification of unlabeled image data", "upure"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::vector<Command> commands;
  auto add = [&](CLI::App* sub, const std::string& name) -> Command& {
    sub->add_option("--config", "Flat key=value file; command-line flags win");
    commands.push_back({sub, name, {}});
    return commands.back();
  };

  // Shared option storage; each subcommand binds the subset it uses.
  std::string input, output, format = "auto", mask, donors, out_path;
  std::uint64_t seed = 0;
  int workers = 1;

  // poison
  double gamma = 0.002;
  std::optional<int> target_class;
  std::string trigger_kind = "repetitive", axes = "both", patch_position = "corner";
  trigger::RepetitiveTriggerSpec grid;
  trigger::PatchTriggerSpec patch;
  double patch_value = 255.0;
  {
    auto* sub = app.add_subcommand("poison", "Apply a backdoor trigger to a fraction of a dataset");
    sub->add_option("--input", input, "Input dataset (CIFAR-10 .bin or image directory)")->required();
    sub->add_option("--output", output, "Output dataset path")->required();
    sub->add_option("--format", format, "Output format: auto, cifar10, png, ppm");
    sub->add_option("--mask", mask, "Mask sidecar path (default <output>.mask.txt)");
    sub->add_option("--gamma", gamma, "Poisoning rate in (0, 1]");
    sub->add_option("--target-class", target_class, "Poison only images with this label");
    sub->add_option("--trigger", trigger_kind, "repetitive or patch");
    sub->add_option("--intensity", grid.intensity, "Grid trigger additive intensity");
    sub->add_option("--line-width", grid.line_width, "Grid line width");
    sub->add_option("--gap", grid.gap, "Gap between grid lines");
    sub->add_option("--axes", axes, "Grid axes: rows, cols, both");
    sub->add_option("--patch-height", patch.trig_height, "Patch trigger height");
    sub->add_option("--patch-width", patch.trig_width, "Patch trigger width");
    sub->add_option("--patch-value", patch_value, "Solid patch intensity");
    sub->add_option("--patch-position", patch_position, "corner, random or ROW,COL");
    sub->add_option("--seed", seed, "Global seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add(sub, "poison").handler = [&, sub] {
      const io::Dataset ds = load_checked(input, err);
      trigger::PoisonConfig cfg;
      cfg.rate = gamma;
      cfg.target_class = target_class;
      cfg.seed = seed;
      trigger::TriggerSpec spec;
      if (trigger_kind == "repetitive") {
        grid.axes = parse_axes(axes);
        spec = grid;
      } else if (trigger_kind == "patch") {
        patch.pattern.assign(static_cast<std::size_t>(std::max(patch.trig_height, 0)) *
                                 static_cast<std::size_t>(std::max(patch.trig_width, 0)),
                             patch_value);
        patch.position = parse_position(patch_position);
        spec = patch;
      } else {
        throw std::invalid_argument("trigger must be repetitive or patch");
      }
      auto result = trigger::poison_dataset(ds.images, ds.labels, cfg, spec, workers);
      if (result.warning) err << "warning: " << *result.warning << '\n';
      io::Dataset poisoned{std::move(result.images), ds.labels, ds.source_format, {}};
      const io::Format fmt = output_format(format, output);
      save_with_config(poisoned, output, fmt, resolved_config(*sub, "poison"));
      const fs::path mask_path = mask.empty() ? fs::path(output + ".mask.txt") : fs::path(mask);
      io::write_mask(result.mask, mask_path);
      const auto poisoned_count = std::count(result.mask.begin(), result.mask.end(), true);
      out << "poisoned " << poisoned_count << " of " << result.mask.size() << " images\n";
    };
  }

  // purify
  purify::PurifyConfig pcfg;
  std::string strategy = "perturb";
  {
    auto* sub = app.add_subcommand("purify", "Purify the high-frequency DCT block of every image");
    sub->add_option("--input", input, "Input dataset")->required();
    sub->add_option("--output", output, "Output dataset path")->required();
    sub->add_option("--format", format, "Output format: auto, cifar10, png, ppm");
    sub->add_option("--strategy", strategy, "zero, replace or perturb");
    sub->add_option("--tau", pcfg.tau, "Side of the bottom-right coefficient block");
    sub->add_option("--sigma", pcfg.sigma, "Noise std in DCT units (perturb)");
    sub->add_option("--epsilon", pcfg.epsilon, "Minimum noise norm (perturb)");
    sub->add_option("--resample-budget", pcfg.resample_budget, "Noise redraws before giving up");
    sub->add_option("--donors", donors, "Donor dataset for replace (default: the input itself)");
    sub->add_option("--seed", seed, "Global seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add(sub, "purify").handler = [&, sub] {
      const io::Dataset ds = load_checked(input, err);
      pcfg.strategy = purify::parse_strategy(strategy);
      pcfg.seed = seed;
      io::Dataset donor_ds;
      std::span<const Image> pool;
      if (pcfg.strategy == purify::Strategy::kReplaceFromOther) {
        if (donors.empty()) {
          pool = ds.images;
        } else {
          donor_ds = load_checked(donors, err);
          pool = donor_ds.images;
        }
      }
      io::Dataset purified{purify::purify_dataset(ds.images, pcfg, pool, workers), ds.labels,
                           ds.source_format, {}};
      save_with_config(purified, output, output_format(format, output),
                       resolved_config(*sub, "purify"));
      out << "purified " << purified.images.size() << " images\n";
    };
  }

  // cutout
  purify::CutoutConfig ccfg;
  {
    auto* sub = app.add_subcommand("cutout", "Blank one random rectangle per image");
    sub->add_option("--input", input, "Input dataset")->required();
    sub->add_option("--output", output, "Output dataset path")->required();
    sub->add_option("--format", format, "Output format: auto, cifar10, png, ppm");
    sub->add_option("--cut-height", ccfg.cut_height, "Cutout height");
    sub->add_option("--cut-width", ccfg.cut_width, "Cutout width");
    sub->add_option("--fill", ccfg.fill_value, "Fill value");
    sub->add_option("--seed", seed, "Global seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add(sub, "cutout").handler = [&, sub] {
      const io::Dataset ds = load_checked(input, err);
      ccfg.seed = seed;
      io::Dataset result{purify::cutout_dataset(ds.images, ccfg, workers), ds.labels,
                         ds.source_format, {}};
      save_with_config(result, output, output_format(format, output),
                       resolved_config(*sub, "cutout"));
      out << "cut " << result.images.size() << " images\n";
    };
  }

  // bounds
  bounds::SingleTriggerParams sp;
  bounds::RepetTriggerParams rp;
  std::string q_text = "0.5";
  int figure = 7;
  bounds::SingleSweepGrid single_grid;
  bounds::RepetSweepGrid repet_grid;
  {
    auto* bounds_cmd = app.add_subcommand("bounds", "Defense-success probability bounds");
    bounds_cmd->require_subcommand(1);
    auto single_flags = [&](CLI::App* sub) {
      sub->add_option("--height", sp.height, "Image height H");
      sub->add_option("--width", sp.width, "Image width W");
      sub->add_option("--cut-height", sp.cut_height, "Cutout height H_c");
      sub->add_option("--cut-width", sp.cut_width, "Cutout width W_c");
      sub->add_option("--trig-height", sp.trig_height, "Trigger height H_t");
      sub->add_option("--trig-width", sp.trig_width, "Trigger width W_t");
      sub->add_option("--alpha", sp.alpha, "Minimal invalidating overlap area");
    };
    auto repet_flags = [&](CLI::App* sub) {
      sub->add_option("--total", rp.total, "Coefficient count N");
      sub->add_option("--preserved", rp.preserved, "Preserved low-frequency threshold M");
      sub->add_option("--beta", rp.beta, "Coefficients that must change");
      sub->add_option("--q", q_text, "Change probability: scalar or N-M-1 comma-separated values");
    };

    auto* single = bounds_cmd->add_subcommand("single", "Single-trigger bound under cutout");
    single_flags(single);
    add(single, "bounds single").handler = [&] { out << format_number(bounds::p_single_lower(sp)) << '\n'; };

    auto* repet = bounds_cmd->add_subcommand("repet", "Repetitive-trigger bound");
    repet_flags(repet);
    add(repet, "bounds repet").handler = [&] {
      rp.q = parse_q(q_text);
      out << format_number(bounds::p_repet_lower(rp)) << '\n';
    };

    auto* combined = bounds_cmd->add_subcommand("combined", "Product of both bounds");
    single_flags(combined);
    repet_flags(combined);
    add(combined, "bounds combined").handler = [&] {
      rp.q = parse_q(q_text);
      out << format_number(bounds::p_defense(sp, rp)) << '\n';
    };

    auto* sweep = bounds_cmd->add_subcommand("sweep", "Parameter sweep tables as CSV");
    sweep->add_option("--figure", figure, "6: single-trigger grid, 7: repetitive grid")
        ->check(CLI::IsMember({6, 7}));
    sweep->add_option("--image-size", single_grid.height, "Square image side (figure 6)");
    sweep->add_option("--cut-sizes", single_grid.cut_sizes, "Square cutout sides (figure 6)")
        ->delimiter(',');
    sweep->add_option("--trig-sizes", single_grid.trig_sizes, "Square trigger sides (figure 6)")
        ->delimiter(',');
    sweep->add_option("--alphas", single_grid.alphas, "Overlap thresholds (figure 6)")->delimiter(',');
    sweep->add_option("--total", repet_grid.total, "Coefficient count N (figure 7)");
    sweep->add_option("--preserved-values", repet_grid.preserved, "M values (figure 7)")
        ->delimiter(',');
    sweep->add_option("--q-values", repet_grid.q, "q values (figure 7)")->delimiter(',');
    sweep->add_option("--out", out_path, "CSV path (default stdout)");
    add(sweep, "bounds sweep").handler = [&, sweep] {
      single_grid.width = single_grid.height;
      const Table table =
          figure == 6 ? bounds::sweep_single(single_grid) : bounds::sweep_repet(repet_grid);
      emit_table(table, out_path, resolved_config(*sweep, "bounds sweep"), out);
    };
  }

  // rdp
  rdp::GaussianSource src;
  double perception = 0.0, distortion = 1.0, d_min = 0.05, d_max = 2.0;
  int d_steps = 40;
  {
    auto* rdp_cmd = app.add_subcommand("rdp", "Gaussian rate-distortion-perception function");
    rdp_cmd->require_subcommand(1);
    auto* curve = rdp_cmd->add_subcommand("curve", "R(D) at fixed P over a D grid, as CSV");
    curve->add_option("--sigma-x", src.sigma_x, "Source standard deviation");
    curve->add_option("--perception", perception, "Perception budget P (squared W2)");
    curve->add_option("--d-min", d_min, "Smallest distortion");
    curve->add_option("--d-max", d_max, "Largest distortion");
    curve->add_option("--d-steps", d_steps, "Number of grid points")->check(CLI::PositiveNumber);
    curve->add_option("--out", out_path, "CSV path (default stdout)");
    add(curve, "rdp curve").handler = [&, curve] {
      if (!(d_min > 0.0 && d_max >= d_min)) throw std::invalid_argument("need 0 < d-min <= d-max");
      std::vector<double> grid_d;
      for (int i = 0; i < d_steps; ++i) {
        grid_d.push_back(d_steps == 1 ? d_min : d_min + (d_max - d_min) * i / (d_steps - 1));
      }
      const auto points = rdp::rdp_curve(src, perception, grid_d);
      emit_table(rdp::curve_table(points), out_path, resolved_config(*curve, "rdp curve"), out);
    };

    auto* rate = rdp_cmd->add_subcommand("rate", "Single R(D, P) value in bits");
    rate->add_option("--sigma-x", src.sigma_x, "Source standard deviation");
    rate->add_option("--distortion", distortion, "Distortion D");
    rate->add_option("--perception", perception, "Perception P");
    add(rate, "rdp rate").handler = [&] {
      out << format_number(rdp::rdp_gaussian(src, distortion, perception)) << '\n';
    };
  }

  // metrics / measure
  std::string reference, processed, label = "unnamed";
  {
    auto* sub = app.add_subcommand("metrics", "PSNR/SSIM fidelity report as CSV");
    sub->add_option("--reference", reference, "Original dataset")->required();
    sub->add_option("--processed", processed, "Processed dataset")->required();
    sub->add_option("--out", out_path, "CSV path (default stdout)");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add(sub, "metrics").handler = [&, sub] {
      const auto a = load_checked(reference, err);
      const auto b = load_checked(processed, err);
      const auto report = metrics::batch_fidelity(a.images, b.images, workers);
      auto config = resolved_config(*sub, "metrics");
      config.push_back("ssim=per-channel mean, 11x11 gaussian window (std 1.5), K1=0.01, K2=0.03");
      emit_table(metrics::report_table(report), out_path, config, out);
    };
  }
  {
    auto* sub = app.add_subcommand("measure", "Distortion, perception and rate lower bound");
    sub->add_option("--reference", reference, "Original dataset")->required();
    sub->add_option("--processed", processed, "Processed dataset")->required();
    sub->add_option("--sigma-x", src.sigma_x, "Gaussian source std used for the rate bound");
    sub->add_option("--label", label, "Strategy name written to the report");
    sub->add_option("--out", out_path, "CSV path (default stdout)");
    add(sub, "measure").handler = [&, sub] {
      const auto a = load_checked(reference, err);
      const auto b = load_checked(processed, err);
      const double d = rdp::measure_distortion(a.images, b.images);
      const double p = rdp::measure_perception(a.images, b.images);
      Table table;
      table.columns = {"strategy", "distortion", "perception", "rate_lower_bound"};
      table.rows.push_back({label, d, p, rdp::rdp_gaussian(src, d, p)});
      auto config = resolved_config(*sub, "measure");
      config.push_back(
          "perception=per-position gaussian W2^2 proxy on raw pixels (not Inception FID)");
      emit_table(table, out_path, config, out);
    };
  }

  // calibrate-sigma
  double target_psnr = 45.43;
  int tau = 16;
  {
    auto* sub = app.add_subcommand("calibrate-sigma", "Find the perturbation sigma for a PSNR");
    sub->add_option("--input", input, "Dataset to calibrate on")->required();
    sub->add_option("--target-psnr", target_psnr, "Target mean PSNR in dB");
    sub->add_option("--tau", tau, "Side of the perturbed block");
    sub->add_option("--seed", seed, "Global seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    add(sub, "calibrate-sigma").handler = [&] {
      const auto ds = load_checked(input, err);
      const auto cal = calibrate_sigma(ds.images, tau, target_psnr, seed, workers);
      out << "sigma=" << format_number(cal.sigma) << " psnr=" << format_number(cal.psnr) << '\n';
    };
  }

  // min-tau
  double target_pf = 0.5;
  int channels = 3;
  {
    auto* sub = app.add_subcommand("min-tau", "Smallest region size meeting a failure target");
    sub->add_option("--target", target_pf, "Target repetitive-trigger failure probability");
    sub->add_option("--q", q_text, "Change probability: scalar or N-M-1 values");
    sub->add_option("--preserved", rp.preserved, "Preserved threshold M");
    sub->add_option("--total", rp.total, "Coefficient count N");
    sub->add_option("--channels", channels, "Image channels");
    add(sub, "min-tau").handler = [&] {
      rp.q = parse_q(q_text);
      const int beta = rdp::min_beta_for_target(target_pf, rp);
      out << "beta=" << beta << " tau=" << rdp::min_tau(beta, channels) << '\n';
    };
  }

  // Splice config-file values in front of the user's flags for the selected
  // subcommand, skipping keys the user set explicitly.
  std::vector<std::string> args = args_in;
  try {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      std::size_t depth = 0;
      CLI::App* target = &app;
      while (depth < args.size()) {
        CLI::App* next = target->get_subcommand_no_throw(args[depth]);
        if (next == nullptr) break;
        target = next;
        ++depth;
      }
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config(config_path)) {
        if (key == "config") continue;
        if (target->get_option_no_throw("--" + key) == nullptr) {
          throw std::invalid_argument("config key '" + key + "' is not a flag of this command");
        }
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
          return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
        if (!given) {
          injected.push_back("--" + key);
          injected.push_back(value);
        }
      }
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(depth), injected.begin(),
                  injected.end());
    }
  } catch (...) {
    return classify(std::current_exception(), err);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return kUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      cmd.handler();
      return kOk;
    } catch (...) {
      return classify(std::current_exception(), err);
    }
  }
  err << "error: no command given\n";
  return kUsage;
}

}  // namespace upure::cli
