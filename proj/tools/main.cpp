// cinediff: desk-scale dynamic-series reconstruction toolkit.
//
// Subcommands compose the core library into scripted experiments: phantom
// generation, retrospective undersampling, merged-trainset construction,
// prior training, reconstruction, and evaluation. Every run writes a
// .manifest sidecar beside each output so results trace back to the exact
// invocation. Exit codes: 0 success, 2 usage/config error, 3 data error,
// 4 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cinediff/fft.hpp"
#include "cinediff/io.hpp"
#include "cinediff/manifest.hpp"
#include "cinediff/masks.hpp"
#include "cinediff/merge.hpp"
#include "cinediff/metrics.hpp"
#include "cinediff/phantom.hpp"
#include "cinediff/pipeline.hpp"
#include "cinediff/rng.hpp"
#include "cinediff/train.hpp"

namespace fs = std::filesystem;
using namespace cinediff;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Diverged:
      return 4;
    case ErrorKind::IncompleteCoverage:
    case ErrorKind::AmbiguousContributor:
    case ErrorKind::BadMagic:
    case ErrorKind::Truncated:
    case ErrorKind::IoFailure:
    case ErrorKind::DtypeMismatch:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::DomainMismatch:
    case ErrorKind::DegenerateShape:
    case ErrorKind::NonFiniteValue:
    case ErrorKind::EmptyDataset:
      return 3;
    default:
      return 2;  // configuration and usage problems
  }
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DynamicSeries read_kspace(const fs::path& path) {
  DynamicSeries series = read_series(path);
  return series.domain == Domain::KSpace ? series : fft2c(series);
}

MaskFamily parse_family(const std::string& name) {
  if (name == "interleaved-uniform") return MaskFamily::InterleavedUniform;
  if (name == "interleaved-random") return MaskFamily::InterleavedRandom;
  if (name == "cartesian") return MaskFamily::Cartesian;
  if (name == "radial") return MaskFamily::Radial;
  throw Error(ErrorKind::InvalidArgument, "unknown mask family: " + name);
}

SamplingMask full_mask(int nx, int ny, int nt) {
  SamplingMask mask(nx, ny, nt);
  std::fill(mask.acquired.begin(), mask.acquired.end(), std::uint8_t{1});
  return mask;
}

std::vector<fs::path> sorted_kds_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::IoFailure, dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".kds") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no .kds files in " + dir.string());
  }
  return files;
}

struct Args {
  // generate-phantom
  std::string config_path;
  std::string out;
  int nx = 64, ny = 64, nt = 16;
  // simulate
  std::string in;
  std::string family = "interleaved-uniform";
  double accel = 4.0;
  int acs = -1;
  double noise = 0.0;
  std::string out_y, out_mask;
  // build-trainset
  std::vector<std::string> inputs;
  std::string scheme = "global";
  int R = 4;
  std::string window = "sliding";
  std::string out_dir;
  // train
  std::string data_dir;
  std::string role = "global";
  int steps = 2000;
  int batch = 4;
  double lr = 1e-3;
  double sigma_max = 378.0;
  double sigma_min = 0.01;
  int levels = 300;
  std::string init_ckpt;
  std::string loss_csv;
  // reconstruct
  std::string y_path, mask_path, gm_path, lm_path, mode = "gldm";
  std::string report_csv, trace_csv, sampler_trace_csv, truth_path;
  int T = 300, J = 1;
  double r = 0.075;
  double lambda = std::numeric_limits<double>::infinity();
  int rank = 3;
  double recon_sigma_max = 4.0;
  double recon_sigma_min = 0.01;
  int threads = 0;
  // evaluate
  std::string recon_path;
  // plot-data
  std::string trace_in;

  std::uint64_t seed = 0;
  std::string command_line;
};

int cmd_generate_phantom(const Args& a) {
  PhantomSpec spec;
  if (!a.config_path.empty()) {
    spec = parse_phantom_config(read_text_file(a.config_path));
  } else {
    spec = PhantomSpec::cardiac(a.nx, a.ny, a.nt, a.seed);
  }
  const DynamicSeries series = generate_phantom(spec);
  write_series(series, a.out);

  RunManifest manifest(a.command_line);
  manifest.set("seed", static_cast<std::uint64_t>(spec.seed));
  manifest.set("nx", static_cast<std::uint64_t>(spec.nx));
  manifest.set("ny", static_cast<std::uint64_t>(spec.ny));
  manifest.set("nt", static_cast<std::uint64_t>(spec.nt));
  manifest.set("config.digest", fnv1a_text(phantom_config_text(spec)));
  if (!a.config_path.empty()) manifest.add_input("config", a.config_path);
  manifest.write_beside(a.out);

  std::cout << "phantom " << spec.nx << "x" << spec.ny << "x" << spec.nt << " -> " << a.out
            << "\n";
  return 0;
}

int cmd_simulate(const Args& a) {
  const DynamicSeries input = read_series(a.in);
  const DynamicSeries kspace = input.domain == Domain::KSpace ? input : fft2c(input);

  SamplingMask mask = [&] {
    if (a.accel == 1.0) return full_mask(kspace.nx, kspace.ny, kspace.nt);
    MaskSpec spec;
    spec.family = parse_family(a.family);
    spec.accel = a.accel;
    spec.acs_lines = a.acs;
    spec.seed = a.seed;
    return make_mask(spec, kspace.nx, kspace.ny, kspace.nt);
  }();

  const DynamicSeries y = undersample(kspace, mask, a.noise, a.seed);
  write_series(y, a.out_y);
  write_mask(mask, a.out_mask);

  RunManifest manifest(a.command_line);
  manifest.set("family", a.family);
  manifest.set("accel", a.accel);
  manifest.set("acs", static_cast<std::uint64_t>(a.acs < 0 ? default_acs_lines(kspace.ny)
                                                           : a.acs));
  manifest.set("noise", a.noise);
  manifest.set("seed", a.seed);
  manifest.add_input("series", a.in);
  manifest.write_beside(a.out_y);
  manifest.write_beside(a.out_mask);

  std::cout << "realized acceleration " << std::fixed << std::setprecision(3)
            << mask.realized_acceleration() << " -> " << a.out_y << ", " << a.out_mask << "\n";
  return 0;
}

int cmd_build_trainset(const Args& a) {
  if (a.scheme != "global" && a.scheme != "local" && a.scheme != "avg") {
    throw Error(ErrorKind::InvalidArgument, "scheme must be global, local, or avg");
  }
  if (a.window != "sliding" && a.window != "disjoint") {
    throw Error(ErrorKind::InvalidArgument, "window must be sliding or disjoint");
  }
  const MergeScheme merge =
      a.scheme == "avg" ? MergeScheme::TemporalAverage : MergeScheme::TimeInterleaved;

  fs::create_directories(a.out_dir);

  RunManifest manifest(a.command_line);
  manifest.set("scheme", a.scheme);
  manifest.set("R", static_cast<std::uint64_t>(a.R));
  manifest.set("window", a.window);
  manifest.set("acs", static_cast<std::int64_t>(a.acs) >= 0
                          ? std::to_string(a.acs)
                          : std::string("default"));
  manifest.set("seed", a.seed);

  std::size_t total = 0;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const DynamicSeries kspace = read_kspace(a.inputs[i]);

    InterleavedScheme scheme;
    scheme.accel = a.R;
    scheme.acs_lines = a.acs;
    scheme.offsets = OffsetMode::Uniform;
    scheme.windows = a.window == "sliding" ? WindowMode::SlidingCircular : WindowMode::Disjoint;
    scheme.seed = derive_key({a.seed, 0x747261696eULL, i});  // per-series mask stream

    const SamplingMask mask = make_mask(scheme.mask_spec(), kspace.nx, kspace.ny, kspace.nt);
    const DynamicSeries y = undersample(kspace, mask, 0.0, scheme.seed);
    const TrainingSet set = build_training_set(y, mask, scheme, merge);

    for (std::size_t j = 0; j < set.samples.size(); ++j) {
      DynamicSeries sample(set.nx, set.ny, 1, Domain::KSpace);
      std::copy(set.samples[j].begin(), set.samples[j].end(), sample.data.begin());
      std::ostringstream name;
      name << "sample_" << std::setw(4) << std::setfill('0') << i << "_" << std::setw(4)
           << std::setfill('0') << j << ".kds";
      write_series(sample, fs::path(a.out_dir) / name.str());
      ++total;
    }
    manifest.add_input("series." + std::to_string(i), a.inputs[i]);
  }

  manifest.set("samples", static_cast<std::uint64_t>(total));
  manifest.write_beside(fs::path(a.out_dir) / "trainset");

  std::cout << total << " samples -> " << a.out_dir << "\n";
  return 0;
}

int cmd_train(const Args& a) {
  const std::vector<fs::path> files = sorted_kds_files(a.data_dir);

  std::vector<std::vector<Complex>> dataset;
  int nx = 0, ny = 0;
  for (const auto& file : files) {
    const DynamicSeries sample = read_series(file);
    if (sample.domain != Domain::KSpace) {
      throw Error(ErrorKind::DomainMismatch, file.string() + " is not k-space");
    }
    if (sample.nt != 1) {
      throw Error(ErrorKind::ShapeMismatch, file.string() + " is not a single-frame sample");
    }
    if (dataset.empty()) {
      nx = sample.nx;
      ny = sample.ny;
    } else if (sample.nx != nx || sample.ny != ny) {
      throw Error(ErrorKind::ShapeMismatch, file.string() + " has a different frame shape");
    }
    dataset.push_back(sample.data);
  }

  const ScoreRole role = a.role == "local" ? ScoreRole::Local : ScoreRole::Global;
  if (a.role != "global" && a.role != "local") {
    throw Error(ErrorKind::InvalidArgument, "role must be global or local");
  }

  OptConfig opt;
  opt.steps = a.steps;
  opt.batch = a.batch;
  opt.lr = a.lr;

  ScoreModel model = [&] {
    if (!a.init_ckpt.empty()) {
      const ScoreModel init = ScoreModel::load(a.init_ckpt);
      return train_from(init, role, dataset, opt, a.seed);
    }
    const NoiseSchedule schedule = NoiseSchedule::geometric(a.sigma_min, a.sigma_max, a.levels);
    return train(dataset, nx, ny, role, schedule, ModelArch::standard(), opt, a.seed);
  }();

  model.save(a.out);

  RunManifest manifest(a.command_line);
  manifest.set("role", a.role);
  manifest.set("steps", static_cast<std::uint64_t>(a.steps));
  manifest.set("batch", static_cast<std::uint64_t>(a.batch));
  manifest.set("lr", a.lr);
  manifest.set("seed", a.seed);
  manifest.set("samples", static_cast<std::uint64_t>(dataset.size()));
  manifest.set("sigma_min", model.schedule().sigma_min);
  manifest.set("sigma_max", model.schedule().sigma_max);
  if (!a.init_ckpt.empty()) manifest.add_input("init", a.init_ckpt);
  const fs::path trainset_manifest = fs::path(a.data_dir) / "trainset.manifest";
  if (fs::exists(trainset_manifest)) manifest.add_input("data", trainset_manifest);
  manifest.write_beside(a.out);

  if (!a.loss_csv.empty()) {
    std::ofstream out(a.loss_csv, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + a.loss_csv);
    out << "step,loss\n" << std::setprecision(10);
    for (std::size_t s = 0; s < model.loss_curve().size(); ++s) {
      out << s << ',' << model.loss_curve()[s] << '\n';
    }
  }

  const auto& curve = model.loss_curve();
  std::cout << "trained " << a.role << " prior on " << dataset.size() << " samples: loss "
            << std::setprecision(6) << (curve.empty() ? 0.0 : curve.front()) << " -> "
            << (curve.empty() ? 0.0 : curve.back()) << " over " << curve.size()
            << " steps -> " << a.out << "\n";
  return 0;
}

int cmd_reconstruct(const Args& a) {
  const DynamicSeries y = read_series(a.y_path);
  const SamplingMask mask = read_mask(a.mask_path);
  const ScoreModel gm = ScoreModel::load(a.gm_path);

  if (a.mode != "gldm" && a.mode != "gm") {
    throw Error(ErrorKind::InvalidArgument, "mode must be gldm or gm");
  }
  const ReconMode mode = a.mode == "gm" ? ReconMode::GMOnly : ReconMode::GLDM;
  if (mode == ReconMode::GLDM && a.lm_path.empty()) {
    throw Error(ErrorKind::MissingModel, "gldm mode needs --lm");
  }

  std::optional<ScoreModel> lm;
  if (!a.lm_path.empty()) lm.emplace(ScoreModel::load(a.lm_path));

  ReconConfig config = ReconConfig::defaults();
  config.sampler.T = a.T;
  config.sampler.J = a.J;
  config.sampler.r = a.r;
  config.sampler.schedule = NoiseSchedule::geometric(a.recon_sigma_min, a.recon_sigma_max, a.T);
  config.lowrank.rank = a.rank;
  config.dc.lambda = a.lambda;
  config.mode = mode;
  config.seed = a.seed;

  std::optional<DynamicSeries> truth;
  if (!a.truth_path.empty()) truth.emplace(read_series(a.truth_path));
  if (!a.trace_csv.empty() && !truth) {
    throw Error(ErrorKind::InvalidArgument, "--trace needs --truth for the quality columns");
  }

  std::vector<SamplerStepTrace> sampler_trace;
  ReconHooks hooks;
  if (truth) hooks.truth = &*truth;
  if (!a.sampler_trace_csv.empty()) hooks.sampler_trace = &sampler_trace;

  auto [recon, report] =
      reconstruct(y, mask, gm, lm ? &*lm : nullptr, config, hooks);
  write_series(recon, a.out);

  RunManifest manifest(a.command_line);
  manifest.set("mode", a.mode);
  manifest.set("T", static_cast<std::uint64_t>(a.T));
  manifest.set("J", static_cast<std::uint64_t>(a.J));
  manifest.set("r", a.r);
  manifest.set("lambda", a.lambda);
  manifest.set("rank", static_cast<std::uint64_t>(a.rank));
  manifest.set("sigma_max", a.recon_sigma_max);
  manifest.set("sigma_min", a.recon_sigma_min);
  manifest.set("seed", a.seed);
  manifest.set("wall_seconds", report.wall_seconds);
  manifest.add_input("y", a.y_path);
  manifest.add_input("mask", a.mask_path);
  manifest.add_input("gm", a.gm_path);
  if (!a.lm_path.empty()) manifest.add_input("lm", a.lm_path);
  if (!a.truth_path.empty()) manifest.add_input("truth", a.truth_path);
  manifest.write_beside(a.out);

  const std::string series_name = fs::path(a.y_path).stem().string();
  if (!a.report_csv.empty()) {
    if (!truth) {
      throw Error(ErrorKind::InvalidArgument, "--report needs --truth for reference metrics");
    }
    write_metrics_csv(a.report_csv, report_rows(series_name, report));
    manifest.write_beside(a.report_csv);
  }
  if (!a.trace_csv.empty()) {
    write_trace_csv(a.trace_csv, report.trace);
    manifest.write_beside(a.trace_csv);
  }
  if (!a.sampler_trace_csv.empty()) {
    write_sampler_trace_csv(a.sampler_trace_csv, sampler_trace);
    manifest.write_beside(a.sampler_trace_csv);
  }

  std::cout << to_string(mode) << " reconstruction -> " << a.out << " ("
            << std::fixed << std::setprecision(1) << report.wall_seconds << "s)";
  if (truth) {
    std::cout << "  psnr " << std::setprecision(2) << report.average.psnr << " dB, ssim "
              << std::setprecision(4) << report.average.ssim;
  }
  std::cout << "\n";
  return 0;
}

int cmd_evaluate(const Args& a) {
  const DynamicSeries recon = read_series(a.recon_path);
  const DynamicSeries truth = read_series(a.truth_path);
  const ReconReport report = evaluate_run(recon, truth);

  const std::string series_name = fs::path(a.recon_path).stem().string();
  write_metrics_csv(a.report_csv, report_rows(series_name, report));

  RunManifest manifest(a.command_line);
  manifest.add_input("recon", a.recon_path);
  manifest.add_input("truth", a.truth_path);
  manifest.write_beside(a.report_csv);

  std::cout << series_name << ": psnr " << std::fixed << std::setprecision(2)
            << report.average.psnr << " dB, ssim " << std::setprecision(4)
            << report.average.ssim << ", mse " << std::scientific << std::setprecision(3)
            << report.average.mse << "\n";
  return 0;
}

int cmd_plot_data(const Args& a) {
  std::ifstream in(a.trace_in, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + a.trace_in);

  std::string header;
  if (!std::getline(in, header) || header != "level,sigma,psnr,mse") {
    throw Error(ErrorKind::BadMagic, a.trace_in + " is not a trace CSV");
  }

  struct Row {
    int level;
    double sigma, psnr, mse;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row{};
    char c1, c2, c3;
    std::istringstream fields(line);
    if (!(fields >> row.level >> c1 >> row.sigma >> c2 >> row.psnr >> c3 >> row.mse) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw Error(ErrorKind::Truncated, "malformed trace row: " + line);
    }
    rows.push_back(row);
  }

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + a.out);
  out << "iteration,level,sigma,psnr,mse\n" << std::setprecision(10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i << ',' << rows[i].level << ',' << rows[i].sigma << ',' << rows[i].psnr << ','
        << rows[i].mse << '\n';
  }

  RunManifest manifest(a.command_line);
  manifest.add_input("trace", a.trace_in);
  manifest.write_beside(a.out);

  std::cout << rows.size() << " trace rows -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  a.command_line = join_args(argc, argv);

  CLI::App app{"desk-scale dynamic-series reconstruction toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate-phantom", "render a dynamic phantom series");
  gen->add_option("--config", a.config_path, "key=value phantom description");
  gen->add_option("--out", a.out, "output .kds")->required();
  gen->add_option("--nx", a.nx);
  gen->add_option("--ny", a.ny);
  gen->add_option("--nt", a.nt);
  gen->add_option("--seed", a.seed);

  auto* sim = app.add_subcommand("simulate", "retrospectively undersample a series");
  sim->add_option("--in", a.in, "fully sampled series (.kds)")->required();
  sim->add_option("--mask-family", a.family)
      ->check(CLI::IsMember({"interleaved-uniform", "interleaved-random", "cartesian",
                             "radial"}));
  sim->add_option("--accel", a.accel, "acceleration factor R");
  sim->add_option("--acs", a.acs, "auto-calibration lines (-1 for default)");
  sim->add_option("--noise", a.noise, "measurement noise sigma");
  sim->add_option("--seed", a.seed);
  sim->add_option("--out-y", a.out_y, "undersampled k-space (.kds)")->required();
  sim->add_option("--out-mask", a.out_mask, "sampling mask (.kds)")->required();

  auto* bts = app.add_subcommand("build-trainset", "merge undersampled frames into samples");
  bts->add_option("--in", a.inputs, "fully sampled series (.kds...)")->required();
  bts->add_option("--scheme", a.scheme, "global | local | avg");
  bts->add_option("--R", a.R, "merge window / acceleration");
  bts->add_option("--window", a.window, "sliding | disjoint");
  bts->add_option("--acs", a.acs, "auto-calibration lines (-1 for default)");
  bts->add_option("--seed", a.seed);
  bts->add_option("--out", a.out_dir, "output directory")->required();

  auto* trn = app.add_subcommand("train", "fit a denoising score prior");
  trn->add_option("--data", a.data_dir, "directory of merged .kds samples")->required();
  trn->add_option("--role", a.role, "global | local");
  trn->add_option("--steps", a.steps);
  trn->add_option("--batch", a.batch);
  trn->add_option("--lr", a.lr);
  trn->add_option("--sigma-max", a.sigma_max);
  trn->add_option("--sigma-min", a.sigma_min);
  trn->add_option("--levels", a.levels, "noise levels in the training ladder");
  trn->add_option("--init", a.init_ckpt, "checkpoint to continue from");
  trn->add_option("--loss-csv", a.loss_csv, "write the per-step loss curve");
  trn->add_option("--seed", a.seed);
  trn->add_option("--out", a.out, "output checkpoint")->required();

  auto* rec = app.add_subcommand("reconstruct", "reverse-diffusion reconstruction");
  rec->add_option("--y", a.y_path, "undersampled k-space (.kds)")->required();
  rec->add_option("--mask", a.mask_path, "sampling mask (.kds)")->required();
  rec->add_option("--gm", a.gm_path, "global prior checkpoint")->required();
  rec->add_option("--lm", a.lm_path, "local prior checkpoint");
  rec->add_option("--mode", a.mode, "gldm | gm");
  rec->add_option("--out", a.out, "reconstructed k-space (.kds)")->required();
  rec->add_option("--report", a.report_csv, "per-frame metrics CSV (needs --truth)");
  rec->add_option("--trace", a.trace_csv, "per-level convergence CSV (needs --truth)");
  rec->add_option("--sampler-trace", a.sampler_trace_csv, "per-step sampler CSV");
  rec->add_option("--truth", a.truth_path, "reference series (.kds)");
  rec->add_option("--T", a.T, "outer levels");
  rec->add_option("--J", a.J, "correctors per level");
  rec->add_option("--r", a.r, "corrector signal-to-noise ratio");
  rec->add_option("--lambda", a.lambda, "data-consistency weight (inf for hard)");
  rec->add_option("--rank", a.rank, "Casorati rank for the low-rank step");
  rec->add_option("--sigma-max", a.recon_sigma_max);
  rec->add_option("--sigma-min", a.recon_sigma_min);
  rec->add_option("--seed", a.seed);
  rec->add_option("--threads", a.threads, "reserved; execution is serial");

  auto* ev = app.add_subcommand("evaluate", "score a reconstruction against truth");
  ev->add_option("--recon", a.recon_path, "reconstruction (.kds)")->required();
  ev->add_option("--truth", a.truth_path, "reference series (.kds)")->required();
  ev->add_option("--report", a.report_csv, "metrics CSV")->required();

  auto* plot = app.add_subcommand("plot-data", "reshape a convergence trace for plotting");
  plot->add_option("--trace", a.trace_in, "trace CSV from reconstruct")->required();
  plot->add_option("--out", a.out, "plot-friendly CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate_phantom(a);
    if (sim->parsed()) return cmd_simulate(a);
    if (bts->parsed()) return cmd_build_trainset(a);
    if (trn->parsed()) return cmd_train(a);
    if (rec->parsed()) return cmd_reconstruct(a);
    if (ev->parsed()) return cmd_evaluate(a);
    if (plot->parsed()) return cmd_plot_data(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
