#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

#include "cinediff/fft.hpp"
#include "cinediff/pipeline.hpp"
#include "cinediff/rng.hpp"

using namespace cinediff;
namespace fs = std::filesystem;

namespace {

class RoledZero : public ZeroScore {
 public:
  explicit RoledZero(ScoreRole role) : role_(role) {}
  ScoreRole role() const override { return role_; }

 private:
  ScoreRole role_;
};

DynamicSeries random_kspace(int nx, int ny, int nt, std::uint64_t seed) {
  DynamicSeries s(nx, ny, nt, Domain::KSpace);
  s.data = gaussian_field({seed, 0x70697065ULL}, s.size());
  return s;
}

DynamicSeries random_image(int nx, int ny, int nt, std::uint64_t seed) {
  DynamicSeries s(nx, ny, nt, Domain::Image);
  s.data = gaussian_field({seed, 0x696d6167ULL}, s.size());
  return s;
}

SamplingMask full_mask(int nx, int ny, int nt) {
  SamplingMask mask(nx, ny, nt);
  std::fill(mask.acquired.begin(), mask.acquired.end(), std::uint8_t{1});
  return mask;
}

SamplingMask partial_mask(int nx, int ny, int nt, std::uint64_t seed) {
  SamplingMask mask(nx, ny, nt);
  Rng rng = stream({seed, 0x706d736bULL});
  for (auto& cell : mask.acquired) cell = rng.uniform() < 0.5 ? 1 : 0;
  mask.acquired.front() = 1;
  mask.acquired.back() = 0;
  return mask;
}

ReconConfig tiny_config(int T, int J, ReconMode mode, std::uint64_t seed) {
  ReconConfig config;
  config.sampler.T = T;
  config.sampler.J = J;
  config.sampler.r = 0.075;
  config.sampler.schedule = NoiseSchedule::geometric(0.01, 4.0, T);
  config.mode = mode;
  config.seed = seed;
  return config;
}

struct Event {
  PipelinePhase phase;
  int level;
  int frame;
  std::vector<Complex> state;
};

ReconHooks recording_hooks(std::vector<Event>& events) {
  ReconHooks hooks;
  hooks.observer = [&events](PipelinePhase phase, int level, int frame,
                             std::span<const Complex> state) {
    events.push_back({phase, level, frame, {state.begin(), state.end()}});
  };
  return hooks;
}

}  // namespace

TEST_CASE("sub-steps follow the per-level contract", "[pipeline]") {
  const int nx = 8, ny = 8, nt = 3, T = 3, J = 2;
  const DynamicSeries y = random_kspace(nx, ny, nt, 1);
  const SamplingMask mask = partial_mask(nx, ny, nt, 2);
  const ZeroScore gm, lm;

  std::vector<Event> events;
  ReconHooks hooks = recording_hooks(events);
  reconstruct(y, mask, gm, &lm, tiny_config(T, J, ReconMode::GLDM, 3), hooks);

  std::vector<std::tuple<PipelinePhase, int, int>> expected;
  for (int t = T - 1; t >= 0; --t) {
    for (int f = 0; f < nt; ++f) {
      expected.emplace_back(PipelinePhase::GmPredictor, t, f);
      for (int j = 0; j < J; ++j) expected.emplace_back(PipelinePhase::GmCorrector, t, f);
    }
    for (int f = 0; f < nt; ++f) {
      expected.emplace_back(PipelinePhase::LmPredictor, t, f);
      for (int j = 0; j < J; ++j) expected.emplace_back(PipelinePhase::LmCorrector, t, f);
    }
    expected.emplace_back(PipelinePhase::LowRank, t, -1);
    expected.emplace_back(PipelinePhase::DataConsistency, t, -1);
  }
  expected.emplace_back(PipelinePhase::FinalDc, 0, -1);

  REQUIRE(events.size() == expected.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CAPTURE(i);
    REQUIRE(events[i].phase == std::get<0>(expected[i]));
    REQUIRE(events[i].level == std::get<1>(expected[i]));
    REQUIRE(events[i].frame == std::get<2>(expected[i]));
  }

  // per-frame events carry one frame, series-wide events the whole series
  for (const Event& e : events) {
    const std::size_t want = e.frame >= 0 ? static_cast<std::size_t>(nx) * ny
                                          : static_cast<std::size_t>(nx) * ny * nt;
    REQUIRE(e.state.size() == want);
  }
}

TEST_CASE("gm-only mode runs the same global sub-trajectory", "[pipeline]") {
  const int nx = 8, ny = 8, nt = 3, T = 3, J = 1;
  const DynamicSeries y = random_kspace(nx, ny, nt, 11);
  const SamplingMask mask = partial_mask(nx, ny, nt, 12);
  const ZeroScore gm, lm;

  std::vector<Event> gldm_events, gm_events;
  ReconHooks gldm_hooks = recording_hooks(gldm_events);
  ReconHooks gm_hooks = recording_hooks(gm_events);
  reconstruct(y, mask, gm, &lm, tiny_config(T, J, ReconMode::GLDM, 5), gldm_hooks);
  reconstruct(y, mask, gm, nullptr, tiny_config(T, J, ReconMode::GMOnly, 5), gm_hooks);

  for (const Event& e : gm_events) {
    REQUIRE(e.phase != PipelinePhase::LmPredictor);
    REQUIRE(e.phase != PipelinePhase::LmCorrector);
  }

  // global noise keys do not depend on the mode, so before the first local
  // block (top level, global phases) the two runs are bitwise identical
  auto top_gm_states = [T](const std::vector<Event>& events) {
    std::vector<std::vector<Complex>> out;
    for (const Event& e : events) {
      if (e.level != T - 1) continue;
      if (e.phase == PipelinePhase::GmPredictor || e.phase == PipelinePhase::GmCorrector) {
        out.push_back(e.state);
      }
    }
    return out;
  };
  const auto a = top_gm_states(gldm_events);
  const auto b = top_gm_states(gm_events);
  REQUIRE(a.size() == b.size());
  REQUIRE_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);

  // the local block then forks the trajectories
  REQUIRE(gldm_events.back().state != gm_events.back().state);
}

TEST_CASE("hard consistency pins sampled cells to the measurements", "[pipeline]") {
  const int nx = 8, ny = 8, nt = 3;
  const DynamicSeries y = random_kspace(nx, ny, nt, 21);
  const ZeroScore gm, lm;

  SECTION("full mask reproduces the measurement series") {
    const SamplingMask mask = full_mask(nx, ny, nt);
    auto [out, report] = reconstruct(y, mask, gm, &lm, tiny_config(2, 1, ReconMode::GLDM, 7));
    REQUIRE(out.domain == Domain::KSpace);
    double peak = 0.0;
    for (const auto& v : y.data) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      // exact up to the round trip through the per-frame normalization
      REQUIRE(std::abs(out.data[i] - y.data[i]) <= 1e-12 * peak);
    }
  }

  SECTION("partial mask pins exactly the sampled set") {
    const SamplingMask mask = partial_mask(nx, ny, nt, 22);
    auto [out, report] = reconstruct(y, mask, gm, &lm, tiny_config(2, 1, ReconMode::GLDM, 7));
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      if (!mask.acquired[i]) continue;
      REQUIRE(std::abs(out.data[i] - y.data[i]) <= 1e-12 * (1.0 + std::abs(y.data[i])));
    }
  }
}

TEST_CASE("reconstruction is bit-reproducible under a fixed seed", "[pipeline]") {
  const int nx = 8, ny = 8, nt = 3;
  const DynamicSeries y = random_kspace(nx, ny, nt, 31);
  const SamplingMask mask = partial_mask(nx, ny, nt, 32);
  const ZeroScore gm, lm;

  auto [a, ra] = reconstruct(y, mask, gm, &lm, tiny_config(3, 1, ReconMode::GLDM, 42));
  auto [b, rb] = reconstruct(y, mask, gm, &lm, tiny_config(3, 1, ReconMode::GLDM, 42));
  REQUIRE(a.data == b.data);

  auto [c, rc] = reconstruct(y, mask, gm, &lm, tiny_config(3, 1, ReconMode::GLDM, 43));
  REQUIRE(a.data != c.data);
}

TEST_CASE("truth hooks populate the trace and the report", "[pipeline]") {
  const int nx = 16, ny = 16, nt = 3, T = 3;
  const DynamicSeries truth = random_image(nx, ny, nt, 41);
  const DynamicSeries y = random_kspace(nx, ny, nt, 42);
  const SamplingMask mask = partial_mask(nx, ny, nt, 43);
  const ZeroScore gm, lm;
  const ReconConfig config = tiny_config(T, 1, ReconMode::GLDM, 8);

  SECTION("without truth the report stays empty") {
    auto [out, report] = reconstruct(y, mask, gm, &lm, config);
    REQUIRE(report.trace.empty());
    REQUIRE(report.per_frame.empty());
    REQUIRE(report.wall_seconds > 0.0);
  }

  SECTION("with truth every level appends a trace row") {
    ReconHooks hooks;
    hooks.truth = &truth;
    auto [out, report] = reconstruct(y, mask, gm, &lm, config, hooks);

    REQUIRE(report.trace.size() == static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) {
      const TraceRow& row = report.trace[static_cast<std::size_t>(i)];
      REQUIRE(row.level == T - 1 - i);
      REQUIRE(row.sigma == config.sampler.schedule.sigma(row.level));
      REQUIRE(std::isfinite(row.psnr));
      REQUIRE(row.mse > 0.0);
    }

    REQUIRE(report.per_frame.size() == static_cast<std::size_t>(nt));
    double psnr_sum = 0.0, ssim_sum = 0.0, mse_sum = 0.0;
    for (const FrameMetrics& fm : report.per_frame) {
      psnr_sum += fm.psnr;
      ssim_sum += fm.ssim;
      mse_sum += fm.mse;
    }
    REQUIRE_THAT(report.average.psnr, Catch::Matchers::WithinAbs(psnr_sum / nt, 1e-9));
    REQUIRE_THAT(report.average.ssim, Catch::Matchers::WithinAbs(ssim_sum / nt, 1e-9));
    REQUIRE_THAT(report.average.mse, Catch::Matchers::WithinAbs(mse_sum / nt, 1e-9));
  }

  SECTION("sampler trace records every sub-step of both models") {
    std::vector<SamplerStepTrace> trace;
    ReconHooks hooks;
    hooks.sampler_trace = &trace;
    reconstruct(y, mask, gm, &lm, config, hooks);

    // per level and frame: (1 predictor + J correctors) for gm then lm
    REQUIRE(trace.size() == static_cast<std::size_t>(T) * nt * 2 * (1 + config.sampler.J));
    for (const auto& row : trace) {
      const bool known = row.phase == "gm-predictor" || row.phase == "gm-corrector" ||
                         row.phase == "lm-predictor" || row.phase == "lm-corrector";
      REQUIRE(known);
    }

    std::vector<SamplerStepTrace> gm_trace;
    ReconHooks gm_hooks;
    gm_hooks.sampler_trace = &gm_trace;
    reconstruct(y, mask, gm, nullptr, tiny_config(T, 1, ReconMode::GMOnly, 8), gm_hooks);
    for (const auto& row : gm_trace) {
      REQUIRE(row.phase.rfind("gm-", 0) == 0);
    }
  }
}

TEST_CASE("input contracts are enforced", "[pipeline]") {
  const int nx = 8, ny = 8, nt = 3;
  const DynamicSeries y = random_kspace(nx, ny, nt, 51);
  const SamplingMask mask = partial_mask(nx, ny, nt, 52);
  const ZeroScore any;
  const RoledZero global(ScoreRole::Global), local(ScoreRole::Local);
  const ReconConfig config = tiny_config(2, 1, ReconMode::GLDM, 9);

  try {
    reconstruct(y, mask, local, &local, config);
    FAIL("local model accepted in the global slot");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::ModelRoleMismatch);
  }

  try {
    reconstruct(y, mask, global, &global, config);
    FAIL("global model accepted in the local slot");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::ModelRoleMismatch);
  }

  try {
    reconstruct(y, mask, global, nullptr, config);
    FAIL("missing local model accepted in gldm mode");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::MissingModel);
  }

  DynamicSeries image = y;
  image.domain = Domain::Image;
  try {
    reconstruct(image, mask, global, &local, config);
    FAIL("image-domain measurements accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::DomainMismatch);
  }

  const DynamicSeries wrong_truth = random_image(4, 4, nt, 53);
  ReconHooks hooks;
  hooks.truth = &wrong_truth;
  try {
    reconstruct(y, mask, global, &local, config, hooks);
    FAIL("mismatched truth accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::ShapeMismatch);
  }
}

TEST_CASE("evaluate_run scores identical series at the caps", "[pipeline]") {
  const DynamicSeries truth = random_image(16, 16, 2, 61);

  const ReconReport same = evaluate_run(truth, truth);
  REQUIRE(same.per_frame.size() == 2);
  for (const FrameMetrics& fm : same.per_frame) {
    REQUIRE(fm.psnr == 100.0);
    REQUIRE_THAT(fm.ssim, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE(fm.mse == 0.0);
  }

  // k-space input is converted before comparison, so a transform round trip
  // still scores essentially perfect
  const ReconReport via_k = evaluate_run(fft2c(truth), truth);
  REQUIRE(via_k.average.psnr > 60.0);

  const DynamicSeries small = random_image(16, 16, 3, 62);
  REQUIRE_THROWS_AS(evaluate_run(small, truth), Error);
}

TEST_CASE("report rows append the average under frame -1", "[pipeline]") {
  ReconReport report;
  report.per_frame = {{30.0, 0.9, 1e-4}, {32.0, 0.95, 0.5e-4}};
  report.average = {31.0, 0.925, 0.75e-4};

  const auto rows = report_rows("demo", report);
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0].series == "demo");
  REQUIRE(rows[0].frame == 0);
  REQUIRE(rows[1].frame == 1);
  REQUIRE(rows[2].frame == -1);
  REQUIRE(rows[2].psnr == 31.0);
  REQUIRE(rows[2].mse == 0.75e-4);
}

TEST_CASE("ablation aggregates paired runs per variant", "[pipeline]") {
  const int nx = 16, ny = 16, nt = 3;
  const DynamicSeries truth0 = random_image(nx, ny, nt, 71);
  const DynamicSeries truth1 = random_image(nx, ny, nt, 72);
  const DynamicSeries y0 = random_kspace(nx, ny, nt, 73);
  const DynamicSeries y1 = random_kspace(nx, ny, nt, 74);
  const SamplingMask mask = partial_mask(nx, ny, nt, 75);
  const ZeroScore gm, lm;

  const AblateCase cases[] = {
      {"case0", &y0, &mask, &truth0},
      {"case1", &y1, &mask, &truth1},
  };
  const ReconConfig config = tiny_config(2, 1, ReconMode::GLDM, 10);
  const AblateVariant variants[] = {
      {"joint", ReconMode::GLDM, &gm, &lm, config},
      {"global-only", ReconMode::GMOnly, &gm, nullptr, config},
  };

  const auto rows = ablate(cases, variants);
  REQUIRE(rows.size() == 2);
  for (const AblateRow& row : rows) {
    REQUIRE(row.n == 2);
    REQUIRE(std::isfinite(row.psnr_mean));
    REQUIRE(row.psnr_std >= 0.0);
    REQUIRE(row.mse4_mean > 0.0);
  }
  REQUIRE(rows[0].variant == "joint");
  REQUIRE(rows[1].variant == "global-only");

  try {
    ablate(std::span<const AblateCase>{}, variants);
    FAIL("empty case list accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::EmptyDataset);
  }

  const AblateVariant missing_gm[] = {{"broken", ReconMode::GMOnly, nullptr, nullptr, config}};
  try {
    ablate(cases, missing_gm);
    FAIL("variant without a global model accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::MissingModel);
  }

  const AblateCase incomplete[] = {{"hole", &y0, &mask, nullptr}};
  REQUIRE_THROWS_AS(ablate(incomplete, variants), Error);
}

TEST_CASE("csv writers emit the contracted headers", "[pipeline]") {
  const fs::path dir = fs::temp_directory_path();

  const fs::path trace_path = dir / "cinediff_trace_test.csv";
  const TraceRow trace_rows[] = {{2, 4.0, 12.5, 0.05}, {1, 0.2, 18.0, 0.01}};
  write_trace_csv(trace_path, trace_rows);
  {
    std::ifstream in(trace_path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "level,sigma,psnr,mse");
    std::getline(in, line);
    REQUIRE(line.rfind("2,4,", 0) == 0);
  }
  fs::remove(trace_path);

  const fs::path ablate_path = dir / "cinediff_ablate_test.csv";
  const AblateRow ablate_rows[] = {{"joint", 3, 30.0, 0.5, 0.9, 0.01, 2.0, 0.2}};
  write_ablate_csv(ablate_path, ablate_rows);
  {
    std::ifstream in(ablate_path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "variant,n,psnr_mean,psnr_std,ssim_mean,ssim_std,mse_x1e4_mean,mse_x1e4_std");
    std::getline(in, line);
    REQUIRE(line == "joint,3,30.000000,0.500000,0.900000,0.010000,2.000000,0.200000");
  }
  fs::remove(ablate_path);

  const fs::path sampler_path = dir / "cinediff_sampler_trace_test.csv";
  const SamplerStepTrace sampler_rows[] = {{4, 1.5, "gm-corrector", 2, 10.0, 0.5, 1e-3}};
  write_sampler_trace_csv(sampler_path, sampler_rows);
  {
    std::ifstream in(sampler_path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "level,sigma,phase,site,x_norm,score_norm,eps");
    std::getline(in, line);
    REQUIRE(line.rfind("4,1.5,gm-corrector,2,", 0) == 0);
  }
  fs::remove(sampler_path);
}
