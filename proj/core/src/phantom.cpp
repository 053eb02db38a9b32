#include "cinediff/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cinediff/rng.hpp"

namespace cinediff {

namespace {

constexpr std::uint64_t kPhantomPurpose = 0x7068616eULL;  // "phan"

double smoothstep01(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

/// Soft indicator of the ellipse at normalized point (u, v): 1 well inside,
/// 0 well outside, smooth over a band of width ~2*edge around the boundary.
double ellipse_weight(const PhantomEllipse& e, double u, double v, double scale, double cx,
                      double cy, double edge) {
  const double du = u - cx;
  const double dv = v - cy;
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double lu = c * du + s * dv;
  const double lv = -s * du + c * dv;
  const double ax = std::max(1e-6, e.ax * scale);
  const double ay = std::max(1e-6, e.ay * scale);
  const double rho = std::hypot(lu / ax, lv / ay);
  return smoothstep01((1.0 - rho) / (2.0 * edge) + 0.5);
}

double jitter(Rng& rng, double relative) { return 1.0 + relative * (rng.uniform() - 0.5) * 2.0; }

}  // namespace

PhantomSpec PhantomSpec::cardiac(int nx, int ny, int nt, std::uint64_t seed) {
  PhantomSpec spec;
  spec.nx = nx;
  spec.ny = ny;
  spec.nt = nt;
  spec.seed = seed;

  // Base anatomy; each entry is perturbed by the seed below.
  std::vector<PhantomEllipse> base = {
      // body
      {0.00, 0.02, 0.80, 0.90, 0.10, 0.30, 0.012, 0.0, 0.000, 0.000},
      // myocardial wall
      {-0.14, -0.06, 0.46, 0.42, -0.25, 0.26, 0.050, 0.0, 0.010, 0.006},
      // left blood pool, contracts strongly in counter-phase
      {-0.14, -0.06, 0.26, 0.23, -0.25, 0.30, -0.170, 0.0, 0.012, 0.008},
      // right chamber
      {0.27, 0.10, 0.17, 0.22, 0.55, 0.24, -0.120, 0.9, 0.008, 0.010},
      // descending vessel
      {0.05, 0.62, 0.08, 0.09, 0.00, 0.22, 0.040, 1.7, 0.004, 0.000},
      // small static structure
      {-0.52, 0.44, 0.10, 0.07, 0.80, 0.18, 0.020, 2.6, 0.000, 0.004},
  };

  spec.ellipses.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    Rng rng = stream({seed, kPhantomPurpose, static_cast<std::uint64_t>(i)});
    PhantomEllipse e = base[i];
    e.cx += 0.04 * (rng.uniform() - 0.5);
    e.cy += 0.04 * (rng.uniform() - 0.5);
    e.ax *= jitter(rng, 0.08);
    e.ay *= jitter(rng, 0.08);
    e.angle += 0.15 * (rng.uniform() - 0.5);
    e.intensity *= jitter(rng, 0.10);
    e.pulse *= jitter(rng, 0.20);
    e.phase += 0.30 * (rng.uniform() - 0.5);
    spec.ellipses.push_back(e);
  }
  return spec;
}

DynamicSeries generate_phantom(const PhantomSpec& spec) {
  if (spec.nx <= 1 || spec.ny <= 1 || spec.nt <= 0) {
    throw Error(ErrorKind::DegenerateShape, "phantom needs nx, ny > 1 and nt > 0");
  }
  if (spec.edge <= 0.0) {
    throw Error(ErrorKind::InvalidSpec, "edge width must be positive");
  }
  PhantomSpec work = spec;
  if (work.ellipses.empty()) {
    work.ellipses = PhantomSpec::cardiac(spec.nx, spec.ny, spec.nt, spec.seed).ellipses;
  }
  for (const auto& e : work.ellipses) {
    if (e.intensity < 0.0 || e.ax <= 0.0 || e.ay <= 0.0) {
      throw Error(ErrorKind::InvalidSpec, "ellipse needs positive axes and intensity >= 0");
    }
  }

  // Static low-order phase map, seeded; keeps both complex channels active.
  Rng prng = stream({work.seed, kPhantomPurpose, 0xfaceULL});
  const double p0 = 2.0 * std::numbers::pi * prng.uniform();
  const double pu = (prng.uniform() - 0.5) * 2.0;
  const double pv = (prng.uniform() - 0.5) * 2.0;
  const double puv = (prng.uniform() - 0.5) * 2.0;

  DynamicSeries out(work.nx, work.ny, work.nt, Domain::Image);
  const double omega = 2.0 * std::numbers::pi / static_cast<double>(work.nt);

  for (int t = 0; t < work.nt; ++t) {
    auto frame = out.frame(t);
    for (int y = 0; y < work.ny; ++y) {
      const double v = 2.0 * y / (work.ny - 1.0) - 1.0;
      for (int x = 0; x < work.nx; ++x) {
        const double u = 2.0 * x / (work.nx - 1.0) - 1.0;
        double mag = 0.0;
        for (const auto& e : work.ellipses) {
          const double beat = std::sin(omega * t + e.phase);
          const double scale = 1.0 + e.pulse * beat;
          const double cx = e.cx + e.drift_x * beat;
          const double cy = e.cy + e.drift_y * std::cos(omega * t + e.phase);
          mag += e.intensity * ellipse_weight(e, u, v, scale, cx, cy, work.edge);
        }
        mag = std::min(1.0, mag);
        const double phi =
            work.phase_amp * (std::sin(p0 + std::numbers::pi * (pu * u + pv * v)) +
                              0.5 * std::sin(std::numbers::pi * puv * u * v));
        frame[static_cast<std::size_t>(y) * work.nx + x] =
            Complex(mag * std::cos(phi), mag * std::sin(phi));
      }
    }
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::InvalidSpec, "bad numeric value for " + key + ": '" + text + "'");
}

}  // namespace

PhantomSpec parse_phantom_config(const std::string& text) {
  PhantomSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << lineno << " is not key=value: '" << line << "'";
      throw Error(ErrorKind::InvalidSpec, msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "nx") {
      spec.nx = static_cast<int>(parse_double(value, key));
    } else if (key == "ny") {
      spec.ny = static_cast<int>(parse_double(value, key));
    } else if (key == "nt") {
      spec.nt = static_cast<int>(parse_double(value, key));
    } else if (key == "edge") {
      spec.edge = parse_double(value, key);
    } else if (key == "phase_amp") {
      spec.phase_amp = parse_double(value, key);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_double(value, key));
    } else if (key == "ellipse") {
      std::istringstream fields(value);
      PhantomEllipse e;
      if (!(fields >> e.cx >> e.cy >> e.ax >> e.ay >> e.angle >> e.intensity >> e.pulse >>
            e.phase >> e.drift_x >> e.drift_y)) {
        std::ostringstream msg;
        msg << "line " << lineno << ": ellipse needs ten numbers";
        throw Error(ErrorKind::InvalidSpec, msg.str());
      }
      spec.ellipses.push_back(e);
    } else {
      std::ostringstream msg;
      msg << "line " << lineno << ": unknown key '" << key << "'";
      throw Error(ErrorKind::InvalidSpec, msg.str());
    }
  }
  return spec;
}

std::string phantom_config_text(const PhantomSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "nx=" << spec.nx << "\n";
  out << "ny=" << spec.ny << "\n";
  out << "nt=" << spec.nt << "\n";
  out << "edge=" << spec.edge << "\n";
  out << "phase_amp=" << spec.phase_amp << "\n";
  out << "seed=" << spec.seed << "\n";
  for (const auto& e : spec.ellipses) {
    out << "ellipse=" << e.cx << " " << e.cy << " " << e.ax << " " << e.ay << " " << e.angle
        << " " << e.intensity << " " << e.pulse << " " << e.phase << " " << e.drift_x << " "
        << e.drift_y << "\n";
  }
  return out.str();
}

}  // namespace cinediff
