// Copyright 2026 The SmoothMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance runner. Prints one PASS/FAIL line per criterion.
//
//   acceptance --criterion N   (N in 1..9, or "all")

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "smoothmix/adversary.hpp"
#include "smoothmix/data.hpp"
#include "smoothmix/evaluation.hpp"
#include "smoothmix/nn.hpp"
#include "smoothmix/smoothing.hpp"
#include "smoothmix/stats.hpp"
#include "smoothmix/theory.hpp"
#include "smoothmix/training.hpp"
#include "smoothmix_tools/commands.hpp"
#include "smoothmix_tools/config.hpp"
#include "smoothmix_tools/csv.hpp"
#include "testing.hpp"

namespace smoothmix::acceptance {
namespace {

namespace fs = std::filesystem;
using testing::Gen;
using tools::FlatConfig;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

fs::path work_dir(int criterion) {
  const fs::path dir = fs::temp_directory_path() / "smoothmix_acceptance" /
                       ("criterion_" + std::to_string(criterion));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- harness runs ----------------------------------------------------------

// A committed config with some keys replaced, written next to its outputs.
class Run {
 public:
  Run(const fs::path& base_config, const fs::path& dir,
      const std::map<std::string, std::string>& overrides)
      : dir_(dir) {
    FlatConfig cfg = FlatConfig::load(base_config);
    for (const char* key : {"data.images", "data.labels"}) {
      if (cfg.has(key)) cfg.set(key, cfg.get_path(key).string());
    }
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    fs::create_directories(dir_);
    std::ofstream out(config());
    for (const auto& [k, v] : cfg.entries()) out << k << " = " << v << "\n";
  }

  fs::path config() const { return dir_ / "run.cfg"; }
  const fs::path& dir() const { return dir_; }

  tools::Manifest command(const std::string& name) const {
    tools::RunOptions opts;
    opts.config = config();
    opts.out = dir_;
    opts.timings = false;
    return tools::run_command(name, opts);
  }

 private:
  fs::path dir_;
};

fs::path source_config(const std::string& name) {
  return fs::path(SMOOTHMIX_SOURCE_DIR) / "configs" / name;
}

// Certified accuracy at radius r from a certify.csv.
double certified_accuracy(const tools::CsvTable& t, double r) {
  int hits = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.integer(i, "correct") == 1 && t.number(i, "radius") >= r) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(t.rows.size());
}

double csv_acr(const tools::CsvTable& t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.integer(i, "correct") == 1) sum += t.number(i, "radius");
  }
  return sum / static_cast<double>(t.rows.size());
}

struct Certification {
  double acr = 0.0;
  tools::CsvTable table;
};

Certification train_and_certify(const Run& run) {
  run.command("train");
  run.command("certify");
  Certification c;
  c.table = tools::read_csv(run.dir() / "certify.csv");
  c.acr = csv_acr(c.table);
  return c;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

const std::vector<int> kSeeds = {1, 2, 3};

// ---- 1: gradients ------------------------------------------------------------

Outcome gradients() {
  constexpr double kH = 1e-5;
  constexpr double kSignificant = 1e-6;
  int checked = 0;
  int skipped = 0;
  double worst = 0.0;
  auto loss = [](const ModelParams& p, const Vector& x, const SoftLabel& t) {
    return cross_entropy(forward(p, x), t);
  };
  for (int c = 0; c < 100; ++c) {
    Gen g(2026, "acceptance/gradients", c);
    const int d = g.integer(1, 8);
    const int classes = g.integer(2, 5);
    ModelParams p = g.mlp(d, classes);
    const Vector x = g.vector(d);
    const SoftLabel t = g.soft_label(classes);
    const auto pattern = testing::relu_pattern(p, x);
    const LabeledPoint point{x, t};
    const ModelParams gp = grad_params(p, {&point, 1});
    auto check = [&](double analytic, double fd) {
      if (std::max(std::abs(analytic), std::abs(fd)) < kSignificant) return;
      ++checked;
      worst = std::max(worst, testing::relative_error(analytic, fd));
    };
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto visit = [&](double& theta, double analytic) {
        const double keep = theta;
        theta = keep + kH;
        const bool same_hi = testing::relu_pattern(p, x) == pattern;
        const double hi = loss(p, x, t);
        theta = keep - kH;
        const bool same_lo = testing::relu_pattern(p, x) == pattern;
        const double lo = loss(p, x, t);
        theta = keep;
        if (!same_hi || !same_lo) {
          ++skipped;
          return;
        }
        check(analytic, (hi - lo) / (2.0 * kH));
      };
      auto& layer = p.layers[l];
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
        visit(layer.weight.data()[i], gp.layers[l].weight.data()[i]);
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
        visit(layer.bias[i], gp.layers[l].bias[i]);
      }
    }
    const Vector gx = grad_input(p, x, t);
    for (int i = 0; i < d; ++i) {
      Vector hi = x;
      Vector lo = x;
      hi[i] += kH;
      lo[i] -= kH;
      if (testing::relu_pattern(p, hi) != pattern || testing::relu_pattern(p, lo) != pattern) {
        ++skipped;
        continue;
      }
      check(gx[i], (loss(p, hi, t) - loss(p, lo, t)) / (2.0 * kH));
    }
  }
  return {worst < 1e-4, "100 triples, " + std::to_string(checked) +
                            " coordinates, max relative error " + fmt(worst) + " (< 1e-4), " +
                            std::to_string(skipped) + " skipped at ReLU kinks"};
}

// ---- 2: Clopper-Pearson --------------------------------------------------------

Outcome clopper_pearson() {
  constexpr double kAlpha = 0.001;
  double worst = 0.0;
  double worst_endpoint = 0.0;
  int cases = 0;
  for (const std::int64_t n : {10, 100, 1000}) {
    std::vector<std::int64_t> ks;
    for (int i = 0; i < 50; ++i) ks.push_back((n * i + 24) / 49);
    ks.push_back(0);
    ks.push_back(n);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (const std::int64_t k : ks) {
      const double got = clopper_pearson_lower(k, n, kAlpha);
      ++cases;
      if (k == 0 || k == n) {
        const double exact = k == 0 ? 0.0 : std::pow(kAlpha, 1.0 / static_cast<double>(n));
        worst_endpoint = std::max(worst_endpoint, std::abs(got - exact));
        continue;
      }
      // Lower bound p solves P(Bin(n, p) >= k) = alpha, i.e. the alpha quantile of
      // Beta(k, n - k + 1).
      const double oracle = boost::math::ibeta_inv(static_cast<double>(k),
                                                   static_cast<double>(n - k + 1), kAlpha);
      worst = std::max(worst, std::abs(got - oracle));
    }
  }
  return {worst < 1e-9 && worst_endpoint < 1e-12,
          std::to_string(cases) + " (k, n) cases, max |bisection - beta quantile| " + fmt(worst) +
              " (< 1e-9), endpoint error " + fmt(worst_endpoint) + " (< 1e-12)"};
}

// ---- 3: linear soundness -------------------------------------------------------

Outcome linear_soundness() {
  SmoothingConfig sc;
  sc.sigma = 0.5;
  sc.n0 = 100;
  sc.n = 10000;
  sc.alpha_cert = 0.001;
  int within = 0;
  int certified = 0;
  double tightest = 0.0;
  for (int i = 0; i < 200; ++i) {
    Gen g(2026, "acceptance/linear", i);
    const int d = g.integer(2, 10);
    const Vector w = g.vector(d);
    const double b = g.real(-1.0, 1.0);
    // Place x at a signed distance up to 4 sigma from the boundary.
    Vector x = g.vector(d);
    const double target = g.real(-4.0, 4.0) * sc.sigma;
    x += ((target - (w.dot(x) + b) / w.norm()) / w.norm()) * w;
    const double margin = std::abs(w.dot(x) + b) / w.norm();
    const ModelParams p = testing::linear_binary(w, b);
    const CertifyOutcome out = certify(p, x, sc, g.rng());
    const auto* c = std::get_if<Certified>(&out);
    if (c) {
      ++certified;
      tightest = std::max(tightest, c->radius / margin);
    }
    if (!c || c->radius <= margin) ++within;
  }
  return {within >= 199, std::to_string(within) + "/200 radii <= margin (need 199), " +
                             std::to_string(certified) + " certified, max radius/margin " +
                             fmt(tightest)};
}

// ---- 4: SmoothMix vs Gaussian ----------------------------------------------------

Outcome headline_ordering() {
  const fs::path dir = work_dir(4);
  bool pass = true;
  std::string detail;
  for (const std::string data : {"two_moons", "mnist"}) {
    std::vector<double> mix;
    std::vector<double> gauss;
    bool paired = true;
    for (const int seed : kSeeds) {
      const std::string s = std::to_string(seed);
      const Run a(source_config(data + "_smoothmix.cfg"), dir / (data + "_smoothmix_" + s),
                  {{"seed", s}});
      const Run b(source_config(data + "_gaussian.cfg"), dir / (data + "_gaussian_" + s),
                  {{"seed", s}});
      mix.push_back(train_and_certify(a).acr);
      gauss.push_back(train_and_certify(b).acr);
      paired = paired && mix.back() > gauss.back();
      std::cout << "  " << data << " seed " << seed << ": ACR smoothmix " << fmt(mix.back())
                << " gaussian " << fmt(gauss.back()) << std::endl;
    }
    const double gain = mean(mix) / mean(gauss) - 1.0;
    pass = pass && paired && gain >= 0.05;
    detail += data + ": paired wins " + (paired ? "3/3" : "<3") + ", mean ACR " + fmt(mean(mix)) +
              " vs " + fmt(mean(gauss)) + " (+" + fmt(100.0 * gain, 3) + "%); ";
  }
  return {pass, detail + "need every seed to win and >= 5% on each dataset"};
}

// ---- 5: eta sweep ----------------------------------------------------------------

Outcome eta_monotonicity() {
  const fs::path dir = work_dir(5);
  // Largest radius of the default evaluation grid below the n = 1000 ceiling.
  constexpr double kRadius = 1.0;
  std::vector<double> clean;
  std::vector<double> robust;
  std::string detail;
  for (const std::string eta : {"1", "4", "16"}) {
    std::vector<double> c0;
    std::vector<double> cr;
    for (const int seed : kSeeds) {
      const std::string s = std::to_string(seed);
      const Run run(source_config("two_moons_smoothmix.cfg"), dir / ("eta" + eta + "_" + s),
                    {{"seed", s}, {"eta", eta}});
      const Certification c = train_and_certify(run);
      c0.push_back(certified_accuracy(c.table, 0.0));
      cr.push_back(certified_accuracy(c.table, kRadius));
    }
    clean.push_back(mean(c0));
    robust.push_back(mean(cr));
    detail += "eta " + eta + ": acc@0 " + fmt(clean.back()) + " acc@" + fmt(kRadius) + " " +
              fmt(robust.back()) + "; ";
  }
  const bool up = std::is_sorted(robust.begin(), robust.end());
  const bool down = std::is_sorted(clean.rbegin(), clean.rend());
  return {up && down, detail + "robust nondecreasing " + (up ? "yes" : "no") +
                          ", clean nonincreasing " + (down ? "yes" : "no")};
}

// ---- 6: alpha * T ------------------------------------------------------------------

Outcome alpha_steps_flatness() {
  const fs::path dir = work_dir(6);
  const std::vector<std::pair<std::string, std::string>> grid = {{"2.0", "4"}, {"4.0", "2"},
                                                                 {"8.0", "1"}};
  std::vector<double> acrs;
  std::string detail;
  for (const auto& [alpha, steps] : grid) {
    std::vector<double> per_seed;
    for (const int seed : kSeeds) {
      const std::string s = std::to_string(seed);
      const Run run(source_config("two_moons_smoothmix.cfg"),
                    dir / ("a" + alpha + "_t" + steps + "_" + s),
                    {{"seed", s}, {"attack.alpha", alpha}, {"attack.steps", steps}});
      per_seed.push_back(train_and_certify(run).acr);
    }
    acrs.push_back(mean(per_seed));
    detail += "(" + alpha + ", " + steps + "): ACR " + fmt(acrs.back()) + "; ";
  }
  const auto [lo, hi] = std::minmax_element(acrs.begin(), acrs.end());
  const double spread = (*hi - *lo) / *lo;
  return {spread <= 0.10, detail + "spread (max - min) / min " + fmt(100.0 * spread, 3) +
                              "% (<= 10%)"};
}

// ---- 7: miscalibration diagnostics ---------------------------------------------------

Outcome miscalibration() {
  const fs::path dir = work_dir(7);
  const Run mix(source_config("two_moons_smoothmix.cfg"), dir / "smoothmix", {{"mixratio.points", "200"}});
  const Run gauss(source_config("two_moons_gaussian.cfg"), dir / "gaussian",
                  {{"mixratio.points", "200"}, {"demo.conf_points", "200"}});
  mix.command("train");
  gauss.command("train");
  const double med_mix = std::stod(mix.command("mixratio").summary.at("median_lambda"));
  const double med_gauss = std::stod(gauss.command("mixratio").summary.at("median_lambda"));
  gauss.command("attack-demo");
  const tools::CsvTable conf = tools::read_csv(gauss.dir() / "attack_confidence.csv");

  bool strict = true;
  std::string row;
  for (std::size_t e = 0; e < conf.rows.size(); ++e) {
    row += fmt(conf.number(e, "off_conf")) + (e + 1 < conf.rows.size() ? " -> " : "");
    if (e > 0 && !(conf.number(e, "off_conf") > conf.number(e - 1, "off_conf"))) strict = false;
  }
  const std::size_t last = conf.rows.size() - 1;
  const double rise = conf.number(last, "off_conf") - conf.number(0, "off_conf");
  const double se = std::hypot(conf.number(last, "off_se"), conf.number(0, "off_se"));
  const bool significant = rise > 3.0 * se;
  return {med_mix > med_gauss && strict && significant,
          "median mixing ratio smoothmix " + fmt(med_mix) + " vs gaussian " + fmt(med_gauss) +
              "; gaussian off-class confidence " + row + " (strict " + (strict ? "yes" : "no") +
              ", total rise " + fmt(rise) + " vs 3 SE " + fmt(3.0 * se) + ")"};
}

// ---- 8: decay bound ------------------------------------------------------------------

Outcome decay_bound() {
  const std::vector<int> dims = {64, 256, 1024, 4096};
  bool pass = true;
  std::string detail;
  for (const NoiseFamily family : {NoiseFamily::kGaussian, NoiseFamily::kUniformPm}) {
    TheorySimConfig cfg;
    cfg.sigma = 1.0;
    cfg.tau = 1.5;
    cfg.epsilon = 0.5;
    cfg.p = 0.8;
    cfg.family = family;
    cfg.trials = 1'000'000;
    const DecayReport r = verify_decay(cfg, dims, 2026);
    pass = pass && r.pass && r.product_bounded;
    detail += std::string(noise_family_name(family)) + " C " + fmt(r.C, 6) + ":";
    for (const DecayRow& row : r.rows) {
      detail += " d=" + std::to_string(row.d) + " " + fmt(row.prob.estimate) + "<=" +
                fmt(row.bound) + (row.pass ? "" : "!");
    }
    detail += std::string(r.product_bounded ? " (d*est <= C)" : " (d*est > C!)") + "; ";
  }
  return {pass, detail};
}

// ---- 9: invariants --------------------------------------------------------------------

Outcome invariants() {
  std::vector<std::string> failed;
  auto require = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };

  {  // softmax and SoftLabel validity
    bool ok = true;
    for (int c = 0; c < 200; ++c) {
      Gen g(2026, "acceptance/softmax", c);
      const Vector z = g.vector(g.integer(2, 10), c % 2 == 0 ? 1.0 : 500.0);
      const SoftLabel s = softmax(z);
      ok = ok && s.probs().allFinite() && (s.probs().array() >= 0.0).all() &&
           std::abs(s.probs().sum() - 1.0) < 1e-12 && s.argmax() == argmax_lowest(z);
    }
    bool rejects = false;
    try {
      (void)SoftLabel::from_probs(Vector::Constant(3, 0.5));
    } catch (const std::exception&) {
      rejects = true;
    }
    require(ok && rejects, "softmax/SoftLabel");
  }

  {  // mixup identity at lambda = 0
    bool ok = true;
    for (int c = 0; c < 50; ++c) {
      Gen g(2026, "acceptance/mix-identity", c);
      const int d = g.integer(1, 6);
      const int classes = g.integer(2, 6);
      const Vector x = g.vector(d);
      const SoftLabel f = g.soft_label(classes);
      const MixPair pair = make_mix_pair(x, f, g.vector(d), 0.0, classes);
      ok = ok && pair.x_mix == x && pair.y_mix.probs() == f.probs();
    }
    require(ok, "mixup identity");
  }

  {  // lambda ~ U[0, 1/2]
    Gen g(2026, "acceptance/lambda", 0);
    const int d = 2;
    const ModelParams p = g.mlp(d, 3);
    SmoothMixConfig cfg;
    cfg.m = 2;
    cfg.attack.steps = 1;
    std::vector<double> lambdas;
    constexpr int kBatch = 100;
    for (int b = 0; b < 40; ++b) {
      Matrix xs(d, kBatch);
      std::vector<int> labels;
      std::vector<RngStream> rngs;
      for (int i = 0; i < kBatch; ++i) {
        xs.col(i) = g.vector(d);
        labels.push_back(g.integer(0, 2));
        rngs.emplace_back(2026, "acceptance/lambda-example", b * kBatch + i);
      }
      const MinibatchLoss out = smoothmix_minibatch(p, xs, labels, cfg, rngs, true);
      for (const auto& diag : out.diagnostics) lambdas.push_back(diag.lambda);
    }
    std::sort(lambdas.begin(), lambdas.end());
    const double n = static_cast<double>(lambdas.size());
    double ks = 0.0;
    bool in_range = true;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double cdf = 2.0 * lambdas[i];
      in_range = in_range && lambdas[i] >= 0.0 && lambdas[i] <= 0.5;
      ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                     std::abs(static_cast<double>(i + 1) / n - cdf)});
    }
    require(in_range && ks < 1.95 / std::sqrt(n), "lambda KS (D=" + fmt(ks) + ")");
  }

  {  // attack step norms and SmoothAdv ball containment
    bool steps_ok = true;
    bool ball_ok = true;
    for (int c = 0; c < 50; ++c) {
      Gen g(2026, "acceptance/attack", c);
      const int d = g.integer(2, 8);
      const ModelParams p = g.mlp(d, 3);
      const Vector x = g.vector(d);
      const int y = g.integer(0, 2);
      AttackConfig cfg;
      cfg.alpha_step = g.real(0.05, 3.0);
      cfg.steps = g.integer(1, 6);
      const NoiseBatch noise = sample_noise(0.5, d, 4, g.rng());
      const AttackTrajectory t = smoothmix_attack(p, x, y, noise, cfg);
      for (std::size_t s = 1; s < t.points.size(); ++s) {
        const bool flat = attack_objective_grad(p, t.points[s - 1], y, noise).norm() == 0.0;
        const double step = (t.points[s] - t.points[s - 1]).norm();
        steps_ok = steps_ok && std::abs(step - (flat ? 0.0 : cfg.alpha_step)) < 1e-12;
      }
      const double eps = g.real(0.01, 2.0);
      const int pgd_steps = g.integer(1, 10);
      const Vector adv = smoothadv_pgd(p, x, y, noise, pgd_steps, 2.0 * eps / pgd_steps, eps);
      ball_ok = ball_ok && (adv - x).norm() <= eps * (1.0 + 1e-12);
    }
    require(steps_ok, "attack step norm");
    require(ball_ok, "SmoothAdv ball");
  }

  {  // certified accuracy curve is nonincreasing in r
    bool ok = true;
    const std::vector<double> radii = {0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    for (int c = 0; c < 100; ++c) {
      Gen g(2026, "acceptance/curve", c);
      CertifiedResultSet set;
      for (int i = g.integer(1, 40); i > 0; --i) {
        CertifiedRow row;
        row.label = g.integer(0, 2);
        if (g.integer(0, 3) > 0) {
          row.outcome = Certified{g.integer(0, 2), g.real(0.0, 2.5), g.real(0.5, 1.0)};
        }
        set.rows.push_back(row);
      }
      const auto curve = certified_accuracy_curve(set, radii);
      ok = ok && std::is_sorted(curve.rbegin(), curve.rend());
    }
    require(ok, "curve monotonicity");
  }

  {  // IDX round trip
    const fs::path dir = work_dir(9) / "idx";
    fs::create_directories(dir);
    Gen g(2026, "acceptance/idx", 0);
    const int count = 30;
    const int rows = 4;
    const int cols = 5;
    std::vector<unsigned char> pixels;
    std::vector<unsigned char> labels;
    auto be32 = [](std::ofstream& out, std::uint32_t v) {
      for (int s = 24; s >= 0; s -= 8) out.put(static_cast<char>((v >> s) & 0xff));
    };
    for (int i = 0; i < count * rows * cols; ++i) pixels.push_back(static_cast<unsigned char>(g.integer(0, 255)));
    for (int i = 0; i < count; ++i) labels.push_back(static_cast<unsigned char>(g.integer(0, 9)));
    {
      std::ofstream img(dir / "images", std::ios::binary);
      be32(img, 0x803);
      be32(img, count);
      be32(img, rows);
      be32(img, cols);
      img.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
      std::ofstream lab(dir / "labels", std::ios::binary);
      be32(lab, 0x801);
      be32(lab, count);
      lab.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    }
    const Dataset ds = load_mnist_idx(dir / "images", dir / "labels", 0, 0);
    bool ok = ds.size() == count && ds.dim() == rows * cols;
    for (int i = 0; ok && i < count; ++i) {
      ok = ds.labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)];
      for (int p = 0; ok && p < rows * cols; ++p) {
        ok = ds.x(i)[p] == pixels[static_cast<std::size_t>(i * rows * cols + p)] / 255.0;
      }
    }
    require(ok, "IDX round trip");
  }

  {  // two identical runs give byte-identical artifacts
    const fs::path dir = work_dir(9) / "determinism";
    const std::map<std::string, std::string> small = {
        {"data.train_size", "400"}, {"data.test_size", "100"}, {"train.epochs", "3"},
        {"demo.conf_points", "20"}, {"demo.conf_m", "100"}, {"mixratio.points", "20"}};
    std::vector<std::string> files;
    const Run a(source_config("two_moons_smoothmix.cfg"), dir / "a", small);
    const Run b(source_config("two_moons_smoothmix.cfg"), dir / "b", small);
    for (const Run* run : {&a, &b}) {
      for (const char* cmd : {"train", "certify", "attack-demo", "mixratio"}) run->command(cmd);
    }
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      return s.str();
    };
    bool ok = true;
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a.dir())) {
      const fs::path name = entry.path().filename();
      if (name == "run.cfg") continue;
      ok = ok && fs::exists(b.dir() / name) && slurp(entry.path()) == slurp(b.dir() / name);
      ++compared;
    }
    require(ok && compared >= 6, "determinism (" + std::to_string(compared) + " artifacts)");
  }

  std::string detail = "softmax/SoftLabel, mixup identity, lambda KS, step norm, SmoothAdv ball, "
                       "curve monotonicity, IDX round trip, byte-identical reruns";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f + ";";
  }
  return {failed.empty(), detail};
}

const std::map<int, std::function<Outcome()>>& criteria() {
  static const std::map<int, std::function<Outcome()>> table = {
      {1, gradients},        {2, clopper_pearson}, {3, linear_soundness},
      {4, headline_ordering}, {5, eta_monotonicity}, {6, alpha_steps_flatness},
      {7, miscalibration},   {8, decay_bound},     {9, invariants},
  };
  return table;
}

}  // namespace
}  // namespace smoothmix::acceptance

int main(int argc, char** argv) {
  using smoothmix::acceptance::criteria;
  std::string which = "all";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") which = argv[i + 1];
  }
  std::vector<int> selected;
  if (which == "all") {
    for (const auto& [n, fn] : criteria()) selected.push_back(n);
  } else {
    try {
      selected.push_back(std::stoi(which));
    } catch (const std::exception&) {
    }
    if (selected.empty() || !criteria().count(selected.front())) {
      std::cerr << "usage: acceptance [--criterion 1..9|all]\n";
      return 2;
    }
  }
  bool all_pass = true;
  for (const int n : selected) {
    const auto start = std::chrono::steady_clock::now();
    smoothmix::acceptance::Outcome out;
    try {
      out = criteria().at(n)();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << out.detail << " ["
              << smoothmix::acceptance::fmt(secs, 3) << " s]" << std::endl;
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
