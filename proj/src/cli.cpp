#include "rectfree/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rectfree/closedforms.hpp"
#include "rectfree/conv.hpp"
#include "rectfree/error.hpp"
#include "rectfree/measure_io.hpp"
#include "rectfree/rmt.hpp"

namespace rectfree::cli {

using nlohmann::json;

std::vector<double> GridSpec::points() const {
  std::vector<double> x(npts);
  for (int i = 0; i < npts; ++i) x[i] = npts == 1 ? xmin : xmin + (xmax - xmin) * i / (npts - 1);
  return x;
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ParseError("--grid: expected xmin:xmax:npts, got '" + text + "'");
  GridSpec g;
  try {
    std::size_t used = 0;
    g.xmin = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw ParseError("--grid: bad xmin");
    g.xmax = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw ParseError("--grid: bad xmax");
    g.npts = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw ParseError("--grid: bad npts");
  } catch (const std::logic_error&) {
    throw ParseError("--grid: expected xmin:xmax:npts, got '" + text + "'");
  }
  if (!(g.xmax > g.xmin) || g.npts < 2) throw ParseError("--grid: need xmin < xmax and npts >= 2");
  return g;
}

void RunConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("--lambda must lie in [0, 1]");
  if (order < 1) throw InvalidArgument("--order must be >= 1");
  if (q1 < 1 || q2 < 1 || q1 > q2) throw InvalidArgument("--q1/--q2 must satisfy 1 <= q1 <= q2");
  if (trials < 1) throw InvalidArgument("--trials must be positive");
  if (bins < 0) throw InvalidArgument("--bins must be >= 0");
}

json config_json(const RunConfig& c) {
  json j{{"subcommand", c.subcommand}, {"lambda", c.lambda}, {"inputs", c.inputs}, {"order", c.order},
         {"q1", c.q1},  {"q2", c.q2},  {"trials", c.trials},  {"seed", c.seed}};
  j["grid"] = c.grid ? json{{"xmin", c.grid->xmin}, {"xmax", c.grid->xmax}, {"npts", c.grid->npts}} : json();
  j["moments"] = c.moments;
  j["family"] = c.family;
  j["params"] = c.params;
  j["recover"] = c.recover;
  j["bins"] = c.bins;
  j["word"] = c.word;
  return j;
}

namespace {

std::vector<SymmetricMeasure> load_inputs(const RunConfig& c, std::size_t count) {
  if (c.inputs.size() != count)
    throw InvalidArgument(c.subcommand + ": expected " + std::to_string(count) + " measure file(s)");
  std::vector<SymmetricMeasure> out;
  for (const auto& p : c.inputs) out.push_back(load_measure(p));
  return out;
}

double param(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.params.find(key);
  return it == c.params.end() ? fallback : it->second;
}

std::string csv_header(const RunConfig& c) { return "# config: " + config_json(c).dump() + "\n"; }

std::string density_csv(const RunConfig& c, const std::vector<double>& x, const std::vector<double>& f) {
  std::ostringstream os;
  os.precision(17);
  os << csv_header(c) << "x,density\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << f[i] << '\n';
  return os.str();
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += (x[i + 1] - x[i]) * (f[i] + f[i + 1]) / 2;
  return s;
}

// Densities of a recovery on the requested (possibly signed) grid.
std::vector<double> on_grid(const analytic::Recovery& r, const std::vector<double>& grid) {
  std::vector<double> f;
  f.reserve(grid.size());
  for (double x : grid) {
    const auto it = std::lower_bound(r.x.begin(), r.x.end(), std::abs(x));
    f.push_back(it != r.x.end() && *it == std::abs(x) ? r.density[it - r.x.begin()] : 0.0);
  }
  return f;
}

json recovery_json(const analytic::Recovery& r) {
  return {{"atom0", r.atom0},
          {"residual", r.residual},
          {"certified_beta", std::isfinite(r.certified_beta) ? json(r.certified_beta) : json()},
          {"flagged", r.flagged},
          {"min_raw_density", r.min_raw_density}};
}

}  // namespace

CommandResult cmd_convolve(const RunConfig& c) {
  const auto mus = load_inputs(c, 2);
  CommandResult res;
  res.json["lambda"] = c.lambda;
  res.json["order"] = c.order;
  try {
    res.json["moments"] = conv::convolve_moments(mus[0], mus[1], c.lambda, c.order);
    if (c.lambda == 0.0) res.json["lambda0_route"] = conv::convolve_lambda0(mus[0], mus[1], c.order);
    if (c.lambda == 1.0) {
      const auto full = conv::free_convolve_moments(mus[0], mus[1], c.order);
      std::vector<double> even;
      for (int k = 0; k < c.order; ++k) even.push_back(full[2 * k + 1]);
      res.json["free_route"] = even;
    }
  } catch (const Error& e) {
    res.ok = false;
    res.json["moments"] = json();
    res.json["moments_error"] = e.what();
    res.message += std::string("series path: ") + e.what() + "\n";
  }
  if (c.grid) {
    const auto grid = c.grid->points();
    try {
      const auto r = conv::convolve_analytic(mus[0], mus[1], c.lambda, grid);
      res.json["density"] = recovery_json(r);
      res.csv = density_csv(c, grid, on_grid(r, grid));
      if (r.flagged) {
        res.ok = false;
        res.message += "analytic path: normalization residual above threshold\n";
      }
    } catch (const DomainError& e) {
      res.ok = false;
      res.json["density"] = json();
      res.json["density_error"] = std::string(e.what()) +
                                  "; the series-path moments above are unaffected, or retry with a grid "
                                  "closer to the support";
      res.message += std::string("analytic path: ") + e.what() + "\n";
    }
  }
  return res;
}

CommandResult cmd_moments(const RunConfig& c) {
  const auto mus = load_inputs(c, 1);
  CommandResult res;
  res.json["moments"] = moments(mus[0], c.order);
  return res;
}

CommandResult cmd_cumulants(const RunConfig& c) {
  std::vector<double> m = c.moments;
  if (m.empty()) {
    m = moments(load_inputs(c, 1)[0], c.order);
  } else if (!c.inputs.empty()) {
    throw InvalidArgument("cumulants: give either --moments or one measure file");
  }
  const int order = std::min<int>(c.order, static_cast<int>(m.size()));
  CommandResult res;
  res.json["lambda"] = c.lambda;
  res.json["order"] = order;
  res.json["cumulants"] = series::cumulants_from_moments<double>(m, c.lambda, order);
  return res;
}

CommandResult cmd_density(const RunConfig& c) {
  if (!c.grid) throw InvalidArgument("density: --grid is required");
  const auto grid = c.grid->points();
  CommandResult res;
  res.json["lambda"] = c.lambda;
  std::optional<analytic::RectTransform> transform;
  std::optional<std::function<double(double)>> closed;
  if (!c.family.empty()) {
    using namespace closedforms;
    std::optional<CatalogEntry> e;
    if (c.family == "bernoulli_conv")
      e = bernoulli_conv(c.lambda);
    else if (c.family == "rect_gaussian")
      e = rect_gaussian(c.lambda, param(c, "sigma2", 1.0));
    else if (c.family == "rect_cauchy")
      e = rect_cauchy(c.lambda, param(c, "t", 0.5));
    else if (c.family == "rect_stable")
      e = rect_stable(c.lambda, param(c, "alpha", 1.5), param(c, "scale", 1.0));
    else if (c.family == "rect_poisson")
      e = rect_poisson(c.lambda, param(c, "c", 1.0));
    else
      throw InvalidArgument("density: unknown family '" + c.family + "'");
    res.json["family"] = family_name(e->family);
    res.json["parameters"] = e->parameters;
    res.json["density_formula"] = e->density_formula;
    transform = e->transform;
    if (e->density && !c.recover) closed = e->density;
    res.json["derived_not_closed_form"] = !closed.has_value();
  } else {
    transform = analytic::RectTransform::from_measure(load_inputs(c, 1)[0], c.lambda);
    res.json["derived_not_closed_form"] = true;
  }

  std::vector<double> f;
  if (closed) {
    for (double x : grid) f.push_back((*closed)(x));
    const double residual = 1.0 - trapezoid(grid, f);
    res.json["method"] = "closed_form";
    res.json["atom0"] = 0.0;
    res.json["residual"] = residual;
    res.json["certified_beta"] = json();
    res.json["flagged"] = std::abs(residual) > analytic::RecoveryOptions{}.residual_threshold;
    if (res.json["flagged"].get<bool>()) {
      res.ok = false;
      res.message += "density: grid integral differs from 1 beyond the threshold (grid does not cover the support?)\n";
    }
  } else {
    const auto r = analytic::recover_measure(*transform, grid);
    f = on_grid(r, grid);
    res.json["method"] = "recovered";
    res.json.update(recovery_json(r));
    if (r.flagged) {
      res.ok = false;
      res.message += "density: normalization residual above threshold\n";
    }
  }
  res.json["grid_integral"] = trapezoid(grid, f);
  res.csv = density_csv(c, grid, f);
  return res;
}

CommandResult cmd_catalog(const RunConfig& c) {
  CommandResult res;
  res.json = closedforms::catalog_json(c.lambda);
  return res;
}

CommandResult cmd_mc(const RunConfig& c) {
  const auto mus = load_inputs(c, 2);
  rmt::McOptions opt;
  opt.n_moments = std::min(c.order, 3);
  opt.histogram_bins = c.bins;
  const auto report = rmt::mc_convolution(mus[0], mus[1], c.q1, c.q2, c.trials, c.seed, opt);
  CommandResult res;
  res.json = rmt::to_json(report);
  if (c.bins > 0) res.csv = csv_header(c) + rmt::histogram_csv(report.histogram);
  return res;
}

CommandResult cmd_trace(const RunConfig& c) {
  if (c.word.empty()) throw InvalidArgument("trace: --word is required");
  const auto st = rmt::null_ratio_trace(c.q1, c.q2, c.word, c.trials, c.seed);
  CommandResult res;
  res.json = {{"word", c.word},
              {"mean_abs", st.mean_abs},
              {"se_abs", st.se_abs},
              {"mean", {st.mean.real(), st.mean.imag()}},
              {"lambda1_prediction", std::isfinite(st.prediction) ? json(st.prediction) : json()}};
  return res;
}

CommandResult dispatch(const RunConfig& c) {
  c.validate();
  if (c.subcommand == "convolve") return cmd_convolve(c);
  if (c.subcommand == "moments") return cmd_moments(c);
  if (c.subcommand == "cumulants") return cmd_cumulants(c);
  if (c.subcommand == "density") return cmd_density(c);
  if (c.subcommand == "catalog") return cmd_catalog(c);
  if (c.subcommand == "mc") return cmd_mc(c);
  if (c.subcommand == "trace") return cmd_trace(c);
  throw InvalidArgument("unknown subcommand '" + c.subcommand + "'");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  CommandResult res;
  try {
    res = dispatch(config);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const json doc{{"config", config_json(config)}, {"result", res.json}, {"ok", res.ok}};
  const std::string text = doc.dump(2) + "\n";
  if (config.out.empty()) {
    out << text;
    if (res.csv) out << *res.csv;
  } else {
    const std::filesystem::path json_path(config.out);
    auto write = [&](const std::filesystem::path& path, const std::string& body) {
      std::ofstream f(path, std::ios::binary);
      f << body;
      if (!f) err << "error: cannot write " << path.string() << '\n';
      return static_cast<bool>(f);
    };
    bool written = write(json_path, text);
    if (res.csv) {
      auto csv_path = json_path;
      csv_path.replace_extension(".csv");
      written = write(csv_path, *res.csv) && written;
    }
    if (!written) return 1;
  }
  err << res.message;
  return res.ok ? 0 : 1;
}

}  // namespace rectfree::cli
