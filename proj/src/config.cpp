#include "starkg/config.hpp"

#include <cmath>
#include <fstream>

#include "starkg/errors.hpp"

namespace starkg {
namespace {

struct Bump {
  double center = 0.0;
  double width = 1.0;
  cplx amplitude{1.0, 0.0};
};

// C-infinity bump profile exp(1 - 1/(1 - s^2)) on |s| < 1 and its first two
// derivatives with respect to s.
double bump0(double s) {
  const double u = 1.0 - s * s;
  return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
}
double bump1(double s) {
  const double u = 1.0 - s * s;
  if (!(u > 0.0)) return 0.0;
  return bump0(s) * (-2.0 * s / (u * u));
}
double bump2(double s) {
  const double u = 1.0 - s * s;
  if (!(u > 0.0)) return 0.0;
  const double e1 = -2.0 * s / (u * u);
  const double e2 = -2.0 / (u * u) - 8.0 * s * s / (u * u * u);
  return bump0(s) * (e1 * e1 + e2);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const std::exception& ex) {
    throw ConfigError("config is not valid JSON (" + path + "): " + ex.what());
  }
  ExperimentConfig cfg;
  cfg.raw = doc;
  try {
    if (!doc.contains("c") || !doc.contains("a"))
      throw ConfigError("config must provide branch arrays \"c\" and \"a\"");
    cfg.net.c = doc.at("c").get<std::vector<double>>();
    cfg.net.a = doc.at("a").get<std::vector<double>>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError("bad \"c\"/\"a\" arrays in " + path + ": " + ex.what());
  }
  try {
    validate_network(cfg.net);
  } catch (const Error& ex) {
    throw ConfigError("invalid network in " + path + ": " + ex.what());
  }
  return cfg;
}

NetworkFunction function_from_json(const nlohmann::json& spec,
                                   const StarNetwork& net) {
  if (!spec.is_array())
    throw ConfigError("function spec must be an array of bumps");
  std::vector<std::vector<Bump>> per_branch(
      static_cast<std::size_t>(net.n()));
  double radius = 0.0;
  for (const auto& item : spec) {
    try {
      const int branch = item.at("branch").get<int>();
      if (branch < 1 || branch > net.n())
        throw ConfigError("bump branch " + std::to_string(branch) +
                          " outside 1.." + std::to_string(net.n()));
      Bump b;
      b.center = item.at("center").get<double>();
      b.width = item.at("width").get<double>();
      if (!(b.width > 0.0)) throw ConfigError("bump width must be positive");
      const double amp = item.value("amplitude", 1.0);
      const double phase = item.value("phase", 0.0);
      b.amplitude = amp * std::exp(cplx(0.0, phase));
      per_branch[static_cast<std::size_t>(branch - 1)].push_back(b);
      radius = std::max(radius, b.center + b.width);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("bad bump entry: ") + ex.what());
    }
  }
  std::vector<AnalyticRule> rules(static_cast<std::size_t>(net.n()));
  for (int k = 1; k <= net.n(); ++k) {
    auto bumps = per_branch[static_cast<std::size_t>(k - 1)];
    auto make = [bumps](int order) {
      return std::function<cplx(double)>([bumps, order](double x) {
        cplx total{0.0, 0.0};
        for (const Bump& b : bumps) {
          const double s = (x - b.center) / b.width;
          double profile = 0.0;
          switch (order) {
            case 0: profile = bump0(s); break;
            case 1: profile = bump1(s) / b.width; break;
            default: profile = bump2(s) / (b.width * b.width); break;
          }
          total += b.amplitude * profile;
        }
        return total;
      });
    };
    rules[static_cast<std::size_t>(k - 1)] =
        AnalyticRule{make(0), make(1), make(2)};
  }
  return NetworkFunction::analytic(std::move(rules), radius);
}

}  // namespace starkg
