#include "jpsn/store.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jpsn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

// Lower triangle (including diagonal) in row-major order.
void write_lower_triangle(std::ofstream& out, const MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) out << "\t" << fmt(m(i, j));
}

MatrixXd read_lower_triangle(std::istringstream& in, int p) {
  MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) {
      double v;
      in >> v;
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

}  // namespace

void write_store(const PosteriorSamples& samples, const std::string& dir,
                 const std::map<std::string, std::string>& manifest_extra) {
  fs::create_directories(dir);
  const fs::path base(dir);
  const bool is_jpsn = samples.family == EmissionFamilyKind::jpsn;
  const int p = 2 * samples.n + samples.q;

  {
    json manifest;
    manifest["format"] = "jpsn-store-1";
    manifest["family"] = family_name(samples.family);
    manifest["n"] = samples.n;
    manifest["q"] = samples.q;
    manifest["T"] = samples.T;
    manifest["seed"] = samples.seed;
    manifest["stored_samples"] = samples.sweeps.size();
    json acc = json::array();
    for (double a : samples.acceptance_rates) acc.push_back(a);
    manifest["radius_acceptance"] = acc;
    for (const auto& [k, v] : manifest_extra) manifest[k] = v;
    auto out = open_out(base / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

  {
    auto out = open_out(base / "chain.tsv");
    out << "sample\tK\ttau\tgamma\trho\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      const auto& s = samples.sweeps[b];
      out << b << "\t" << s.K << "\t" << fmt(s.tau) << "\t" << fmt(s.gamma)
          << "\t" << fmt(s.rho) << "\n";
    }
  }

  {
    auto out = open_out(base / "labels.tsv");
    out << "sample";
    for (int t = 0; t < samples.T; ++t) out << "\tz_" << t + 1;
    out << "\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      out << b;
      for (int zt : samples.sweeps[b].z) out << "\t" << zt + 1;
      out << "\n";
    }
  }

  {
    auto out = open_out(base / "transitions.tsv");
    out << "sample\tstate\trow_probs...\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      const auto& pi = samples.sweeps[b].pi;
      for (Eigen::Index j = 0; j < pi.rows(); ++j) {
        out << b << "\t" << j + 1;
        for (Eigen::Index k = 0; k < pi.cols(); ++k) out << "\t" << fmt(pi(j, k));
        out << "\n";
      }
    }
  }

  if (is_jpsn) {
    auto mu = open_out(base / "emission_mu.tsv");
    auto sig = open_out(base / "emission_sigma.tsv");
    auto lam = open_out(base / "emission_lambda.tsv");
    auto scl = open_out(base / "emission_scale.tsv");
    mu << "sample\tstate";
    for (int c = 0; c < p; ++c) mu << "\tmu_" << c + 1;
    mu << "\n";
    sig << "sample\tstate\tsigma_lower_triangle...\n";
    lam << "sample\tstate";
    for (int j = 0; j < samples.q; ++j) lam << "\tlambda_" << j + 1;
    lam << "\n";
    scl << "sample\tstate";
    for (int i = 0; i < samples.n; ++i) scl << "\tc_" << i + 1;
    scl << "\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      const auto& s = samples.sweeps[b];
      for (std::size_t k = 0; k < s.states.size(); ++k) {
        const auto& ip = s.states[k].jpsn;
        mu << b << "\t" << k + 1;
        for (int c = 0; c < p; ++c) mu << "\t" << fmt(ip.mu_tilde[c]);
        mu << "\n";
        sig << b << "\t" << k + 1;
        write_lower_triangle(sig, ip.sigma_tilde);
        sig << "\n";
        lam << b << "\t" << k + 1;
        for (int j = 0; j < samples.q; ++j) lam << "\t" << fmt(ip.lambda[j]);
        lam << "\n";
        scl << b << "\t" << k + 1;
        for (int i = 0; i < samples.n; ++i) scl << "\t" << fmt(ip.scaling.c[i]);
        scl << "\n";
      }
    }
  } else {
    auto out = open_out(base / "emission_baseline.tsv");
    out << "sample\tstate";
    for (int i = 0; i < samples.n; ++i)
      out << "\tloc_" << i + 1 << "\tconc_" << i + 1;
    for (int j = 0; j < samples.q; ++j)
      out << "\tshape_" << j + 1 << "\trate_" << j + 1;
    out << "\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      const auto& s = samples.sweeps[b];
      for (std::size_t k = 0; k < s.states.size(); ++k) {
        const auto& bp = s.states[k].baseline;
        out << b << "\t" << k + 1;
        for (int i = 0; i < samples.n; ++i)
          out << "\t" << fmt(bp.circ_location[i]) << "\t"
              << fmt(bp.circ_concentration[i]);
        for (int j = 0; j < samples.q; ++j)
          out << "\t" << fmt(bp.lin_shape[j]) << "\t" << fmt(bp.lin_rate[j]);
        out << "\n";
      }
    }
  }

  {
    auto out = open_out(base / "imputed.tsv");
    out << "sample";
    for (auto [t, i] : samples.theta_missing_cells)
      out << "\ttheta:" << t + 1 << ":" << i + 1;
    for (auto [t, j] : samples.y_missing_cells)
      out << "\ty:" << t + 1 << ":" << j + 1;
    out << "\n";
    for (std::size_t b = 0; b < samples.sweeps.size(); ++b) {
      const auto& s = samples.sweeps[b];
      out << b;
      for (double v : s.imputed_theta) out << "\t" << fmt(v);
      for (double v : s.imputed_y) out << "\t" << fmt(v);
      out << "\n";
    }
  }
}

std::map<std::string, std::string> read_manifest(const std::string& dir) {
  auto in = open_in(fs::path(dir) / "manifest.json");
  json manifest = json::parse(in);
  std::map<std::string, std::string> out;
  for (auto& [key, value] : manifest.items()) {
    if (value.is_string())
      out[key] = value.get<std::string>();
    else
      out[key] = value.dump();
  }
  return out;
}

PosteriorSamples read_store(const std::string& dir) {
  const fs::path base(dir);
  PosteriorSamples out;
  {
    auto in = open_in(base / "manifest.json");
    json manifest = json::parse(in);
    out.family = parse_family(manifest.at("family").get<std::string>());
    out.n = manifest.at("n").get<int>();
    out.q = manifest.at("q").get<int>();
    out.T = manifest.at("T").get<int>();
    out.seed = manifest.at("seed").get<std::uint64_t>();
    if (manifest.contains("radius_acceptance"))
      for (const auto& v : manifest["radius_acceptance"])
        out.acceptance_rates.push_back(v.get<double>());
  }
  const int p = 2 * out.n + out.q;
  const bool is_jpsn = out.family == EmissionFamilyKind::jpsn;

  {
    auto in = open_in(base / "chain.tsv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t b;
      StoredSweep s;
      ss >> b >> s.K >> s.tau >> s.gamma >> s.rho;
      out.sweeps.push_back(std::move(s));
    }
  }

  {
    auto in = open_in(base / "labels.tsv");
    std::string line;
    std::getline(in, line);
    std::size_t b = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t idx;
      ss >> idx;
      auto& s = out.sweeps.at(b++);
      s.z.resize(out.T);
      for (int t = 0; t < out.T; ++t) {
        ss >> s.z[t];
        s.z[t] -= 1;
      }
    }
  }

  {
    auto in = open_in(base / "transitions.tsv");
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<std::vector<double>>> rows(out.sweeps.size());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t b;
      int state;
      ss >> b >> state;
      std::vector<double> row;
      double v;
      while (ss >> v) row.push_back(v);
      rows.at(b).push_back(std::move(row));
    }
    for (std::size_t b = 0; b < rows.size(); ++b) {
      const auto& r = rows[b];
      if (r.empty()) continue;
      MatrixXd pi(r.size(), r[0].size());
      for (std::size_t j = 0; j < r.size(); ++j)
        for (std::size_t k = 0; k < r[j].size(); ++k) pi(j, k) = r[j][k];
      out.sweeps[b].pi = pi;
    }
  }

  if (is_jpsn) {
    auto mu_in = open_in(base / "emission_mu.tsv");
    auto sig_in = open_in(base / "emission_sigma.tsv");
    auto lam_in = open_in(base / "emission_lambda.tsv");
    auto scl_in = open_in(base / "emission_scale.tsv");
    std::string l1, l2, l3, l4;
    std::getline(mu_in, l1);
    std::getline(sig_in, l2);
    std::getline(lam_in, l3);
    std::getline(scl_in, l4);
    while (std::getline(mu_in, l1) && std::getline(sig_in, l2) &&
           std::getline(lam_in, l3) && std::getline(scl_in, l4)) {
      if (l1.empty()) continue;
      std::istringstream s1(l1), s2(l2), s3(l3), s4(l4);
      std::size_t b;
      int state;
      StoredState st;
      st.jpsn.n = out.n;
      st.jpsn.q = out.q;
      s1 >> b >> state;
      st.jpsn.mu_tilde.resize(p);
      for (int c = 0; c < p; ++c) s1 >> st.jpsn.mu_tilde[c];
      s2 >> b >> state;
      st.jpsn.sigma_tilde = read_lower_triangle(s2, p);
      s3 >> b >> state;
      st.jpsn.lambda.resize(out.q);
      for (int j = 0; j < out.q; ++j) s3 >> st.jpsn.lambda[j];
      s4 >> b >> state;
      st.jpsn.scaling.c.resize(out.n);
      for (int i = 0; i < out.n; ++i) s4 >> st.jpsn.scaling.c[i];
      out.sweeps.at(b).states.push_back(std::move(st));
    }
  } else {
    auto in = open_in(base / "emission_baseline.tsv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t b;
      int state;
      ss >> b >> state;
      StoredState st;
      auto& bp = st.baseline;
      bp.circ_family = (out.family == EmissionFamilyKind::vmlg ||
                        out.family == EmissionFamilyKind::vmlw)
                           ? CircularFamily::von_mises
                           : CircularFamily::wrapped_cauchy;
      bp.lin_family = (out.family == EmissionFamilyKind::vmlg ||
                       out.family == EmissionFamilyKind::wclg)
                          ? LinearFamily::log_gamma
                          : LinearFamily::log_weibull;
      bp.circ_location.resize(out.n);
      bp.circ_concentration.resize(out.n);
      bp.lin_shape.resize(out.q);
      bp.lin_rate.resize(out.q);
      for (int i = 0; i < out.n; ++i)
        ss >> bp.circ_location[i] >> bp.circ_concentration[i];
      for (int j = 0; j < out.q; ++j) ss >> bp.lin_shape[j] >> bp.lin_rate[j];
      out.sweeps.at(b).states.push_back(std::move(st));
    }
  }

  {
    auto in = open_in(base / "imputed.tsv");
    std::string line;
    std::getline(in, line);
    {
      std::istringstream ss(line);
      std::string col;
      ss >> col;  // "sample"
      while (ss >> col) {
        auto p1 = col.find(':');
        auto p2 = col.find(':', p1 + 1);
        const int t = std::stoi(col.substr(p1 + 1, p2 - p1 - 1)) - 1;
        const int v = std::stoi(col.substr(p2 + 1)) - 1;
        if (col.rfind("theta:", 0) == 0)
          out.theta_missing_cells.emplace_back(t, v);
        else
          out.y_missing_cells.emplace_back(t, v);
      }
    }
    std::size_t b = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t idx;
      ss >> idx;
      auto& s = out.sweeps.at(b++);
      s.imputed_theta.resize(out.theta_missing_cells.size());
      s.imputed_y.resize(out.y_missing_cells.size());
      for (auto& v : s.imputed_theta) ss >> v;
      for (auto& v : s.imputed_y) ss >> v;
    }
  }
  return out;
}

}  // namespace jpsn
