#include "ghzcs/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ghzcs {

json circuit_to_json(const Circuit& circuit) {
  json j;
  j["n_data"] = circuit.n_data;
  j["n_flags"] = circuit.n_flags;
  json gates = json::array();
  for (const Gate& g : circuit.gates) {
    json gj;
    gj["kind"] = gate_kind_name(g.kind);
    gj["qubits"] = g.qubits;
    if (is_rotation(g.kind)) gj["angle"] = g.angle;
    gates.push_back(std::move(gj));
  }
  j["gates"] = std::move(gates);
  j["layers"] = circuit.layers;
  return j;
}

Circuit circuit_from_json(const json& j) {
  Circuit circuit;
  circuit.n_data = j.at("n_data").get<int>();
  circuit.n_flags = j.at("n_flags").get<int>();
  for (const auto& gj : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_name(gj.at("kind").get<std::string>());
    g.qubits = gj.at("qubits").get<std::vector<int>>();
    if (is_rotation(g.kind)) {
      g.angle = gj.at("angle").get<double>();
    } else if (gj.contains("angle")) {
      throw std::invalid_argument("angle only allowed on rotations");
    }
    circuit.gates.push_back(std::move(g));
  }
  circuit.layers = j.at("layers").get<std::vector<std::vector<int>>>();
  circuit.validate();
  return circuit;
}

json flag_plan_to_json(const FlagPlan& plan) {
  json j;
  json pairs = json::array();
  for (auto [a, b] : plan.pairs) pairs.push_back(json::array({a, b}));
  j["pairs"] = std::move(pairs);
  j["covered"] = plan.union_covered;
  j["total_ratio"] = plan.total_ratio;
  j["marginal_gains"] = plan.marginal_gains;
  return j;
}

FlagPlan flag_plan_from_json(const json& j) {
  FlagPlan plan;
  for (const auto& p : j.at("pairs")) {
    plan.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  }
  plan.union_covered = j.at("covered").get<std::vector<int>>();
  plan.total_ratio = j.at("total_ratio").get<double>();
  plan.marginal_gains = j.at("marginal_gains").get<std::vector<int>>();
  return plan;
}

json counts_to_json(const CountsTable& counts) {
  json j;
  j["n_bits"] = counts.n_bits;
  json layout;
  layout["data"] = counts.data_bits;
  layout["flags"] = counts.flag_bits;
  j["bit_layout"] = std::move(layout);
  json c;
  for (const auto& [bits, n] : counts.counts) c[bits] = n;
  j["counts"] = std::move(c);
  return j;
}

CountsTable counts_from_json(const json& j) {
  CountsTable counts;
  counts.n_bits = j.at("n_bits").get<int>();
  counts.data_bits = j.at("bit_layout").at("data").get<std::vector<int>>();
  counts.flag_bits = j.at("bit_layout").at("flags").get<std::vector<int>>();
  for (const auto& [bits, n] : j.at("counts").items()) {
    if (static_cast<int>(bits.size()) != counts.n_bits) {
      throw std::invalid_argument("count key length does not match n_bits");
    }
    counts.counts[bits] = n.get<long long>();
  }
  return counts;
}

json recovery_result_to_json(const RecoveryResult& result) {
  json j;
  j["n_rec"] = result.n_rec;
  j["a"] = result.a;
  j["b"] = result.b;
  j["coherence"] = result.coherence;
  j["theta"] = result.theta;
  j["alpha_used"] = result.alpha_used;
  j["m_samples"] = result.m_samples;
  j["residual_norm"] = result.residual_norm;
  j["low_signal"] = result.low_signal;
  j["converged"] = result.converged;
  return j;
}

RecoveryResult recovery_result_from_json(const json& j) {
  RecoveryResult r;
  r.n_rec = j.at("n_rec").get<int>();
  r.a = j.at("a").get<double>();
  r.b = j.at("b").get<double>();
  r.coherence = j.at("coherence").get<double>();
  r.theta = j.at("theta").get<double>();
  r.alpha_used = j.at("alpha_used").get<double>();
  r.m_samples = j.at("m_samples").get<int>();
  r.residual_norm = j.at("residual_norm").get<double>();
  r.low_signal = j.at("low_signal").get<bool>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

json fidelity_report_to_json(const FidelityReport& report) {
  json j;
  j["population"] = report.population;
  j["coherence"] = report.coherence;
  j["theta"] = report.theta;
  j["f_standard"] = report.f_standard;
  j["f_rotated"] = report.f_rotated;
  j["f_standard_clamped"] = report.f_standard_clamped;
  j["f_rotated_clamped"] = report.f_rotated_clamped;
  j["out_of_range"] = report.out_of_range;
  j["low_signal"] = report.low_signal;
  j["gme_certified"] = report.gme_certified;
  j["retained_fraction"] = report.retained_fraction;
  if (report.ci) {
    json ci;
    auto put = [&](const char* name, const Interval& iv) {
      ci[name] = json{{"ci_low", iv.lo}, {"ci_high", iv.hi}};
    };
    put("population", report.ci->population);
    put("coherence", report.ci->coherence);
    put("theta", report.ci->theta);
    put("f_standard", report.ci->f_standard);
    put("f_rotated", report.ci->f_rotated);
    ci["resamples"] = report.ci->resamples;
    j["ci"] = std::move(ci);
  }
  if (report.mitigation) {
    json m;
    m["rem"] = report.mitigation->rem;
    m["dd"] = report.mitigation->dd;
    m["p01"] = report.mitigation->p01;
    m["p10"] = report.mitigation->p10;
    m["population_raw"] = report.mitigation->population_raw;
    m["coherence_raw"] = report.mitigation->coherence_raw;
    j["mitigation"] = std::move(m);
  }
  return j;
}

ConfusionModel confusion_from_json(const json& j) {
  ConfusionModel model;
  model.p01 = j.at("p01").get<double>();
  model.p10 = j.at("p10").get<double>();
  model.validate();
  return model;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  double parsed = 0.0;
  std::sscanf(buf, "%lf", &parsed);
  if (parsed == value) {
    // try shorter forms that still round-trip
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, value);
      std::sscanf(shorter, "%lf", &parsed);
      if (parsed == value) return shorter;
    }
  }
  return buf;
}

std::string parity_samples_to_csv(const std::vector<ParitySample>& samples) {
  std::ostringstream out;
  out << "# schema: ghzcs.parity_samples.v1\n";
  out << "phi,parity,shots\n";
  for (const ParitySample& s : samples) {
    out << format_double(s.phi) << ',' << format_double(s.parity) << ','
        << s.shots << '\n';
  }
  return out.str();
}

std::vector<ParitySample> parity_samples_from_csv(const std::string& text) {
  std::vector<ParitySample> samples;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "phi,parity,shots") {
        throw std::invalid_argument("unexpected parity CSV header: " + line);
      }
      header_seen = true;
      continue;
    }
    ParitySample s;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lld", &s.phi, &s.parity,
                    &s.shots) != 3) {
      throw std::invalid_argument("malformed parity CSV row: " + line);
    }
    samples.push_back(s);
  }
  if (!header_seen) throw std::invalid_argument("parity CSV has no header");
  return samples;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace ghzcs
