#include "advrisk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"
#include "json.hpp"

namespace advrisk::io {

using nlohmann::json;

std::string format_double(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

// ---- canonical writer ----

bool is_flat(const json& j) {
  return std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
}

void write_json(const json& j, int indent, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out.append(static_cast<std::size_t>(indent + 2), ' ');
        out += json(it.key()).dump();
        out += ": ";
        write_json(it.value(), indent + 2, out);
      }
      out += "\n";
      out.append(static_cast<std::size_t>(indent), ' ');
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_flat(j)) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write_json(j[k], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out.append(static_cast<std::size_t>(indent + 2), ' ');
        write_json(j[k], indent + 2, out);
      }
      out += "\n";
      out.append(static_cast<std::size_t>(indent), ' ');
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string canonical(const json& j) {
  std::string out;
  write_json(j, 0, out);
  out += "\n";
  return out;
}

json ext_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json ext_array(std::span<const double> values) {
  json arr = json::array();
  for (double v : values) arr.push_back(ext_json(v));
  return arr;
}

json coupling_json(const Coupling& c) {
  json arr = json::array();
  for (const Transport& t : c.entries) arr.push_back(json::array({t.source, t.target, t.mass}));
  return arr;
}

// ---- reader helpers ----

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw Error(Errc::kParseError, "field '" + field + "': " + what);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::kValidationError, what); }

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::kParseError, e.what());
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  parse_fail(field, "expected a number");
}

double finite_number(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!std::isfinite(v)) invalid(field + " must be finite");
  return v;
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(number(j[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::int64_t integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) parse_fail(field, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) parse_fail(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& field) {
  if (!j.is_boolean()) parse_fail(field, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& field) {
  if (!j.is_string()) parse_fail(field, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      invalid("unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
    }
  }
}

void check_schema(const json& root) {
  if (!root.is_object()) throw Error(Errc::kParseError, "top level must be a JSON object");
  const std::int64_t version = integer(require(root, "schema_version", ""), "schema_version");
  if (version != kSchemaVersion) invalid("unsupported schema_version " + std::to_string(version));
}

void check_masses(const std::vector<double>& m, const std::string& name, std::size_t n) {
  if (m.size() != n) {
    invalid(name + " has " + std::to_string(m.size()) + " entries, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i])) invalid(name + "[" + std::to_string(i) + "] is not finite");
    if (m[i] < 0.0) invalid(name + "[" + std::to_string(i) + "] is negative");
  }
}

Coupling coupling_from(const json& j, const std::string& field, std::size_t n) {
  if (!j.is_array()) parse_fail(field, "expected an array of triples");
  Coupling c;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = field + "[" + std::to_string(k) + "]";
    const json& e = j[k];
    if (!e.is_array() || e.size() != 3) parse_fail(at, "expected [source, target, mass]");
    const std::uint64_t s = unsigned_integer(e[0], at + "[0]");
    const std::uint64_t t = unsigned_integer(e[1], at + "[1]");
    if (s >= n || t >= n) invalid(at + " references a point outside the ground set");
    c.entries.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t),
                         number(e[2], at + "[2]")});
  }
  return c;
}

}  // namespace

// ---- instances ----

bool Instance::operator==(const Instance& o) const {
  return points == o.points && scalar_points == o.scalar_points && norm == o.norm &&
         epsilon == o.epsilon && mass0 == o.mass0 && mass1 == o.mass1 &&
         refinement == o.refinement && primal.tol == o.primal.tol &&
         primal.max_iters == o.primal.max_iters && primal.step_c == o.primal.step_c &&
         primal.smoothing == o.primal.smoothing && primal.seed == o.primal.seed &&
         dual.tol == o.dual.tol && dual.max_iters == o.dual.max_iters && dual.seed == o.dual.seed &&
         dual.method == o.dual.method;
}

Instance parse_instance(std::string_view text) {
  const json root = parse_text(text);
  check_schema(root);
  reject_unknown(root,
                 {"schema_version", "points", "norm", "epsilon", "mass0", "mass1", "refinement",
                  "dual", "primal"},
                 "");
  Instance inst;

  const json& pts = require(root, "points", "");
  if (!pts.is_array() || pts.empty()) parse_fail("points", "expected a non-empty array");
  inst.scalar_points = pts[0].is_number();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::string at = "points[" + std::to_string(k) + "]";
    if (inst.scalar_points) {
      if (!pts[k].is_number()) parse_fail(at, "expected a number like the other points");
      inst.points.push_back({finite_number(pts[k], at)});
    } else {
      if (!pts[k].is_array() || pts[k].empty()) parse_fail(at, "expected a coordinate array");
      std::vector<double> p;
      for (std::size_t c = 0; c < pts[k].size(); ++c) {
        p.push_back(finite_number(pts[k][c], at + "[" + std::to_string(c) + "]"));
      }
      if (!inst.points.empty() && p.size() != inst.points.front().size()) {
        invalid(at + " has " + std::to_string(p.size()) + " coordinates, expected " +
                std::to_string(inst.points.front().size()));
      }
      inst.points.push_back(std::move(p));
    }
  }

  if (const auto it = root.find("norm"); it != root.end()) {
    try {
      inst.norm = parse_norm(string(*it, "norm"));
    } catch (const Error& e) {
      if (e.code() == Errc::kParseError) throw;
      invalid("norm: " + e.detail());
    }
  }
  inst.epsilon = finite_number(require(root, "epsilon", ""), "epsilon");
  if (inst.epsilon < 0.0) invalid("epsilon is negative");

  inst.mass0 = number_array(require(root, "mass0", ""), "mass0");
  inst.mass1 = number_array(require(root, "mass1", ""), "mass1");
  check_masses(inst.mass0, "mass0", inst.points.size());
  check_masses(inst.mass1, "mass1", inst.points.size());

  if (const auto it = root.find("refinement"); it != root.end()) {
    const std::int64_t r = integer(*it, "refinement");
    if (r < 0 || r > 64) invalid("refinement must lie in [0, 64]");
    inst.refinement = static_cast<int>(r);
  }

  if (const auto it = root.find("dual"); it != root.end()) {
    const json& d = *it;
    if (!d.is_object()) parse_fail("dual", "expected an object");
    reject_unknown(d, {"tol", "max_iters", "seed", "method"}, "dual");
    if (d.contains("tol")) inst.dual.tol = finite_number(d["tol"], "dual.tol");
    if (d.contains("max_iters")) inst.dual.max_iters = static_cast<int>(integer(d["max_iters"], "dual.max_iters"));
    if (d.contains("seed")) inst.dual.seed = unsigned_integer(d["seed"], "dual.seed");
    if (d.contains("method")) {
      try {
        inst.dual.method = parse_dual_method(string(d["method"], "dual.method"));
      } catch (const Error& e) {
        if (e.code() == Errc::kParseError) throw;
        invalid("dual.method: " + e.detail());
      }
    }
    if (!(inst.dual.tol > 0.0) || inst.dual.max_iters < 0) invalid("dual config out of range");
  }
  if (const auto it = root.find("primal"); it != root.end()) {
    const json& p = *it;
    if (!p.is_object()) parse_fail("primal", "expected an object");
    reject_unknown(p, {"tol", "max_iters", "step_c", "smoothing", "seed"}, "primal");
    if (p.contains("tol")) inst.primal.tol = finite_number(p["tol"], "primal.tol");
    if (p.contains("max_iters")) inst.primal.max_iters = static_cast<int>(integer(p["max_iters"], "primal.max_iters"));
    if (p.contains("step_c")) inst.primal.step_c = finite_number(p["step_c"], "primal.step_c");
    if (p.contains("seed")) inst.primal.seed = unsigned_integer(p["seed"], "primal.seed");
    if (p.contains("smoothing")) {
      const json& s = p["smoothing"];
      if (s.is_boolean()) {
        inst.primal.smoothing = s.get<bool>();
      } else {
        const std::string v = string(s, "primal.smoothing");
        if (v != "on" && v != "off") invalid("primal.smoothing must be \"on\" or \"off\"");
        inst.primal.smoothing = v == "on";
      }
    }
    if (!(inst.primal.tol > 0.0) || inst.primal.max_iters < 0 || !(inst.primal.step_c > 0.0)) {
      invalid("primal config out of range");
    }
  }
  return inst;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kParseError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance load_instance(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_instance(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string dump_instance(const Instance& inst) {
  json root;
  root["schema_version"] = kSchemaVersion;
  json pts = json::array();
  for (const auto& p : inst.points) {
    if (inst.scalar_points) {
      pts.push_back(p.at(0));
    } else {
      pts.push_back(p);
    }
  }
  root["points"] = pts;
  root["norm"] = std::string(norm_name(inst.norm));
  root["epsilon"] = inst.epsilon;
  root["mass0"] = inst.mass0;
  root["mass1"] = inst.mass1;
  root["refinement"] = inst.refinement;
  root["dual"] = {{"tol", inst.dual.tol},
                  {"max_iters", inst.dual.max_iters},
                  {"seed", inst.dual.seed},
                  {"method", std::string(dual_method_name(inst.dual.method))}};
  root["primal"] = {{"tol", inst.primal.tol},
                    {"max_iters", inst.primal.max_iters},
                    {"step_c", inst.primal.step_c},
                    {"smoothing", inst.primal.smoothing ? "on" : "off"},
                    {"seed", inst.primal.seed}};
  return canonical(root);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kWriteError, "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(Errc::kWriteError, "write to '" + path.string() + "' failed");
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  write_text_file(path, dump_instance(instance));
}

void refine(std::vector<std::vector<double>>& points, std::vector<double>& mass0,
            std::vector<double>& mass1, Norm norm, double epsilon, int level) {
  if (level <= 0 || points.empty()) return;
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  double scale = 1.0;
  for (const auto& p : points) {
    for (double c : p) scale = std::max(scale, std::abs(c));
  }
  const double same = 1e-12 * scale;
  auto duplicate = [&](const std::vector<double>& q) {
    for (const auto& p : points) {
      bool eq = true;
      for (std::size_t c = 0; c < dim && eq; ++c) eq = std::abs(p[c] - q[c]) <= same;
      if (eq) return true;
    }
    return false;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = distance(points[a], points[b], norm);
      if (d == 0.0 || d > 2.0 * epsilon) continue;
      for (int k = 1; k <= level; ++k) {
        const double t = static_cast<double>(k) / (level + 1);
        std::vector<double> q(dim);
        for (std::size_t c = 0; c < dim; ++c) q[c] = points[a][c] + t * (points[b][c] - points[a][c]);
        if (duplicate(q)) continue;
        points.push_back(std::move(q));
        mass0.push_back(0.0);
        mass1.push_back(0.0);
      }
    }
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return points[x] < points[y]; });
  std::vector<std::vector<double>> p2;
  std::vector<double> a2, b2;
  for (std::size_t k : order) {
    p2.push_back(std::move(points[k]));
    a2.push_back(mass0[k]);
    b2.push_back(mass1[k]);
  }
  points = std::move(p2);
  mass0 = std::move(a2);
  mass1 = std::move(b2);
}

Problem prepare(const Instance& instance) {
  auto points = instance.points;
  auto mass0 = instance.mass0;
  auto mass1 = instance.mass1;
  refine(points, mass0, mass1, instance.norm, instance.epsilon, instance.refinement);
  Problem problem{build_ground(points, instance.norm, instance.epsilon),
                  TwoClassMeasure{std::move(mass0), std::move(mass1)}};
  validate_measure(problem.measure, problem.ground.size());
  return problem;
}

// ---- results ----

Result make_result(const PipelineResult& run, LossKind requested, double epsilon,
                   const Provenance& provenance) {
  Result r;
  r.requested_loss = std::string(loss_name(requested));
  r.epsilon = epsilon;
  r.primal_exp = run.primal.risk;
  r.dual_exp = run.dual.objective;
  r.f_exp = run.primal.f;
  r.eta = run.eta;
  r.coupling0 = run.dual.coupling0;
  r.coupling1 = run.dual.coupling1;
  r.m0 = run.dual.m0;
  r.m1 = run.dual.m1;
  for (std::size_t k = 0; k < run.certificates.size(); ++k) {
    r.certificates.push_back({run.certificates[k], run.fields[k]});
  }
  r.provenance = provenance;
  return r;
}

std::string dump_result(const Result& r) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["requested_loss"] = r.requested_loss;
  root["epsilon"] = ext_json(r.epsilon);
  root["primal_exp"] = ext_json(r.primal_exp);
  root["dual_exp"] = ext_json(r.dual_exp);
  root["f_exp"] = ext_array(r.f_exp);
  root["eta_hat"] = ext_array(r.eta);
  root["coupling0"] = coupling_json(r.coupling0);
  root["coupling1"] = coupling_json(r.coupling1);
  root["m0"] = ext_array(r.m0);
  root["m1"] = ext_array(r.m1);
  json certs = json::array();
  for (const auto& rec : r.certificates) {
    const Certificate& c = rec.certificate;
    certs.push_back({{"loss", c.loss},
                     {"f", ext_array(rec.f)},
                     {"primal", ext_json(c.primal)},
                     {"dual", ext_json(c.dual)},
                     {"gap", ext_json(c.gap)},
                     {"slack_sup_r1", ext_json(c.slack_sup_r1)},
                     {"slack_sup_r0", ext_json(c.slack_sup_r0)},
                     {"slack_pointwise", ext_json(c.slack_pointwise)},
                     {"support_violation", ext_json(c.support_violation)},
                     {"winf_ok0", c.winf_ok0},
                     {"winf_ok1", c.winf_ok1},
                     {"diagnostic_only", c.diagnostic_only}});
  }
  root["certificates"] = certs;
  json prov = {{"seed", r.provenance.seed},
               {"primal_iterations", r.provenance.primal_iterations},
               {"dual_iterations", r.provenance.dual_iterations},
               {"primal_converged", r.provenance.primal_converged},
               {"dual_converged", r.provenance.dual_converged}};
  if (r.provenance.wall_ms >= 0.0) prov["wall_ms"] = r.provenance.wall_ms;
  root["provenance"] = prov;
  return canonical(root);
}

Result parse_result(std::string_view text) {
  const json root = parse_text(text);
  check_schema(root);
  reject_unknown(root,
                 {"schema_version", "requested_loss", "epsilon", "primal_exp", "dual_exp", "f_exp",
                  "eta_hat", "coupling0", "coupling1", "m0", "m1", "certificates", "provenance"},
                 "");
  Result r;
  r.requested_loss = string(require(root, "requested_loss", ""), "requested_loss");
  r.epsilon = number(require(root, "epsilon", ""), "epsilon");
  r.primal_exp = number(require(root, "primal_exp", ""), "primal_exp");
  r.dual_exp = number(require(root, "dual_exp", ""), "dual_exp");
  r.f_exp = number_array(require(root, "f_exp", ""), "f_exp");
  const std::size_t n = r.f_exp.size();
  r.eta = number_array(require(root, "eta_hat", ""), "eta_hat");
  r.m0 = number_array(require(root, "m0", ""), "m0");
  r.m1 = number_array(require(root, "m1", ""), "m1");
  if (r.eta.size() != n || r.m0.size() != n || r.m1.size() != n) {
    invalid("field lengths disagree with f_exp");
  }
  r.coupling0 = coupling_from(require(root, "coupling0", ""), "coupling0", n);
  r.coupling1 = coupling_from(require(root, "coupling1", ""), "coupling1", n);
  const json& certs = require(root, "certificates", "");
  if (!certs.is_array()) parse_fail("certificates", "expected an array");
  for (std::size_t k = 0; k < certs.size(); ++k) {
    const std::string at = "certificates[" + std::to_string(k) + "]";
    const json& c = certs[k];
    if (!c.is_object()) parse_fail(at, "expected an object");
    CertificateRecord rec;
    Certificate& cert = rec.certificate;
    cert.loss = string(require(c, "loss", at), at + ".loss");
    rec.f = number_array(require(c, "f", at), at + ".f");
    if (rec.f.size() != n) invalid(at + ".f has the wrong length");
    cert.primal = number(require(c, "primal", at), at + ".primal");
    cert.dual = number(require(c, "dual", at), at + ".dual");
    cert.gap = number(require(c, "gap", at), at + ".gap");
    cert.slack_sup_r1 = number(require(c, "slack_sup_r1", at), at + ".slack_sup_r1");
    cert.slack_sup_r0 = number(require(c, "slack_sup_r0", at), at + ".slack_sup_r0");
    cert.slack_pointwise = number(require(c, "slack_pointwise", at), at + ".slack_pointwise");
    cert.support_violation = number(require(c, "support_violation", at), at + ".support_violation");
    cert.winf_ok0 = boolean(require(c, "winf_ok0", at), at + ".winf_ok0");
    cert.winf_ok1 = boolean(require(c, "winf_ok1", at), at + ".winf_ok1");
    cert.diagnostic_only = boolean(require(c, "diagnostic_only", at), at + ".diagnostic_only");
    r.certificates.push_back(std::move(rec));
  }
  const json& prov = require(root, "provenance", "");
  if (!prov.is_object()) parse_fail("provenance", "expected an object");
  r.provenance.seed = unsigned_integer(require(prov, "seed", "provenance"), "provenance.seed");
  r.provenance.primal_iterations =
      static_cast<int>(integer(require(prov, "primal_iterations", "provenance"), "provenance.primal_iterations"));
  r.provenance.dual_iterations =
      static_cast<int>(integer(require(prov, "dual_iterations", "provenance"), "provenance.dual_iterations"));
  r.provenance.primal_converged =
      boolean(require(prov, "primal_converged", "provenance"), "provenance.primal_converged");
  r.provenance.dual_converged =
      boolean(require(prov, "dual_converged", "provenance"), "provenance.dual_converged");
  if (prov.contains("wall_ms")) r.provenance.wall_ms = number(prov["wall_ms"], "provenance.wall_ms");
  return r;
}

void save_result(const std::filesystem::path& path, const Result& result) {
  write_text_file(path, dump_result(result));
}

Result load_result(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_result(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string dump_attack(const DualSolution& dual, LossKind loss) {
  json root;
  root["loss"] = std::string(loss_name(loss));
  root["objective"] = ext_json(dual_objective(Loss{loss}, dual.m0, dual.m1));
  root["class0"] = coupling_json(dual.coupling0);
  root["class1"] = coupling_json(dual.coupling1);
  root["m0"] = ext_array(dual.m0);
  root["m1"] = ext_array(dual.m1);
  return canonical(root);
}

// ---- sweeps ----

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "eps,loss,primal,dual,gap,iters,runtime_ms\n";
  for (const SweepRow& r : rows) {
    char ms[32];
    const auto res = std::to_chars(ms, ms + sizeof ms, r.runtime_ms, std::chars_format::fixed, 3);
    out << format_double(r.eps) << ',' << r.loss << ',';
    if (r.failed) {
      out << "failed,failed,failed,";
    } else {
      out << format_double(r.primal) << ',' << format_double(r.dual) << ',' << format_double(r.gap)
          << ',';
    }
    out << r.iters << ',' << std::string_view(ms, static_cast<std::size_t>(res.ptr - ms)) << '\n';
  }
}

void write_sweep_svg(std::ostream& out, const std::vector<SweepRow>& rows) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  std::vector<const SweepRow*> ok;
  for (const SweepRow& r : rows) {
    if (!r.failed && std::isfinite(r.primal) && std::isfinite(r.dual)) ok.push_back(&r);
  }
  double x0 = 0.0, x1 = 1.0, y1 = 1.0;
  if (!ok.empty()) {
    x0 = ok.front()->eps;
    x1 = ok.front()->eps;
    y1 = 0.0;
    for (const SweepRow* r : ok) {
      x0 = std::min(x0, r->eps);
      x1 = std::max(x1, r->eps);
      y1 = std::max({y1, r->primal, r->dual});
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 <= 0.0) y1 = 1.0;
    y1 *= 1.05;
  }
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  auto py = [&](double y) { return kH - kBottom - y / y1 * (kH - kTop - kBottom); };
  auto polyline = [&](auto value, const char* colour, const char* dash) {
    out << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"" << dash
        << " points=\"";
    for (std::size_t k = 0; k < ok.size(); ++k) {
      if (k) out << ' ';
      out << format_double(px(ok[k]->eps)) << ',' << format_double(py(value(*ok[k])));
    }
    out << "\"/>\n";
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y1 * t / 4.0;
    out << "  <text x=\"" << format_double(px(xv)) << "\" y=\"" << kH - kBottom + 18
        << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1e4) / 1e4) << "</text>\n";
    out << "  <text x=\"" << kLeft - 6 << "\" y=\"" << format_double(py(yv) + 4)
        << "\" text-anchor=\"end\">" << format_double(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  out << "  <text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">epsilon</text>\n";
  polyline([](const SweepRow& r) { return r.primal; }, "#1f77b4", "");
  polyline([](const SweepRow& r) { return r.dual; }, "#d62728", " stroke-dasharray=\"6 4\"");
  out << "  <text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 12
      << "\" fill=\"#1f77b4\">primal</text>\n";
  out << "  <text x=\"" << kLeft + 70 << "\" y=\"" << kTop + 12 << "\" fill=\"#d62728\">dual</text>\n";
  out << "</svg>\n";
}

}  // namespace advrisk::io
