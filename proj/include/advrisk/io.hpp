#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "advrisk/certify.hpp"
#include "advrisk/dualsolve.hpp"
#include "advrisk/ground.hpp"
#include "advrisk/measures.hpp"
#include "advrisk/pipeline.hpp"
#include "advrisk/primalsolve.hpp"

namespace advrisk::io {

inline constexpr int kSchemaVersion = 1;

// JSON instance layout:
//   {"schema_version": 1, "points": [0, 1] or [[x, y], ...], "norm": "l2",
//    "epsilon": 0.6, "mass0": [...], "mass1": [...], "refinement": 1,
//    "dual": {"tol", "max_iters", "seed", "method"},
//    "primal": {"tol", "max_iters", "step_c", "smoothing": "on"|"off", "seed"}}
// refinement, dual and primal are optional.
struct Instance {
  std::vector<std::vector<double>> points;
  bool scalar_points = false;  // points written as plain numbers
  Norm norm = Norm::kL2;
  double epsilon = 0.0;
  std::vector<double> mass0;
  std::vector<double> mass1;
  int refinement = 0;
  PrimalConfig primal;
  DualConfig dual;

  bool operator==(const Instance&) const;
};

struct Problem {
  GroundSet ground;
  TwoClassMeasure measure;
};

// Throws ParseError (syntax, wrong types, with the offending field) and
// ValidationError (lengths, negative masses, schema version, unknown keys).
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);
std::string dump_instance(const Instance& instance);
void save_instance(const std::filesystem::path& path, const Instance& instance);

// Adds `level` evenly spaced interior points on every segment between two
// points at distance <= 2 epsilon, drops new points that duplicate existing
// ones, and sorts all points lexicographically. New points carry no mass.
// level 0 leaves the points and their order untouched.
void refine(std::vector<std::vector<double>>& points, std::vector<double>& mass0,
            std::vector<double>& mass1, Norm norm, double epsilon, int level);

// Refinement followed by neighbor indexing at the instance epsilon.
Problem prepare(const Instance& instance);

struct CertificateRecord {
  Certificate certificate;
  Field f;

  bool operator==(const CertificateRecord&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  int primal_iterations = 0;
  int dual_iterations = 0;
  bool primal_converged = false;
  bool dual_converged = false;
  double wall_ms = -1.0;  // written only when non-negative

  bool operator==(const Provenance&) const = default;
};

struct Result {
  std::string requested_loss;
  double epsilon = 0.0;
  double primal_exp = 0.0;
  double dual_exp = 0.0;
  Field f_exp;
  EtaField eta;
  Coupling coupling0;
  Coupling coupling1;
  std::vector<double> m0;
  std::vector<double> m1;
  std::vector<CertificateRecord> certificates;
  Provenance provenance;

  bool operator==(const Result&) const = default;
};

Result make_result(const PipelineResult& run, LossKind requested, double epsilon,
                   const Provenance& provenance);

// Keys sorted, doubles with 17 significant digits, +/-inf as "inf"/"-inf".
std::string dump_result(const Result& result);
Result parse_result(std::string_view text);
void save_result(const std::filesystem::path& path, const Result& result);
Result load_result(const std::filesystem::path& path);

// Dual couplings as (source, target, mass) triples plus the perturbed masses.
std::string dump_attack(const DualSolution& dual, LossKind loss);

struct SweepRow {
  double eps = 0.0;
  std::string loss;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  int iters = 0;
  double runtime_ms = 0.0;
  bool failed = false;
};

// Header eps,loss,primal,dual,gap,iters,runtime_ms; failed rows carry "failed"
// in the primal, dual and gap columns. runtime_ms has millisecond precision.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Line chart of primal and dual against eps for the successful rows.
void write_sweep_svg(std::ostream& out, const std::vector<SweepRow>& rows);

// Locale-independent shortest text for d with 17 significant digits.
std::string format_double(double d);

// Throws ParseError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);
// Throws WriteError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace advrisk::io
