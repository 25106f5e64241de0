#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "effilab/densities.hpp"
#include "effilab/functionals.hpp"
#include "effilab/quadrature.hpp"
#include "effilab/records.hpp"

namespace effilab::cli {

enum class Command { Etas, CfQuantile, Epsilon, Deficiency, NpSolve, Simulate, Verify, Scan };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerification = 3;

inline constexpr std::uint64_t kDefaultSeed = 20100101;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  Command command = Command::Etas;
  Family family = Family::GumbelMin;
  double alpha = 0.0;
  double beta = 1.0;
  /// Hand-entered (I, eta2, ..., eta6); overrides quadrature of the density.
  std::optional<EtaSet> etas;
  std::vector<std::size_t> n;
  std::vector<double> u;
  std::vector<double> v;
  std::size_t reps = 100'000;
  std::uint64_t seed = kDefaultSeed;
  double theta = 0.0;
  unsigned threads = 1;
  QuadratureSpec quadrature;
  Format format = Format::Csv;
  std::string out;  ///< empty or "-" for standard output
};

/// Parses argv (including the program name). Values from --config FILE
/// (key=value lines named like the long flags) are applied first and
/// command-line flags override them. EFFILAB_SEED supplies the seed when no
/// --seed is given. Returns nullopt after printing help. Throws UsageError.
std::optional<RunSpec> parse_args(const std::vector<std::string>& argv, std::ostream& out);

/// Executes one command, writing records to `out` (or spec.out).
/// Returns one of the kExit* codes.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-code mapping; what main() calls.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Reads flat key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

}  // namespace effilab::cli
