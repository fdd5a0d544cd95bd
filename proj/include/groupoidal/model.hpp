#pragma once

#include "groupoidal/algebra.hpp"
#include "groupoidal/cocycle.hpp"
#include "groupoidal/groupoid.hpp"
#include "groupoidal/measure.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace groupoidal {

struct SchemaError : std::runtime_error {
  std::vector<std::string> errors;  // one "path: message" entry each
  explicit SchemaError(std::vector<std::string> errs)
      : std::runtime_error(errs.empty() ? "schema error" : errs.front()),
        errors(std::move(errs)) {}
};

/// A named finitely supported function; carries an exact rational form
/// whenever every coefficient in the document was rational.
struct NamedElement {
  AlgebraElement<std::complex<double>> value;
  std::optional<AlgebraElement<RationalComplex>> exact;
};

/// Parsed and validated model document. The groupoid lives behind a
/// unique_ptr so elements can hold stable parent pointers.
struct ModelDocument {
  std::unique_ptr<Groupoid> groupoid;
  Cocycle cocycle{Cocycle::degree()};
  std::optional<UnitMeasure> measure;
  std::map<std::string, NamedElement> elements;
  std::vector<std::string> unitaries;  // names of elements treated as K_1 classes
  std::int64_t window{8};
  double tolerance{1e-12};
  std::vector<std::string> suites;
  std::string digest;           // of the input bytes
  std::string canonical_bytes;  // normalized form produced while validating
};

ModelDocument parse_model(const std::string& bytes);

/// Canonical serialization: sorted keys, rationals as [num, den], fixed
/// number formatting. parse . serialize is the identity on canonical bytes.
std::string canonical_serialize(const ModelDocument& doc);

std::string digest_bytes(const std::string& bytes);

enum class CheckStatus { Pass, Fail, Indeterminate };

struct CheckRecord {
  std::string name;
  CheckStatus status{CheckStatus::Pass};
  std::string witness;  // failure witness or recorded numeric values
  double ms{0};
};

struct SuiteReport {
  std::string suite;
  unsigned long long seed{0};
  std::string artifact_version;
  std::string input_digest;
  std::vector<CheckRecord> checks;  // sorted by name
  int n_pass{0}, n_fail{0}, n_indeterminate{0};

  /// 0 all-pass, 1 any-fail, 3 indeterminate-only.
  int exit_code() const {
    if (n_fail > 0) return 1;
    if (n_indeterminate > 0) return 3;
    return 0;
  }
};

/// Executes one of: axioms | algebra | cocycle | bimodule | kms | index | all.
SuiteReport run_suite(const ModelDocument& doc, const std::string& suite,
                      unsigned long long seed);

std::string report_to_json(const SuiteReport& rep);
std::string report_to_text(const SuiteReport& rep);

}  // namespace groupoidal
