#pragma once

// Job orchestration: config ingestion, patch verification, and artifact
// serialization (OBJ meshes, CSV field tables, flat key = value reports).
//
// Config files are flat "key = value" text with [section] headers; sections
// are [job], [surface], [grid], [spin], [output], [tolerances].  Expression
// values use the holomorphic grammar of expr.hpp.  Unknown sections, unknown
// keys, duplicates, and structural keys of a surface source other than the
// selected one are rejected with the offending line number.
//
// Modes: generate (build surface, write artifacts + report), verify (build
// surface, write report only), spin (apply a spin factor field to the built
// surface, then as generate), catalogue (generate + verify every catalogue
// entry into the output directory).
//
// Exit statuses: 0 ok, 1 verification failure, 2 input error.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isogeo/represent.hpp"
#include "isogeo/surface.hpp"

namespace isogeo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JobConfig {
  std::string mode;  // generate | verify | spin | catalogue

  // [surface]
  std::string source;  // catalogue | kenmotsu | weierstrass | spinor
  std::string name;    // catalogue entry
  double mean = 1.0;   // prescribed constant mean curvature
  double a = 1.0;      // Delaunay-family parameter
  Rational ra{1, 1}, rb{-3, 1};     // singly-periodic exponents
  std::string alpha, beta_h, beta_ah;  // spinor data (beta = f conj(g))
  std::string h, h2, omega;            // height / secondary / metric data
  double h1_re = 0, h1_im = 0;         // potential value at the basepoint
  IsoPoint x0{0, 0, 0};

  // [grid]
  GridSpec grid{-1, 1, -1, 1, 41, 41};
  double base_u = 0, base_v = 0;  // snapped to the nearest sample

  // [spin]
  std::string spin_alpha, spin_beta_h, spin_beta_ah;
  std::string spin_rho;  // decimal value or "auto" (base-plane recovery)

  // [output]  (file names, resolved against the output directory)
  std::string obj_path, csv_path, report_path;
  std::vector<std::string> csv_fields;

  // [tolerances]  per-check overrides; fallback applies to the rest
  std::map<std::string, double> tol;
  std::optional<double> tol_fallback;
};

// Parses and fully validates config text.  A nonempty `mode` argument (from
// the command line) supplies the job mode; [job] mode, when also present,
// must agree.  Throws ConfigError with a line number, or ParseError from
// embedded expressions.
JobConfig parse_config(const std::string& text, const std::string& mode = "");

struct VerifyCheck {
  std::string name;
  double max = 0;
  double tol = 0;
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::string source;
  Provenance provenance = Provenance::ClosedForm;
  GridSpec grid{};
  int spacelike_count = 0;
  double mean_min = 0, mean_max = 0;  // measured H range over valid samples
  double curv_min = 0, curv_max = 0;  // measured K range
  std::optional<double> period_v;
  std::string dihedral;

  bool ok() const;
};

// Runs every check applicable to the patch: Gauss-map invariants,
// conformality, structure-equation residuals, prescribed-mean constancy,
// representation cross-checks, v-periodicity (when the period aligns with
// the grid), and the sphere fit for patches that promise one.  Tolerances
// resolve as: per-check override, else fallback, else built-in default.
VerifyReport verify_patch(
    const SurfacePatch& patch,
    const std::map<std::string, double>& overrides = {},
    std::optional<double> fallback = std::nullopt);

// Flat key = value serialization; byte-identical for identical reports.
std::string report_text(const VerifyReport& report);

// ASCII OBJ: "v X Y Z" with (x, y, l) -> (X, Y, Z), 9 significant digits;
// counterclockwise triangles splitting each grid quad along the
// (i, j) -> (i+1, j+1) diagonal.  Needs only grid + jets.
void export_obj(const SurfacePatch& patch, std::ostream& out);

// CSV with header, one row per sample in row-major order.  Fields from
// {u, v, l, x, y, sigma, H, K, Qre, Qim, gauss_res, codazzi_res}.
void export_csv(const SurfacePatch& patch,
                const std::vector<std::string>& fields, std::ostream& out);

// Executes the job, writing artifacts into out_dir (created if missing) and
// progress lines to log.  Returns the exit status for verification results;
// input problems throw.
int run_job(const JobConfig& cfg, const std::string& out_dir,
            std::ostream& log);

}  // namespace isogeo
