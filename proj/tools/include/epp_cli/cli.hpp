#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "epp/operators.hpp"
#include "epp/pnorm.hpp"

namespace epp::cli {

enum class ErrorCode { usage, io, format, param, uniqueness, internal };

/// "E_USAGE", "E_IO", ...
const char* code_name(ErrorCode code);
int exit_code(ErrorCode code);

class CliError : public std::runtime_error {
public:
    CliError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct PsfSpec {
    std::string kind = "gaussian";  // gaussian | disk
    double sigma = 2.0;
    double radius = 3.0;
    std::optional<Eigen::Index> size;  // default 4*ceil(sigma)+1 or 2*ceil(radius)+1
    std::string form = "standard";     // standard | verbatim (Gaussian only)

    [[nodiscard]] Psf build() const;
    [[nodiscard]] Eigen::Index resolved_size() const;
};

struct RunConfig {
    std::string command;  // synth | deblur | eval

    // synth
    std::string truth;
    std::string phantom;  // "shapes" when no truth file is given
    Eigen::Index phantom_size = 256;
    std::string truth_output;
    double noise_level = 0.01;
    std::uint64_t seed = 1;
    std::string sidecar;  // synth: JSON output; deblur/eval: JSON input

    // deblur
    std::string input;
    std::string basis = "dct";
    double p = 1.01;
    std::optional<Eigen::Index> k;
    double shrink = 2.0 / 3.0;
    std::optional<Eigen::Index> gcv_max_k;
    IrlsOptions solver;
    std::string xk_output;
    std::string x0_output;

    // eval
    std::string restored;
    std::optional<double> range;
    std::string restored_dir;
    std::string truth_dir;

    // shared
    PsfSpec psf;
    bool psf_given = false;  // any PSF flag set explicitly
    std::string output;
    std::string report;
};

void cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_deblur(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches. Errors are printed to `err` as a single
/// line "epp: error: E_CODE: message"; the return value is the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace epp::cli
