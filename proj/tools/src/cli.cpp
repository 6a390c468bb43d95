#include <algorithm>
#include <sstream>

#include <CLI11.hpp>

#include "epp/error.hpp"
#include "epp_cli/cli.hpp"

namespace epp::cli {

const char* code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::usage: return "E_USAGE";
        case ErrorCode::io: return "E_IO";
        case ErrorCode::format: return "E_FORMAT";
        case ErrorCode::param: return "E_PARAM";
        case ErrorCode::uniqueness: return "E_UNIQUENESS";
        case ErrorCode::internal: return "E_INTERNAL";
    }
    return "E_INTERNAL";
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::usage: return 2;
        case ErrorCode::io: return 3;
        case ErrorCode::format: return 4;
        case ErrorCode::param: return 5;
        case ErrorCode::uniqueness: return 6;
        case ErrorCode::internal: return 1;
    }
    return 1;
}

namespace {

int report_error(std::ostream& err, ErrorCode code, std::string msg) {
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "epp: error: " << code_name(code) << ": " << msg << '\n';
    return exit_code(code);
}

std::vector<CLI::Option*> add_psf_options(CLI::App& app, PsfSpec& psf) {
    return {
        app.add_option("--psf", psf.kind, "PSF kind")->check(CLI::IsMember({"gaussian", "disk"}))->capture_default_str(),
        app.add_option("--sigma", psf.sigma, "Gaussian width")->capture_default_str(),
        app.add_option("--radius", psf.radius, "out-of-focus disk radius")->capture_default_str(),
        app.add_option("--psf-size", psf.size, "PSF support (odd); default 4*ceil(sigma)+1 or 2*ceil(radius)+1"),
        app.add_option("--gaussian-form", psf.form, "standard: exp(-d^2/(2 sigma^2)); verbatim: exp(-sigma^2 d^2/2)")
            ->check(CLI::IsMember({"standard", "verbatim"}))
            ->capture_default_str(),
    };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Edge-preserving projection deblurring", "epp"};
    app.require_subcommand(1);

    CLI::App* synth = app.add_subcommand("synth", "blur (and add noise to) a test image");
    synth->add_option("--truth", c.truth, "ground-truth image (PGM or EPPF); omit to use --phantom");
    synth->add_option("--phantom", c.phantom, "built-in phantom when no --truth is given")
        ->check(CLI::IsMember({"shapes"}))
        ->capture_default_str();
    c.phantom = "shapes";
    synth->add_option("--size", c.phantom_size, "phantom side length")->capture_default_str();
    synth->add_option("--truth-output", c.truth_output, "also write the phantom here");
    synth->add_option("--noise-level", c.noise_level, "||eta|| / ||A x||")->capture_default_str();
    synth->add_option("--seed", c.seed, "noise generator seed")->capture_default_str();
    synth->add_option("--output,-o", c.output, "blurred image (.pgm or EPPF)")->required();
    synth->add_option("--sidecar", c.sidecar, "JSON sidecar describing the problem");
    add_psf_options(*synth, c.psf);

    CLI::App* deblur = app.add_subcommand("deblur", "restore a blurred image");
    deblur->add_option("--input,-i", c.input, "blurred image")->required();
    deblur->add_option("--output,-o", c.output, "restored image");
    deblur->add_option("--xk-output", c.xk_output, "smooth component W_k y_k");
    deblur->add_option("--x0-output", c.x0_output, "edge correction W_0 y_0");
    deblur->add_option("--report", c.report, "JSON report file");
    deblur->add_option("--sidecar", c.sidecar, "take the PSF from a synth sidecar unless PSF flags are given");
    deblur->add_option("--truth", c.truth, "ground truth; adds quality metrics to the report");
    deblur->add_option("--range", c.range, "dynamic range for metrics; default max-min of the truth");
    deblur->add_option("--basis", c.basis, "spectral basis")->check(CLI::IsMember({"dct", "svd"}))->capture_default_str();
    deblur->add_option("--p", c.p, "norm exponent, 1 < p < 2")->capture_default_str();
    deblur->add_option("--k", c.k, "subspace dimension; overrides GCV");
    deblur->add_option("--shrink", c.shrink, "k = round(shrink * GCV argmin)")->capture_default_str();
    deblur->add_option("--gcv-max-k", c.gcv_max_k, "upper end of the GCV search; default n/2");
    deblur->add_option("--max-outer", c.solver.max_outer, "IRLS iteration budget")->capture_default_str();
    deblur->add_option("--outer-tol", c.solver.outer_tol, "IRLS relative step tolerance")->capture_default_str();
    deblur->add_option("--inner-tol", c.solver.inner_tol, "GMRES relative residual tolerance")->capture_default_str();
    deblur->add_option("--gmres-restart", c.solver.gmres_restart, "GMRES restart length")->capture_default_str();
    deblur->add_option("--gmres-max", c.solver.gmres_max, "GMRES iteration budget per solve")->capture_default_str();
    deblur->add_option("--weight-floor", c.solver.weight_floor, "IRLS weight floor relative to max residual")
        ->capture_default_str();
    bool cold_start = false;
    deblur->add_flag("--no-warm-start", cold_start, "start every GMRES solve from zero");
    const auto deblur_psf = add_psf_options(*deblur, c.psf);

    CLI::App* eval = app.add_subcommand("eval", "compare a restored image with the truth");
    eval->add_option("--restored", c.restored, "restored image");
    eval->add_option("--truth", c.truth, "ground-truth image");
    eval->add_option("--restored-dir", c.restored_dir, "batch mode: directory of restored images");
    eval->add_option("--truth-dir", c.truth_dir, "batch mode: truth images with matching file names");
    eval->add_option("--sidecar", c.sidecar, "synth sidecar supplying noise_level");
    eval->add_option("--range", c.range, "dynamic range; default max-min of the truth");
    eval->add_option("--report", c.report, "also write the JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return report_error(err, ErrorCode::usage, e.what());
    }
    c.solver.warm_start = !cold_start;

    try {
        if (synth->parsed()) {
            c.command = "synth";
            cmd_synth(c, out, err);
        } else if (deblur->parsed()) {
            c.command = "deblur";
            for (const CLI::Option* o : deblur_psf) c.psf_given = c.psf_given || o->count() > 0;
            cmd_deblur(c, out, err);
        } else {
            c.command = "eval";
            cmd_eval(c, out, err);
        }
    } catch (const CliError& e) {
        return report_error(err, e.code(), e.what());
    } catch (const UniquenessError& e) {
        return report_error(err, ErrorCode::uniqueness, e.what());
    } catch (const IoError& e) {
        return report_error(err, ErrorCode::io, e.what());
    } catch (const FormatError& e) {
        return report_error(err, ErrorCode::format, e.what());
    } catch (const Error& e) {
        return report_error(err, ErrorCode::param, e.what());
    } catch (const std::exception& e) {
        return report_error(err, ErrorCode::internal, e.what());
    }
    return 0;
}

}  // namespace epp::cli
