// fadekit command-line front end: every subcommand prints machine-readable
// CSV or JSON on stdout; diagnostics go to stderr.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fadekit/fadekit.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto c1 = text.find(':');
    const auto c2 = text.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw CLI::ValidationError("grid", "expected a:b:n");
    try {
        g.lo = std::stod(text.substr(0, c1));
        g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.n = std::stoul(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("grid", "expected a:b:n with numeric fields");
    }
    if (g.n < 1) throw CLI::ValidationError("grid", "n must be >= 1");
    return g;
}

void print_row(double x, double value) {
    std::printf("%.17g,%.17g\n", x, value);
}

ordered_json candidate_json(const fadekit::FitCandidate& cand) {
    ordered_json j;
    j["model"] = cand.model;
    j["mu"] = cand.mu ? ordered_json(*cand.mu) : ordered_json(nullptr);
    j["m"] = cand.m ? ordered_json(*cand.m) : ordered_json(nullptr);
    j["kappa"] = cand.kappa ? ordered_json(*cand.kappa) : ordered_json(nullptr);
    j["epsilon"] = cand.epsilon;
    return j;
}

int run_mixture(const fadekit::ShadowedParams& prm) {
    const fadekit::MixtureModel model = fadekit::build_mixture(prm);
    ordered_json j;
    j["regime"] = model.regime == fadekit::Regime::Proper ? "proper" : "improper";
    j["components"] = ordered_json::array();
    fadekit::CompensatedSum wsum, mean;
    for (const auto& comp : model.components) {
        j["components"].push_back(ordered_json{
            {"weight", comp.weight}, {"shape", comp.shape}, {"scale", comp.scale}});
        wsum.add(comp.weight);
        mean.add(comp.weight * comp.shape * comp.scale);
    }
    j["checks"] = ordered_json{{"weight_sum", wsum.value()}, {"mean", mean.value()}};
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

int run_eval(const fadekit::ShadowedParams& prm, const std::string& what,
             const GridSpec& grid, bool log_spaced) {
    if (log_spaced && !(grid.lo > 0.0))
        throw CLI::ValidationError("grid", "--log needs a positive lower bound");
    const fadekit::MixtureModel model = fadekit::build_mixture(prm);
    const std::vector<double> xs = log_spaced
                                       ? fadekit::log_grid(grid.lo, grid.hi, grid.n)
                                       : fadekit::linear_grid(grid.lo, grid.hi, grid.n);
    std::printf("x,value\n");
    for (double x : xs) {
        double v;
        if (what == "pdf")
            v = fadekit::pdf(model, x);
        else if (what == "cdf")
            v = fadekit::cdf(model, x);
        else
            v = fadekit::mgf_mixture(model, x);
        print_row(x, v);
    }
    return 0;
}

int run_capacity(const fadekit::ShadowedParams& prm, const GridSpec& db_grid) {
    const std::vector<double> dbs = fadekit::linear_grid(db_grid.lo, db_grid.hi, db_grid.n);
    std::printf("snr_db,capacity_bpshz\n");
    for (double db : dbs) {
        fadekit::ShadowedParams at = prm;
        at.gamma_bar = std::pow(10.0, db / 10.0);
        print_row(db, fadekit::shadowed_capacity(fadekit::build_mixture(at)));
    }
    return 0;
}

int run_sample(const fadekit::ShadowedParams& prm, std::size_t n, std::uint64_t seed,
               const std::string& out_path, const std::string& method_name) {
    fadekit::SampleMethod method = fadekit::SampleMethod::Auto;
    if (method_name == "mixture") method = fadekit::SampleMethod::ComponentMixture;
    if (method_name == "gamma-sum") method = fadekit::SampleMethod::GammaSum;
    fadekit::RngState rng(seed);
    const std::vector<double> draws = fadekit::sample(prm, n, rng, method);
    std::FILE* out = stdout;
    if (out_path != "-") {
        out = std::fopen(out_path.c_str(), "w");
        if (out == nullptr) {
            std::fprintf(stderr, "fadekit: cannot open '%s' for writing\n", out_path.c_str());
            return 1;
        }
    }
    for (double v : draws) std::fprintf(out, "%.17g\n", v);
    if (out != stdout) std::fclose(out);
    return 0;
}

int run_fit(const std::string& in_path, const std::string& format_name, int mu_max,
            int m_max, const std::string& models_csv) {
    fadekit::SampleFormat format = fadekit::SampleFormat::Plain;
    if (format_name == "csv" ||
        (format_name == "auto" && in_path.size() > 4 &&
         in_path.substr(in_path.size() - 4) == ".csv"))
        format = fadekit::SampleFormat::Csv;
    std::ifstream in(in_path);
    if (!in) {
        std::fprintf(stderr, "fadekit: cannot open '%s'\n", in_path.c_str());
        return 1;
    }
    fadekit::ModelSet models{false, false, false};
    std::stringstream ss(models_csv);
    std::string tag;
    while (std::getline(ss, tag, ',')) {
        if (tag == "shadowed_int")
            models.shadowed_int = true;
        else if (tag == "rician")
            models.rician = true;
        else if (tag == "nakagami")
            models.nakagami = true;
        else {
            std::fprintf(stderr, "fadekit: unknown model class '%s'\n", tag.c_str());
            return 1;
        }
    }
    const fadekit::EmpiricalSample sample = fadekit::load_samples(in, format);
    const fadekit::FitResult result = fadekit::fit(sample, mu_max, m_max, models);
    ordered_json j;
    j["model"] = result.best.model;
    j["gamma_bar"] = result.gamma_bar;
    j["kappa"] = result.best.kappa ? ordered_json(*result.best.kappa) : ordered_json(nullptr);
    j["mu"] = result.best.mu ? ordered_json(*result.best.mu) : ordered_json(nullptr);
    j["m"] = result.best.m ? ordered_json(*result.best.m) : ordered_json(nullptr);
    j["epsilon"] = result.best.epsilon;
    j["candidates"] = ordered_json::array();
    for (const auto& cand : result.candidates) j["candidates"].push_back(candidate_json(cand));
    j["grid"] = ordered_json{{"n_points", result.eval_points.size()},
                             {"floor_p", result.floor_p},
                             {"x_min", result.eval_points.front()},
                             {"x_max", result.eval_points.back()}};
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

int run_converge(double kappa, int mu, double gbar, const std::vector<int>& m_list) {
    const fadekit::ConvergenceReport report =
        fadekit::convergence_gap(kappa, mu, gbar, m_list);
    std::printf("m,sup_gap\n");
    for (std::size_t i = 0; i < report.m_values.size(); ++i)
        std::printf("%d,%.17g\n", report.m_values[i], report.sup_gaps[i]);
    return 0;
}

int run_approx_rician(double k_factor, double gbar, const std::vector<int>& m_list) {
    std::printf("m,sup_pdf_gap\n");
    for (int m : m_list)
        std::printf("%d,%.17g\n", m, fadekit::rician_approx_pdf_gap(k_factor, m, gbar));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact statistics toolkit for kappa-mu shadowed fading with integer "
                 "fading parameters"};
    app.require_subcommand(1);
    app.footer("FADEKIT_THREADS caps internal parallelism (0 or unset = auto).");

    fadekit::ShadowedParams prm{1.0, 1.0, 1, 1};
    std::string what = "pdf", grid_text, out_path = "-", method_name = "auto";
    std::string in_path, format_name = "auto", models_csv = "shadowed_int,rician,nakagami";
    std::vector<int> m_list;
    std::size_t n_draws = 1;
    std::uint64_t seed = 1;
    int mu_max = 8, m_max = 8;
    double k_factor = 1.0;
    bool log_spaced = false;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--gbar", prm.gamma_bar, "mean SNR (linear)")->required();
        cmd->add_option("--kappa", prm.kappa, "LOS-to-scatter power ratio")->required();
        cmd->add_option("--mu", prm.mu, "number of clusters (integer >= 1)")->required();
        cmd->add_option("--m", prm.m, "LOS fluctuation severity (integer >= 1)")->required();
    };

    CLI::App* mixture = app.add_subcommand("mixture", "print the Gamma-mixture components as JSON");
    add_model_flags(mixture);

    CLI::App* eval = app.add_subcommand("eval", "evaluate pdf/cdf/mgf on a grid as CSV");
    add_model_flags(eval);
    eval->add_option("--what", what, "pdf, cdf, or mgf")
        ->check(CLI::IsMember({"pdf", "cdf", "mgf"}))
        ->required();
    eval->add_option("--grid", grid_text, "a:b:n evaluation grid")->required();
    eval->add_flag("--log", log_spaced, "log-spaced grid (requires a > 0)");

    CLI::App* capacity = app.add_subcommand("capacity", "ergodic capacity versus SNR in dB as CSV");
    capacity->add_option("--kappa", prm.kappa, "LOS-to-scatter power ratio")->required();
    capacity->add_option("--mu", prm.mu, "number of clusters (integer >= 1)")->required();
    capacity->add_option("--m", prm.m, "LOS fluctuation severity (integer >= 1)")->required();
    capacity->add_option("--gbar-db-grid", grid_text, "a:b:n grid of mean SNR in dB")->required();

    CLI::App* sample_cmd = app.add_subcommand("sample", "draw variates to a plain file (one per line)");
    add_model_flags(sample_cmd);
    sample_cmd->add_option("--n", n_draws, "number of draws")->required();
    sample_cmd->add_option("--seed", seed, "64-bit stream seed")->required();
    sample_cmd->add_option("--out", out_path, "output path, or - for stdout");
    sample_cmd->add_option("--method", method_name, "auto, mixture, or gamma-sum")
        ->check(CLI::IsMember({"auto", "mixture", "gamma-sum"}));

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit models to a sample file, report JSON");
    fit_cmd->add_option("--in", in_path, "sample file (plain or CSV)")->required();
    fit_cmd->add_option("--format", format_name, "plain, csv, or auto (by extension)")
        ->check(CLI::IsMember({"plain", "csv", "auto"}));
    fit_cmd->add_option("--mu-max", mu_max, "largest mu in the search grid");
    fit_cmd->add_option("--m-max", m_max, "largest m in the search grid");
    fit_cmd->add_option("--models", models_csv,
                        "comma list from shadowed_int,rician,nakagami");

    CLI::App* converge = app.add_subcommand(
        "converge", "sup-norm CDF gap to the kappa-mu limit per m, as CSV");
    converge->add_option("--kappa", prm.kappa, "LOS-to-scatter power ratio")->required();
    converge->add_option("--mu", prm.mu, "number of clusters (integer >= 1)")->required();
    converge->add_option("--gbar", prm.gamma_bar, "mean SNR (linear)")->required();
    converge->add_option("--m-list", m_list, "comma list of m values")
        ->required()
        ->delimiter(',');

    CLI::App* approx = app.add_subcommand(
        "approx-rician", "sup-norm PDF gap of the m-term Rician approximation, as CSV");
    approx->add_option("--K", k_factor, "Rician K factor")->required();
    approx->add_option("--gbar", prm.gamma_bar, "mean SNR (linear)");
    approx->add_option("--m-list", m_list, "comma list of m values")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (mixture->parsed()) return run_mixture(prm);
        if (eval->parsed()) return run_eval(prm, what, parse_grid(grid_text), log_spaced);
        if (capacity->parsed()) return run_capacity(prm, parse_grid(grid_text));
        if (sample_cmd->parsed()) return run_sample(prm, n_draws, seed, out_path, method_name);
        if (fit_cmd->parsed()) return run_fit(in_path, format_name, mu_max, m_max, models_csv);
        if (converge->parsed()) return run_converge(prm.kappa, prm.mu, prm.gamma_bar, m_list);
        if (approx->parsed()) return run_approx_rician(k_factor, prm.gamma_bar, m_list);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "fadekit: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fadekit: %s\n", e.what());
        return 1;
    }
    return 2;
}
