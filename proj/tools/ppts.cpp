#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppts/ppts.hpp"

namespace {

// Family parameter flags; only the ones the user actually set are forwarded,
// so catalog defaults stay in charge otherwise.
struct FamilyParams {
    double r = 0.0, s = 0.0, a = 0.0, b = 0.0, k = 0.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--r", r, "shape parameter r (beta1, beta2)");
        cmd->add_option("--s", s, "shape parameter s (beta1, beta2)");
        cmd->add_option("--a", a, "scale parameter a (gamma, logistic)");
        cmd->add_option("--b", b, "shape parameter b (gamma)");
        cmd->add_option("--k", k, "degrees of freedom k (student-t)");
    }

    std::map<std::string, double> collect(const CLI::App* cmd) const {
        std::map<std::string, double> given;
        if (cmd->count("--r")) given["r"] = r;
        if (cmd->count("--s")) given["s"] = s;
        if (cmd->count("--a")) given["a"] = a;
        if (cmd->count("--b")) given["b"] = b;
        if (cmd->count("--k")) given["k"] = k;
        return given;
    }
};

ppts::NewtonConfig newton_config(double tol) {
    ppts::NewtonConfig cfg;
    if (tol > 0.0) cfg.residual_tol = tol;
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot open output file '" + path + "'");
    }
    out << text;
}

std::string trimmed(const std::string& text) {
    const auto from = text.find_first_not_of(" \t\r");
    if (from == std::string::npos) return {};
    return text.substr(from, text.find_last_not_of(" \t\r") - from + 1);
}

// CLI11 applies config files to the root command only, so the per-subcommand
// --config flag is expanded before parsing: each key=value line of the file
// becomes --key value in place of the --config pair. Options set explicitly
// on the command line take precedence over the file; blank lines and #
// comments are skipped.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
    auto given_explicitly = [&](const std::string& flag) {
        for (const auto& arg : args) {
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
        }
        return false;
    };
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string file;
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            out.push_back(args[i]);
            continue;
        }
        std::ifstream in(file);
        if (!in) {
            throw std::invalid_argument("cannot open config file '" + file + "'");
        }
        std::string line;
        for (int line_number = 1; std::getline(in, line); ++line_number) {
            line = trimmed(line);
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            const std::string key = eq == std::string::npos ? "" : trimmed(line.substr(0, eq));
            if (key.empty()) {
                throw std::invalid_argument(file + ":" + std::to_string(line_number) +
                                            ": expected a key=value line");
            }
            if (given_explicitly("--" + key)) continue;
            out.push_back("--" + key);
            out.push_back(trimmed(line.substr(eq + 1)));
        }
    }
    return out;
}

// The eight built-in families with unbounded or heavy-tailed shapes;
// uniform is available individually.
const std::vector<std::string>& table_families() {
    static const std::vector<std::string> families = {
        "normal", "exponential", "double-exponential", "beta1",
        "beta2",  "gamma",       "logistic",           "student-t"};
    return families;
}

int run_solve(const std::string& dist, const std::map<std::string, double>& params, int n,
              double tol, const std::string& format, const std::string& output) {
    const ppts::DistributionModel model = ppts::catalog_make(dist, params);
    const ppts::SolverReport report = ppts::newton_solve(model, n, newton_config(tol));
    emit(ppts::render({ppts::make_record(model, report)}, ppts::parse_format(format)), output);
    return 0;
}

int run_table(const std::string& dist, const std::map<std::string, double>& params, int n_max,
              double tol, const std::string& format, const std::string& output) {
    if (n_max < 1) {
        throw std::invalid_argument("table: requires --n-max >= 1");
    }
    std::vector<std::string> families;
    if (dist == "all") {
        if (!params.empty()) {
            throw std::invalid_argument("table: parameter flags require a single distribution");
        }
        families = table_families();
    } else {
        families = {dist};
    }
    const ppts::OutputFormat fmt = ppts::parse_format(format);
    const ppts::NewtonConfig cfg = newton_config(tol);
    std::string text;
    bool any_failed = false;
    for (const std::string& family : families) {
        const ppts::DistributionModel model = ppts::catalog_make(family, params);
        std::vector<ppts::SolveRecord> records;
        for (int n = 1; n <= n_max; ++n) {
            try {
                records.push_back(ppts::make_record(model, ppts::newton_solve(model, n, cfg)));
            } catch (const ppts::NumericalError& e) {
                std::fprintf(stderr, "table: %s n=%d failed: %s\n", family.c_str(), n,
                             e.what());
                any_failed = true;
            }
        }
        text += ppts::render(records, fmt);
        if (&family != &families.back() &&
            (fmt == ppts::OutputFormat::table || fmt == ppts::OutputFormat::latex)) {
            text += '\n';
        }
    }
    emit(text, output);
    return any_failed ? 3 : 0;
}

int run_t_convergence(int n, const std::vector<int>& k_values, double tol,
                      const std::string& format, const std::string& output) {
    if (k_values.empty()) {
        throw std::invalid_argument("t-convergence: requires --k with at least one value");
    }
    const ppts::OutputFormat fmt = ppts::parse_format(format);
    if (fmt != ppts::OutputFormat::csv && fmt != ppts::OutputFormat::table) {
        throw std::invalid_argument("t-convergence: supports csv and table output");
    }
    const ppts::NewtonConfig cfg = newton_config(tol);
    const ppts::Alpha reference = ppts::newton_solve(ppts::catalog_make("normal"), n, cfg).points;
    std::string text = (fmt == ppts::OutputFormat::csv) ? "k,deviation\n" : "";
    bool any_failed = false;
    for (int k : k_values) {
        const ppts::DistributionModel model =
            ppts::catalog_make("student-t", {{"k", static_cast<double>(k)}});
        char line[128];
        try {
            const ppts::Alpha pts = ppts::newton_solve(model, n, cfg).points;
            double dev = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                dev = std::max(dev, std::abs(pts[i] - reference[i]));
            }
            if (fmt == ppts::OutputFormat::csv) {
                std::snprintf(line, sizeof line, "%d,%.17g\n", k, dev);
            } else {
                std::snprintf(line, sizeof line, "k = %3d  deviation = %.6e\n", k, dev);
            }
        } catch (const ppts::NumericalError& e) {
            any_failed = true;
            if (fmt == ppts::OutputFormat::csv) {
                std::snprintf(line, sizeof line, "%d,failed\n", k);
            } else {
                std::snprintf(line, sizeof line, "k = %3d  failed\n", k);
            }
            std::fprintf(stderr, "t-convergence: k=%d failed: %s\n", k, e.what());
        }
        text += line;
    }
    emit(text, output);
    return any_failed ? 3 : 0;
}

int run_iteration_study(const std::string& dist, int n_max, double tol,
                        const std::string& format, const std::string& output) {
    if (n_max < 1) {
        throw std::invalid_argument("iteration-study: requires --n-max >= 1");
    }
    const ppts::OutputFormat fmt = ppts::parse_format(format);
    if (fmt != ppts::OutputFormat::csv && fmt != ppts::OutputFormat::table) {
        throw std::invalid_argument("iteration-study: supports csv and table output");
    }
    std::vector<std::string> families;
    if (dist == "all") {
        families = ppts::catalog_families();
    } else {
        families = {dist};
    }
    const ppts::NewtonConfig cfg = newton_config(tol);
    std::string text = (fmt == ppts::OutputFormat::csv) ? "distribution,n,iterations\n" : "";
    bool any_failed = false;
    for (const std::string& family : families) {
        const ppts::DistributionModel model = ppts::catalog_make(family);
        for (int n = 1; n <= n_max; ++n) {
            char line[128];
            try {
                const ppts::SolverReport report = ppts::newton_solve(model, n, cfg);
                if (fmt == ppts::OutputFormat::csv) {
                    std::snprintf(line, sizeof line, "%s,%d,%d\n", family.c_str(), n,
                                  report.iterations);
                } else {
                    std::snprintf(line, sizeof line, "%-18s n = %3d  iterations = %3d\n",
                                  family.c_str(), n, report.iterations);
                }
            } catch (const ppts::NumericalError& e) {
                any_failed = true;
                if (fmt == ppts::OutputFormat::csv) {
                    std::snprintf(line, sizeof line, "%s,%d,failed\n", family.c_str(), n);
                } else {
                    std::snprintf(line, sizeof line, "%-18s n = %3d  failed\n",
                                  family.c_str(), n);
                }
                std::fprintf(stderr, "iteration-study: %s n=%d failed: %s\n", family.c_str(),
                             n, e.what());
            }
            text += line;
        }
    }
    emit(text, output);
    return any_failed ? 3 : 0;
}

int run_check(const std::string& dist, const std::map<std::string, double>& params, int n,
              double tol, const std::string& oracles) {
    std::vector<std::string> selected;
    std::string item;
    for (char c : oracles + ",") {
        if (c == ',') {
            if (!item.empty()) selected.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    for (const std::string& oracle : selected) {
        if (oracle != "lloyd" && oracle != "dp" && oracle != "jacobian") {
            throw std::invalid_argument("check: unknown oracle '" + oracle +
                                        "' (expected lloyd, dp, jacobian)");
        }
        if (oracle == "dp" && n > 4) {
            throw std::invalid_argument("check: the dp oracle supports n <= 4");
        }
    }
    const ppts::DistributionModel model = ppts::catalog_make(dist, params);
    const ppts::SolverReport report = ppts::newton_solve(model, n, newton_config(tol));
    bool all_pass = true;
    for (const std::string& oracle : selected) {
        if (oracle == "lloyd") {
            const ppts::Alpha lloyd = ppts::lloyd_solve(model, n);
            double dev = 0.0;
            for (std::size_t i = 0; i < lloyd.size(); ++i) {
                dev = std::max(dev, std::abs(lloyd[i] - report.points[i]));
            }
            const bool pass = dev <= 1e-10;
            all_pass = all_pass && pass;
            std::printf("lloyd:    deviation %.3e, tolerance 1.0e-10: %s\n", dev,
                        pass ? "pass" : "FAIL");
        } else if (oracle == "dp") {
            const ppts::GridSolution grid = ppts::grid_bruteforce(model, n);
            double dev = 0.0;
            for (std::size_t i = 0; i < grid.points.size(); ++i) {
                dev = std::max(dev, std::abs(grid.points[i] - report.points[i]));
            }
            const double tolerance = 2.0 * grid.grid_spacing;
            const bool pass = dev <= tolerance;
            all_pass = all_pass && pass;
            std::printf("dp:       deviation %.3e, tolerance %.3e (2 x grid spacing): %s\n",
                        dev, tolerance, pass ? "pass" : "FAIL");
        } else {
            const ppts::JacobianCheck jc = ppts::jacobian_fd_check(model, report.points);
            const bool pass = jc.max_band_deviation <= 1e-6 && jc.max_off_band <= 1e-8;
            all_pass = all_pass && pass;
            std::printf(
                "jacobian: band deviation %.3e (tolerance 1.0e-06), off-band %.3e "
                "(tolerance 1.0e-08): %s\n",
                jc.max_band_deviation, jc.max_off_band, pass ? "pass" : "FAIL");
        }
    }
    std::printf("%s\n", all_pass ? "all checks passed" : "checks FAILED");
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal points: optimal mean-squared-error quantizers of a distribution"};
    app.require_subcommand(1);

    std::string dist = "normal";
    int n = 0;
    int n_max = 16;
    double tol = -1.0;
    std::string format = "table";
    std::string output;
    std::string oracles = "lloyd,jacobian";
    std::string config_file;
    std::vector<int> k_values = {3, 5, 10, 50, 100, 500};
    FamilyParams fp;
    int exit_code = 0;

    CLI::App* solve = app.add_subcommand("solve", "Compute the n principal points of a model");
    solve->add_option("--dist", dist, "distribution family")->required();
    solve->add_option("--n", n, "number of points")->required();
    solve->add_option("--tol", tol, "residual tolerance override");
    solve->add_option("--format", format, "csv, json, table, or latex");
    solve->add_option("--output", output, "write to file instead of standard output");
    fp.add_flags(solve);
    solve->add_option("--config", config_file, "read options from a key=value file");
    solve->callback(
        [&] { exit_code = run_solve(dist, fp.collect(solve), n, tol, format, output); });

    CLI::App* table = app.add_subcommand("table", "Tabulate points for n = 1 .. n-max");
    table->add_option("--dist", dist, "distribution family, or 'all'")->required();
    table->add_option("--n-max", n_max, "largest number of points");
    table->add_option("--tol", tol, "residual tolerance override");
    table->add_option("--format", format, "csv, json, table, or latex");
    table->add_option("--output", output, "write to file instead of standard output");
    fp.add_flags(table);
    table->add_option("--config", config_file, "read options from a key=value file");
    table->callback(
        [&] { exit_code = run_table(dist, fp.collect(table), n_max, tol, format, output); });

    CLI::App* experiment = app.add_subcommand("experiment", "Convergence experiments");
    experiment->require_subcommand(1);

    CLI::App* tconv = experiment->add_subcommand(
        "t-convergence", "Distance from student-t points to normal points as k grows");
    int tconv_n = 5;
    tconv->add_option("--n", tconv_n, "number of points");
    tconv->add_option("--k", k_values, "degrees-of-freedom values")->delimiter(',');
    tconv->add_option("--tol", tol, "residual tolerance override");
    tconv->add_option("--format", format, "csv or table");
    tconv->add_option("--output", output, "write to file instead of standard output");
    tconv->add_option("--config", config_file, "read options from a key=value file");
    tconv->callback(
        [&] { exit_code = run_t_convergence(tconv_n, k_values, tol, format, output); });

    CLI::App* iter = experiment->add_subcommand(
        "iteration-study", "Newton iterations to convergence for n = 1 .. n-max");
    iter->add_option("--dist", dist, "distribution family, or 'all'");
    int iter_n_max = 100;
    iter->add_option("--n-max", iter_n_max, "largest number of points");
    iter->add_option("--tol", tol, "residual tolerance override");
    iter->add_option("--format", format, "csv or table");
    iter->add_option("--output", output, "write to file instead of standard output");
    iter->add_option("--config", config_file, "read options from a key=value file");
    iter->callback([&] {
        if (!iter->count("--dist")) dist = "all";
        exit_code = run_iteration_study(dist, iter_n_max, tol, format, output);
    });

    CLI::App* check = app.add_subcommand("check", "Cross-validate the solver against oracles");
    check->add_option("--dist", dist, "distribution family")->required();
    check->add_option("--n", n, "number of points")->required();
    check->add_option("--oracles", oracles, "comma list from lloyd, dp, jacobian");
    check->add_option("--tol", tol, "residual tolerance override");
    fp.add_flags(check);
    check->add_option("--config", config_file, "read options from a key=value file");
    check->callback([&] { exit_code = run_check(dist, fp.collect(check), n, tol, oracles); });

    try {
        if (argc > 0) app.name(argv[0]);
        std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
        args = expand_config_args(args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ppts::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_code;
}
