/*
 * Copyright (c) 2026, The mwmean Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "mwmean/config.hpp"
#include "mwmean/error.hpp"
#include "mwmean/families.hpp"
#include "mwmean/means.hpp"
#include "mwmean/mwle.hpp"
#include "mwmean/pipeline.hpp"
#include "mwmean/sweep.hpp"

namespace mwmean::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed on " + path);
}

std::string first_line(const std::string& text) {
    return trim(text.substr(0, text.find('\n')));
}

PipelineConfig pipeline_config(const std::string& config_path) {
    if (config_path.empty()) return {};
    return PipelineConfig::from(KeyValueConfig::load(config_path));
}

// Either an aggregated "year,dem,rep,other" file or raw returns.
ProportionMatrix load_shares(const std::string& path, const std::string& config_path, std::ostream& err) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    if (first_line(text) == "year,dem,rep,other") return parse_proportions_csv(in);
    const PipelineConfig cfg = pipeline_config(config_path);
    const LoadResult loaded = parse_returns(in, cfg.schema);
    if (!loaded.rejects.empty()) {
        err << "ingest: " << loaded.rejects.size() << " rejected row(s); first at line "
            << loaded.rejects.front().line << ": " << loaded.rejects.front().reason << '\n';
    }
    ProportionMatrix m = aggregate(loaded.rows, cfg.mapping);
    for (const auto& w : m.warnings) err << "warning: " << w << '\n';
    return m;
}

// Numeric matrix from delimited text. A non-numeric first line is a header;
// a column named "year" is dropped.
Matrix load_matrix(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::optional<std::size_t> skip;
    bool first = true;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const char delim = t.find('\t') != std::string::npos ? '\t' : ',';
        const auto fields = split_delimited(t, delim);
        if (first) {
            first = false;
            bool numeric = true;
            try {
                for (const auto& f : fields) (void)parse_double(f);
            } catch (const ConfigError&) {
                numeric = false;
            }
            if (!numeric) {
                for (std::size_t j = 0; j < fields.size(); ++j) {
                    if (trim(fields[j]) == "year") skip = j;
                }
                continue;
            }
        }
        std::vector<double> row;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (skip && j == *skip) continue;
            row.push_back(parse_double(fields[j]));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DomainError("ragged data file " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DomainError("data file " + path + " has no rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

std::string join(const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += shortest_repr(v[i]);
    }
    return s;
}

std::vector<double> broadcast(std::vector<double> v, Eigen::Index q, const char* what) {
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(q), v.front());
    if (static_cast<Eigen::Index>(v.size()) != q) {
        throw ConfigError(std::string(what) + " needs 1 or " + std::to_string(q) + " values");
    }
    return v;
}

struct MeanArgs {
    std::string kind = "holder";
    std::string alpha;
    std::string fn = "identity";
    std::vector<double> values;
    std::string weights;
};

int cmd_mean(const MeanArgs& a, std::ostream& out) {
    if (a.values.empty()) throw DomainError("no values given");
    double result = 0.0;
    if (a.kind == "f") {
        static const std::map<std::string, std::pair<double (*)(double), double (*)(double)>> fns{
            {"identity", {[](double x) { return x; }, [](double y) { return y; }}},
            {"log", {[](double x) { return std::log(x); }, [](double y) { return std::exp(y); }}},
            {"sqrt", {[](double x) { return std::sqrt(x); }, [](double y) { return y * y; }}},
            {"square", {[](double x) { return x * x; }, [](double y) { return std::sqrt(y); }}},
        };
        const auto it = fns.find(a.fn);
        if (it == fns.end()) throw ConfigError("unknown f '" + a.fn + "'");
        for (double v : a.values) {
            if (v < 0.0) throw DomainError("negative value " + shortest_repr(v));
        }
        result = f_mean(it->second.first, it->second.second, a.values);
    } else {
        if (a.alpha.empty()) throw ConfigError("--alpha is required for kind " + a.kind);
        const MeanOrder order = MeanOrder::parse(a.alpha);
        std::vector<double> w = a.weights.empty() ? std::vector<double>(a.values.size(), 1.0)
                                                  : parse_double_list(a.weights);
        const Sample sample(a.values, std::move(w));
        result = a.kind == "lehmer" ? lehmer_mean(order, sample) : holder_mean(order, sample);
    }
    out << shortest_repr(result) << '\n';
    return kOk;
}

struct FitArgs {
    std::string config;
    std::string family;
    std::string shape;
    std::string sigma;
    std::string policy;
    std::string beta;
    std::string path;
    std::string data;
    std::vector<double> values;
    std::string format = "text";
    std::uint64_t seed = 1;
    std::size_t mc_samples = 0;
};

int cmd_fit(FitArgs a, std::ostream& out) {
    KeyValueConfig cfg;
    if (!a.config.empty()) cfg = KeyValueConfig::load(a.config);
    auto pick = [&](const std::string& flag, const char* key, const char* fallback) {
        if (!flag.empty()) return flag;
        return cfg.get(key).value_or(fallback);
    };
    const std::string family = pick(a.family, "family", "weibull");
    const std::string policy_name = pick(a.policy, "policy", "holder");
    const std::string path = pick(a.path, "path", "auto");
    const std::string data_path = pick(a.data, "data", "");

    Matrix obs;
    if (!a.values.empty()) {
        obs = Eigen::Map<const Vector>(a.values.data(), static_cast<Eigen::Index>(a.values.size()));
    } else if (!data_path.empty()) {
        obs = load_matrix(data_path);
    } else {
        throw ConfigError("fit needs --data or inline values");
    }
    const Eigen::Index q = obs.cols();

    std::optional<FamilyModel> model;
    if (family == "weibull") {
        model = weibull_model({broadcast(parse_double_list(pick(a.shape, "shape", "1")), q, "--shape")});
    } else if (family == "gaussian") {
        model = gaussian_known_variance_model(broadcast(parse_double_list(pick(a.sigma, "sigma", "1")), q, "--sigma"));
    } else {
        throw ConfigError("unknown family '" + family + "' (weibull, gaussian)");
    }

    WeightPolicy policy;
    if (policy_name == "holder") {
        policy = WeightPolicy::holder();
    } else if (policy_name == "lehmer") {
        const std::string beta = pick(a.beta, "beta", "");
        if (beta.empty()) throw ConfigError("lehmer policy needs --beta");
        policy = WeightPolicy::lehmer(parse_double_list(beta));
    } else {
        throw ConfigError("unknown policy '" + policy_name + "' (holder, lehmer)");
    }

    FitOptions opts;
    if (path == "auto") opts.solver.path = SolverPath::automatic;
    else if (path == "closed") opts.solver.path = SolverPath::closed_form;
    else if (path == "newton") opts.solver.path = SolverPath::newton;
    else throw ConfigError("unknown solver path '" + path + "' (auto, closed, newton)");

    const FitResult r = fit(*model, obs, policy, opts);
    std::optional<MinimalityVerdict> mc;
    if (a.mc_samples > 0) mc = check_minimality(*model, r.eta_hat, a.mc_samples, a.seed);

    const auto& d = r.diagnostics;
    if (a.format == "csv") {
        out << "component,theta_hat,eta_hat,target,residual,iterations,minimal\n";
        for (Eigen::Index j = 0; j < r.theta_hat.size(); ++j) {
            out << j << ',' << shortest_repr(r.theta_hat[j]) << ',' << shortest_repr(r.eta_hat[j]) << ','
                << shortest_repr(r.target.value[j]) << ',' << shortest_repr(d.residual) << ',' << d.iterations
                << ',' << (d.minimality.minimal ? "true" : "false") << '\n';
        }
    } else if (a.format == "text") {
        const auto subclass = subclass_form(*model, policy);
        out << "family: " << model->name() << '\n'
            << "policy: " << policy_name << '\n'
            << "theta_hat: " << join(r.theta_hat) << '\n'
            << "eta_hat: " << join(r.eta_hat) << '\n'
            << "target: " << join(r.target.value) << '\n'
            << "solver: " << (d.path == SolverPath::closed_form ? "closed-form" : "newton")
            << (d.used_bisection ? " (bisection fallback)" : "") << ", iterations " << d.iterations
            << ", residual " << shortest_repr(d.residual) << '\n'
            << "hessian eigenvalues: [" << shortest_repr(d.hessian_min_eigenvalue) << ", "
            << shortest_repr(d.hessian_max_eigenvalue) << "]\n"
            << "minimality: " << (d.minimality.minimal ? "minimal" : "degenerate") << '\n'
            << "mean family: "
            << (subclass.is_lehmer_mean ? "lehmer" : subclass.is_holder_mean ? "holder" : "none") << '\n';
        if (mc) {
            out << "monte carlo minimality (" << a.mc_samples << " draws, seed " << a.seed
                << "): " << (mc->minimal ? "minimal" : "degenerate") << '\n';
        }
        for (const auto& w : d.warnings) out << "warning: " << w << '\n';
    } else {
        throw ConfigError("unknown format '" + a.format + "' (text, csv)");
    }
    return kOk;
}

struct SweepArgs {
    std::string data;
    std::string mode = "lehmer";
    std::string grid;
    std::string output;
    std::string svg;
    std::string config;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    SweepMode mode;
    if (a.mode == "lehmer") mode = SweepMode::lehmer;
    else if (a.mode == "holder") mode = SweepMode::holder;
    else throw ConfigError("unknown mode '" + a.mode + "' (lehmer, holder)");
    const Grid grid = a.grid.empty() ? default_grid(mode) : Grid::parse(a.grid);
    if (mode == SweepMode::holder && !(grid.start > 0.0)) throw ConfigError("holder grid must start above 0");

    const ProportionMatrix shares = load_shares(a.data, a.config, err);
    const SweepTable table = run_sweep(to_weighted_dataset(shares).observations(), mode, grid.points());
    table.validate();
    std::size_t gaps = 0;
    for (const auto& r : table.rows) {
        if (!r.lambda) {
            ++gaps;
            err << "gap at " << table.parameter << "=" << shortest_repr(r.order) << ": " << r.error << '\n';
        }
    }
    const std::string csv = to_csv(table);
    if (a.output.empty()) {
        out << csv;
    } else {
        write_file(a.output, csv);
    }
    if (!a.svg.empty()) write_file(a.svg, render_line_chart(sweep_chart(table, mode)));
    err << "sweep: " << table.rows.size() << " grid points over " << shares.shares.rows()
        << " cycles, " << gaps << " gap(s)\n";
    return kOk;
}

struct VWeightArgs {
    std::string grid = "-3:4:0.1";
    std::string pair = "0.6,2";
    std::string output;
    std::string svg;
};

int cmd_vweights(const VWeightArgs& a, std::ostream& out) {
    const auto pair = parse_double_list(a.pair);
    if (pair.size() != 2) throw ConfigError("--pair needs exactly two values");
    for (double v : pair) {
        if (!(v > 0.0)) throw DomainError("v-weight curves need positive values, got " + shortest_repr(v));
    }
    const auto rows = vweight_curves(pair[0], pair[1], Grid::parse(a.grid).points());
    const std::string csv = vweights_csv(rows);
    if (a.output.empty()) {
        out << csv;
    } else {
        write_file(a.output, csv);
    }
    if (!a.svg.empty()) write_file(a.svg, render_line_chart(vweights_chart(rows, pair[0], pair[1])));
    return kOk;
}

struct IngestArgs {
    std::string data;
    std::string config;
    std::string output;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
    const PipelineConfig cfg = pipeline_config(a.config);
    const LoadResult loaded = load_returns(a.data, cfg.schema);
    for (const auto& r : loaded.rejects) err << "rejected line " << r.line << ": " << r.reason << '\n';
    const ProportionMatrix m = aggregate(loaded.rows, cfg.mapping);
    for (const auto& w : m.warnings) err << "warning: " << w << '\n';
    const std::string csv = to_csv(m);
    if (a.output.empty()) {
        out << csv;
    } else {
        write_file(a.output, csv);
    }
    err << "ingest: " << loaded.rows.size() << " rows, " << loaded.rejects.size() << " rejected, "
        << m.shares.rows() << " cycles\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hölder and Lehmer means as maximum weighted likelihood estimators", "mwmean"};
    app.require_subcommand(1);

    MeanArgs mean;
    auto* mean_cmd = app.add_subcommand("mean", "Evaluate a Hölder, Lehmer or f-mean");
    mean_cmd->add_option("--kind", mean.kind, "holder, lehmer or f")->check(CLI::IsMember({"holder", "lehmer", "f"}));
    mean_cmd->add_option("--alpha", mean.alpha, "Mean order (number, inf or -inf)");
    mean_cmd->add_option("--fn", mean.fn, "f for --kind f: identity, log, sqrt, square");
    mean_cmd->add_option("--weights", mean.weights, "Comma separated w-weights");
    mean_cmd->add_option("values", mean.values, "Observations")->required();

    FitArgs fitargs;
    auto* fit_cmd = app.add_subcommand("fit", "MWLE of a family under a weight policy");
    fit_cmd->add_option("--config", fitargs.config, "key=value file (family, shape, sigma, policy, beta, path, data)");
    fit_cmd->add_option("--family", fitargs.family, "weibull or gaussian");
    fit_cmd->add_option("--shape", fitargs.shape, "Weibull shapes, one or one per column");
    fit_cmd->add_option("--sigma", fitargs.sigma, "Gaussian standard deviations");
    fit_cmd->add_option("--policy", fitargs.policy, "holder or lehmer");
    fit_cmd->add_option("--beta", fitargs.beta, "Lehmer exponents, one or one per column");
    fit_cmd->add_option("--path", fitargs.path, "auto, closed or newton");
    fit_cmd->add_option("--data", fitargs.data, "Numeric CSV, one observation per row");
    fit_cmd->add_option("--format", fitargs.format, "text or csv");
    fit_cmd->add_option("--seed", fitargs.seed, "Seed for the Monte Carlo minimality check");
    fit_cmd->add_option("--mc-samples", fitargs.mc_samples, "Draws for the Monte Carlo minimality check");
    fit_cmd->add_option("values", fitargs.values, "Inline single-column observations");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the mean order over the election data");
    sweep_cmd->add_option("--data", sweep.data, "Returns file or year,dem,rep,other CSV")->required();
    sweep_cmd->add_option("--mode", sweep.mode, "lehmer or holder");
    sweep_cmd->add_option("--grid", sweep.grid, "start:stop:step");
    sweep_cmd->add_option("-o,--output", sweep.output, "CSV output path (default stdout)");
    sweep_cmd->add_option("--svg", sweep.svg, "SVG chart output path");
    sweep_cmd->add_option("--config", sweep.config, "Pipeline config for raw returns");

    VWeightArgs vw;
    auto* vw_cmd = app.add_subcommand("vweights", "Lehmer and Hölder v-weight curves of a pair");
    vw_cmd->add_option("--grid", vw.grid, "alpha grid start:stop:step");
    vw_cmd->add_option("--pair", vw.pair, "Two positive values, comma separated");
    vw_cmd->add_option("-o,--output", vw.output, "CSV output path (default stdout)");
    vw_cmd->add_option("--svg", vw.svg, "SVG chart output path");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate returns into per-cycle vote shares");
    ingest_cmd->add_option("--data", ingest.data, "Returns file")->required();
    ingest_cmd->add_option("--config", ingest.config, "Pipeline config");
    ingest_cmd->add_option("-o,--output", ingest.output, "CSV output path (default stdout)");

    std::vector<const char*> argv{"mwmean"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kDomainError;
    }

    try {
        if (*mean_cmd) return cmd_mean(mean, out);
        if (*fit_cmd) return cmd_fit(fitargs, out);
        if (*sweep_cmd) return cmd_sweep(sweep, out, err);
        if (*vw_cmd) return cmd_vweights(vw, out);
        if (*ingest_cmd) return cmd_ingest(ingest, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const NoSolutionError& e) {
        err << "error: " << e.what() << "; attainable targets: " << e.attainable() << '\n';
        return kSolverFailure;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "; last residual " << shortest_repr(e.residual()) << '\n';
        return kSolverFailure;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kDomainError;
}

}  // namespace mwmean::cli
