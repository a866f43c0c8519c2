// Command-line front end: census dumps, theorem-scale experiment runs, and
// report emission.  Exit status: 0 all-pass, 1 bound violation, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satolab/experiments.hpp"

using namespace satolab;

namespace {

struct CommonOpts {
    std::vector<std::int64_t> primes;
    std::vector<std::int64_t> weights;
    int n = 2;
    std::string f_expr = "x1+x2";
    std::string j_text = "-0.5,0.5";
    int boxes = 0;
    int degree = 30;
    int resolution = 1024;
    int workers = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--p", o.primes, "prime(s)");
    cmd->add_option("--k", o.weights, "weight(s)");
    cmd->add_option("--n", o.n, "arity");
    cmd->add_option("--f-expr", o.f_expr, "transformation F");
    cmd->add_option("--j", o.j_text, "interval a,b");
    cmd->add_option("--boxes", o.boxes, "cover boxes per axis (0 = schedule default)");
    cmd->add_option("--degree", o.degree, "degree box M");
    cmd->add_option("--resolution", o.resolution, "quadrature resolution per axis");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--timings", o.timings, "include runtimes in reports");
}

std::pair<double, double> parse_interval(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("--j expects 'a,b'");
    double a = std::stod(text.substr(0, comma));
    double b = std::stod(text.substr(comma + 1));
    if (a > b) throw UsageError("--j expects a <= b");
    return {a, b};
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot open output " + out);
    f << text;
}

int finish(const lab::SuiteResult& suite, const CommonOpts& o) {
    std::string text = o.format == "csv" ? lab::reports_to_csv(suite.reports, o.timings)
                                         : lab::reports_to_json(suite.reports, o.timings);
    emit(text, o.out);
    if (!o.out.empty()) {
        int passed = 0;
        for (const auto& r : suite.reports) passed += r.pass ? 1 : 0;
        std::fprintf(stderr, "%d/%zu rows pass\n", passed, suite.reports.size());
    }
    return suite.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vertical Sato-Tate equidistribution laboratory"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<double> lambdas;
    std::vector<std::int64_t> a_coeffs, b_coeffs;
    std::vector<double> targets;
    bool modular = false;
    int R_max = 3, k_max = 10;

    auto* census_cmd = app.add_subcommand("census", "trace histogram of a curve family");
    add_common(census_cmd, o);
    census_cmd->add_option("--a-coeffs", a_coeffs, "A(T) coefficients, ascending (one-parameter family)");
    census_cmd->add_option("--b-coeffs", b_coeffs, "B(T) coefficients, ascending");

    auto* birch_cmd = app.add_subcommand("birch", "one-dimensional effective equidistribution sweep");
    add_common(birch_cmd, o);

    auto* joint_ec_cmd = app.add_subcommand("joint-ec", "joint transformation counts over the full family");
    add_common(joint_ec_cmd, o);

    auto* mfp_cmd = app.add_subcommand("joint-mf-prime", "fixed prime, several weight spaces");
    add_common(mfp_cmd, o);

    auto* mfs_cmd = app.add_subcommand("joint-mf-space", "fixed space, several primes");
    add_common(mfs_cmd, o);

    auto* conv_cmd = app.add_subcommand("convolve", "linear combinations against the convolution measure");
    add_common(conv_cmd, o);
    conv_cmd->add_option("--lambda", lambdas, "scale factors");
    conv_cmd->add_flag("--modular", modular, "sweep weights at a fixed prime instead of primes");

    auto* mom_cmd = app.add_subcommand("moments", "Birch moments and sym-sum envelopes");
    add_common(mom_cmd, o);
    mom_cmd->add_option("--r-max", R_max, "highest moment order");
    mom_cmd->add_option("--k-max", k_max, "highest sym index");

    auto* var_cmd = app.add_subcommand("variation-demo", "unbounded-variation staircase targets");
    add_common(var_cmd, o);
    var_cmd->add_option("--target", targets, "variation target(s)");

    auto* et_cmd = app.add_subcommand("et-check", "Erdos-Turan bound verification on random boxes");
    add_common(et_cmd, o);
    int n_boxes = 200;
    et_cmd->add_option("--boxes-random", n_boxes, "random boxes per sequence");

    auto* kh_cmd = app.add_subcommand("kh-check", "Koksma-Hlawka certificates");
    add_common(kh_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        auto [j_lo, j_hi] = parse_interval(o.j_text);
        if (census_cmd->parsed()) {
            if (o.primes.empty()) throw UsageError("census needs --p");
            std::string text;
            for (std::int64_t p : o.primes) {
                census::TraceHistogram h =
                    a_coeffs.empty() && b_coeffs.empty()
                        ? census::full_family_histogram(p, o.workers)
                        : census::one_param_histogram(census::FamilySpec::one_param(a_coeffs, b_coeffs), p, o.workers);
                text += o.format == "csv" ? h.to_csv() : h.to_json() + "\n";
            }
            emit(text, o.out);
            return 0;
        }
        if (birch_cmd->parsed()) {
            if (o.primes.empty()) o.primes = {101, 211, 401, 1009};
            return finish(lab::run_birch(o.primes, o.workers), o);
        }
        if (joint_ec_cmd->parsed()) {
            if (o.primes.empty()) o.primes = {101, 211, 401, 1009};
            return finish(lab::run_joint_ec(o.primes, o.n, o.f_expr, j_lo, j_hi, o.boxes, o.resolution, o.workers), o);
        }
        if (mfp_cmd->parsed()) {
            if (o.primes.size() != 1 || o.weights.empty())
                throw UsageError("joint-mf-prime needs one --p and --k per axis");
            return finish(lab::run_joint_mf_fixed_prime(o.primes[0], o.weights, o.f_expr, j_lo, j_hi, o.resolution), o);
        }
        if (mfs_cmd->parsed()) {
            if (o.weights.size() != 1 || o.primes.empty())
                throw UsageError("joint-mf-space needs one --k and --p per axis");
            return finish(lab::run_joint_mf_fixed_space(o.weights[0], o.primes, o.f_expr, j_lo, j_hi, o.resolution), o);
        }
        if (conv_cmd->parsed()) {
            if (lambdas.empty()) throw UsageError("convolve needs --lambda");
            if (modular) {
                if (o.primes.size() != 1 || o.weights.size() != lambdas.size())
                    throw UsageError("modular convolve needs one --p and --k per lambda");
                return finish(
                    lab::run_convolution_cor_modular(o.primes[0], {o.weights}, lambdas, j_lo, j_hi, o.resolution), o);
            }
            if (o.primes.empty()) o.primes = {101, 401};
            return finish(lab::run_convolution_cor_elliptic(o.primes, lambdas, j_lo, j_hi, o.workers), o);
        }
        if (mom_cmd->parsed()) {
            if (o.primes.empty()) o.primes = {101, 1009};
            return finish(lab::run_moment_suite(o.primes, R_max, k_max, o.workers), o);
        }
        if (var_cmd->parsed()) {
            if (targets.empty()) targets = {10, 100, 1000};
            return finish(lab::run_variation_demo(targets), o);
        }
        if (et_cmd->parsed()) {
            if (o.primes.empty()) o.primes = {101, 401};
            return finish(lab::run_et_check(o.primes, o.n, n_boxes, o.seed, o.degree, o.workers), o);
        }
        if (kh_cmd->parsed()) {
            if (o.primes.empty()) o.primes = {101};
            return finish(lab::run_kh_check(o.primes, o.f_expr, j_lo, j_hi, o.boxes, o.workers), o);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const SyntaxError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const ArityError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
